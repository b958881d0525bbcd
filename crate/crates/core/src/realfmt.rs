//! Reader and writer for an MCT-only subset of the RevLib `.real` format.
//!
//! Accepted grammar (see `docs/real-subset.md` for the full description):
//!
//! ```text
//! file      := line*
//! line      := [content] ['#' comment]
//! header    := .version TEXT | .numvars N | .variables NAME+
//!            | .inputs TEXT | .outputs TEXT | .constants TEXT | .garbage TEXT
//! body      := .begin gate* .end
//! gate      := tK ctrl{K-1} NAME        ; K >= 1, ctrl := ['-'] NAME
//! ```
//!
//! Directives and gate names are case-insensitive. Variable `i` in
//! `.variables` is circuit line `i`. A `-` prefix on a control makes it a
//! negative control. `.inputs`, `.outputs`, `.constants` and `.garbage`
//! are kept verbatim but carry no simulation meaning.

use std::collections::HashMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bits::MAX_WIDTH;
use crate::circuit::{Circuit, Control, Gate, Polarity};
use crate::error::{Error, Result};

/// A parse failure, tagged with the 1-based line it occurred on.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("directive `{0}` appears more than once")]
    DuplicateDirective(String),
    #[error("directive `{0}` is not allowed inside .begin/.end")]
    DirectiveInBody(String),
    #[error("missing value for `{0}`")]
    MissingValue(String),
    #[error("invalid .numvars value `{0}`")]
    InvalidNumvars(String),
    #[error("{0} lines exceed the supported maximum of 64")]
    TooManyLines(usize),
    #[error(".numvars is {declared} but {listed} variables are listed")]
    VariableCountMismatch { declared: usize, listed: usize },
    #[error("missing `{0}` before .begin")]
    MissingHeader(&'static str),
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("unsupported gate `{0}` (only tK gates are accepted)")]
    UnknownGate(String),
    #[error("gate expects {expected} operands, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("line `{0}` used twice in one gate")]
    DuplicateLine(String),
    #[error("target `{0}` cannot be negated")]
    NegatedTarget(String),
    #[error("missing .begin")]
    MissingBegin,
    #[error("missing .end")]
    MissingEnd,
    #[error("content after .end")]
    TrailingContent,
}

/// A parsed `.real` file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RealDocument {
    pub version: Option<String>,
    pub numvars: usize,
    pub variables: Vec<String>,
    pub inputs: Option<String>,
    pub outputs: Option<String>,
    pub constants: Option<String>,
    pub garbage: Option<String>,
    pub gates: Vec<Gate>,
    /// Comment text (from `#` to end of line), in file order.
    pub comments: Vec<String>,
}

#[derive(PartialEq)]
enum Section {
    Header,
    Body,
    Done,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

pub fn parse_real(text: &str) -> Result<RealDocument, ParseError> {
    let mut doc = RealDocument::default();
    let mut section = Section::Header;
    let mut numvars: Option<(usize, usize)> = None;
    let mut variables: Option<usize> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let content = match raw.find('#') {
            Some(pos) => {
                doc.comments.push(raw[pos..].trim_end().to_string());
                &raw[..pos]
            }
            None => raw,
        };
        let mut tokens = content.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();

        if section == Section::Done {
            return Err(err(lineno, ParseErrorKind::TrailingContent));
        }

        if let Some(name) = head.strip_prefix('.') {
            let name = name.to_ascii_lowercase();
            if section == Section::Body {
                if name == "end" {
                    section = Section::Done;
                    continue;
                }
                return Err(err(
                    lineno,
                    ParseErrorKind::DirectiveInBody(head.to_string()),
                ));
            }
            let once = |slot_taken: bool| {
                if slot_taken {
                    Err(err(
                        lineno,
                        ParseErrorKind::DuplicateDirective(head.to_string()),
                    ))
                } else {
                    Ok(())
                }
            };
            let text_value = || {
                if rest.is_empty() {
                    Err(err(lineno, ParseErrorKind::MissingValue(head.to_string())))
                } else {
                    Ok(rest.join(" "))
                }
            };
            match name.as_str() {
                "version" => {
                    once(doc.version.is_some())?;
                    doc.version = Some(text_value()?);
                }
                "numvars" => {
                    once(numvars.is_some())?;
                    let value = match rest.as_slice() {
                        [v] => v,
                        [] => {
                            return Err(err(lineno, ParseErrorKind::MissingValue(head.to_string())))
                        }
                        _ => {
                            return Err(err(lineno, ParseErrorKind::InvalidNumvars(rest.join(" "))))
                        }
                    };
                    let n: usize = value.parse().map_err(|_| {
                        err(lineno, ParseErrorKind::InvalidNumvars(value.to_string()))
                    })?;
                    if n == 0 {
                        return Err(err(
                            lineno,
                            ParseErrorKind::InvalidNumvars(value.to_string()),
                        ));
                    }
                    if n > MAX_WIDTH {
                        return Err(err(lineno, ParseErrorKind::TooManyLines(n)));
                    }
                    numvars = Some((n, lineno));
                }
                "variables" => {
                    once(variables.is_some())?;
                    if rest.is_empty() {
                        return Err(err(lineno, ParseErrorKind::MissingValue(head.to_string())));
                    }
                    for (line, name) in rest.iter().enumerate() {
                        if name.starts_with('-') {
                            return Err(err(
                                lineno,
                                ParseErrorKind::InvalidVariableName(name.to_string()),
                            ));
                        }
                        if index.insert(name.to_string(), line).is_some() {
                            return Err(err(
                                lineno,
                                ParseErrorKind::DuplicateVariable(name.to_string()),
                            ));
                        }
                        doc.variables.push(name.to_string());
                    }
                    variables = Some(lineno);
                }
                "inputs" => {
                    once(doc.inputs.is_some())?;
                    doc.inputs = Some(text_value()?);
                }
                "outputs" => {
                    once(doc.outputs.is_some())?;
                    doc.outputs = Some(text_value()?);
                }
                "constants" => {
                    once(doc.constants.is_some())?;
                    doc.constants = Some(text_value()?);
                }
                "garbage" => {
                    once(doc.garbage.is_some())?;
                    doc.garbage = Some(text_value()?);
                }
                "begin" => {
                    let (n, n_line) = numvars
                        .ok_or_else(|| err(lineno, ParseErrorKind::MissingHeader(".numvars")))?;
                    let v_line = variables
                        .ok_or_else(|| err(lineno, ParseErrorKind::MissingHeader(".variables")))?;
                    if n != doc.variables.len() {
                        return Err(err(
                            n_line.max(v_line),
                            ParseErrorKind::VariableCountMismatch {
                                declared: n,
                                listed: doc.variables.len(),
                            },
                        ));
                    }
                    doc.numvars = n;
                    section = Section::Body;
                }
                "end" => return Err(err(lineno, ParseErrorKind::MissingBegin)),
                _ => {
                    return Err(err(
                        lineno,
                        ParseErrorKind::UnknownDirective(head.to_string()),
                    ))
                }
            }
            continue;
        }

        if section == Section::Header {
            return Err(err(lineno, ParseErrorKind::MissingBegin));
        }
        doc.gates.push(parse_gate(lineno, head, &rest, &index)?);
    }

    match section {
        Section::Header => Err(err(last_line.max(1), ParseErrorKind::MissingBegin)),
        Section::Body => Err(err(last_line.max(1), ParseErrorKind::MissingEnd)),
        Section::Done => Ok(doc),
    }
}

fn parse_gate(
    lineno: usize,
    head: &str,
    operands: &[&str],
    index: &HashMap<String, usize>,
) -> Result<Gate, ParseError> {
    let arity = head
        .strip_prefix(['t', 'T'])
        .filter(|k| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|k| k.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| err(lineno, ParseErrorKind::UnknownGate(head.to_string())))?;
    if operands.len() != arity {
        return Err(err(
            lineno,
            ParseErrorKind::ArityMismatch {
                expected: arity,
                found: operands.len(),
            },
        ));
    }
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| err(lineno, ParseErrorKind::UndeclaredVariable(name.to_string())))
    };
    let mut used = 0u64;
    let mut claim = |line: usize, name: &str| {
        if used & (1 << line) != 0 {
            return Err(err(lineno, ParseErrorKind::DuplicateLine(name.to_string())));
        }
        used |= 1 << line;
        Ok(())
    };

    let (target_tok, control_toks) = operands.split_last().expect("arity >= 1");
    let mut controls = Vec::with_capacity(control_toks.len());
    for tok in control_toks {
        let (name, polarity) = match tok.strip_prefix('-') {
            Some(name) => (name, Polarity::Negative),
            None => (*tok, Polarity::Positive),
        };
        let line = lookup(name)?;
        claim(line, name)?;
        controls.push(Control { line, polarity });
    }
    if let Some(name) = target_tok.strip_prefix('-') {
        lookup(name)?;
        return Err(err(lineno, ParseErrorKind::NegatedTarget(name.to_string())));
    }
    let target = lookup(target_tok)?;
    claim(target, target_tok)?;
    Ok(Gate::new(target, controls).expect("operands validated above"))
}

impl RealDocument {
    /// Wraps a circuit with default names `x1..xn`.
    pub fn from_circuit(circuit: &Circuit) -> Self {
        RealDocument {
            version: Some("1.0".to_string()),
            numvars: circuit.width(),
            variables: default_names(circuit.width()),
            gates: circuit.gates().to_vec(),
            ..Default::default()
        }
    }

    pub fn to_circuit(&self) -> Result<Circuit> {
        Circuit::new(self.numvars, self.gates.clone())
    }

    /// Serializes the document. Comments are emitted at the top.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str(c);
            out.push('\n');
        }
        if let Some(v) = &self.version {
            push_line(&mut out, ".version", v);
        }
        push_line(&mut out, ".numvars", &self.numvars.to_string());
        push_line(&mut out, ".variables", &self.variables.join(" "));
        for (key, value) in [
            (".inputs", &self.inputs),
            (".outputs", &self.outputs),
            (".constants", &self.constants),
            (".garbage", &self.garbage),
        ] {
            if let Some(v) = value {
                push_line(&mut out, key, v);
            }
        }
        out.push_str(".begin\n");
        for g in &self.gates {
            write_gate(&mut out, g, &self.variables);
        }
        out.push_str(".end\n");
        out
    }
}

fn push_line(out: &mut String, key: &str, value: &str) {
    out.push_str(key);
    out.push(' ');
    out.push_str(value);
    out.push('\n');
}

fn write_gate(out: &mut String, gate: &Gate, names: &[String]) {
    use fmt::Write;
    let _ = write!(out, "t{}", gate.control_count() + 1);
    for c in gate.controls() {
        out.push(' ');
        if c.polarity == Polarity::Negative {
            out.push('-');
        }
        out.push_str(&names[c.line]);
    }
    out.push(' ');
    out.push_str(&names[gate.target()]);
    out.push('\n');
}

pub fn default_names(width: usize) -> Vec<String> {
    (1..=width).map(|i| format!("x{i}")).collect()
}

/// Canonical text for `circuit` using the default names `x1..xn`.
pub fn write_real(circuit: &Circuit) -> String {
    RealDocument::from_circuit(circuit).to_text()
}

/// Canonical text for `circuit` with caller-supplied line names.
pub fn write_real_named(circuit: &Circuit, names: &[String]) -> Result<String> {
    if names.len() != circuit.width() {
        return Err(Error::invalid(format!(
            "{} names given for {} lines",
            names.len(),
            circuit.width()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if n.is_empty() || n.starts_with('-') || n.contains(|c: char| c.is_whitespace() || c == '#')
        {
            return Err(Error::invalid(format!("invalid line name {n:?}")));
        }
        if !seen.insert(n) {
            return Err(Error::invalid(format!("line name {n:?} used twice")));
        }
    }
    let doc = RealDocument {
        variables: names.to_vec(),
        ..RealDocument::from_circuit(circuit)
    };
    Ok(doc.to_text())
}

/// Parses `.real` text straight into a circuit.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    parse_real(text)?.to_circuit()
}

/// SHA-256 of the canonical serialization, hex encoded.
pub fn content_digest(circuit: &Circuit) -> String {
    hex::encode(Sha256::digest(write_real(circuit).as_bytes()))
}
