//! Multi-controlled NOT gates and the circuits built from them.

use std::fmt;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bits::{check_width, BitString, MAX_WIDTH};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Exhaustive tables are limited to this many lines (2^20 entries).
pub const MAX_TABLE_WIDTH: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Satisfied when the line reads 1.
    Positive,
    /// Satisfied when the line reads 0.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Control {
    pub line: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn positive(line: usize) -> Self {
        Control {
            line,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(line: usize) -> Self {
        Control {
            line,
            polarity: Polarity::Negative,
        }
    }
}

/// A multi-controlled NOT: flips `target` iff every control matches its
/// polarity. With no controls it is a plain NOT.
///
/// Stored as bit masks only, so controls always read back in ascending
/// line order regardless of the order they were given in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GateRepr", into = "GateRepr")]
pub struct Gate {
    // Flip `flip` iff `x & care == want`.
    care: u64,
    want: u64,
    flip: u64,
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    target: usize,
    controls: Vec<Control>,
}

impl TryFrom<GateRepr> for Gate {
    type Error = Error;

    fn try_from(r: GateRepr) -> Result<Self> {
        Gate::new(r.target, r.controls)
    }
}

impl From<Gate> for GateRepr {
    fn from(g: Gate) -> Self {
        GateRepr {
            target: g.target(),
            controls: g.controls().collect(),
        }
    }
}

/// Controls of a gate in ascending line order.
#[derive(Debug, Clone)]
pub struct Controls {
    remaining: u64,
    want: u64,
}

impl Iterator for Controls {
    type Item = Control;

    fn next(&mut self) -> Option<Control> {
        if self.remaining == 0 {
            return None;
        }
        let line = self.remaining.trailing_zeros() as usize;
        self.remaining &= self.remaining - 1;
        let polarity = if self.want >> line & 1 == 1 {
            Polarity::Positive
        } else {
            Polarity::Negative
        };
        Some(Control { line, polarity })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Controls {}

impl Gate {
    pub fn new(target: usize, controls: impl IntoIterator<Item = Control>) -> Result<Self> {
        if target >= MAX_WIDTH {
            return Err(Error::invalid(format!("target line {target} out of range")));
        }
        let mut care = 0u64;
        let mut want = 0u64;
        for c in controls {
            if c.line >= MAX_WIDTH {
                return Err(Error::invalid(format!(
                    "control line {} out of range",
                    c.line
                )));
            }
            if c.line == target {
                return Err(Error::invalid(format!(
                    "line {target} is both control and target"
                )));
            }
            let bit = 1u64 << c.line;
            if care & bit != 0 {
                return Err(Error::invalid(format!("duplicate control line {}", c.line)));
            }
            care |= bit;
            if c.polarity == Polarity::Positive {
                want |= bit;
            }
        }
        Ok(Gate {
            care,
            want,
            flip: 1u64 << target,
        })
    }

    pub fn not(target: usize) -> Result<Self> {
        Gate::new(target, [])
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Gate::new(target, [Control::positive(control)])
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Result<Self> {
        Gate::new(target, [Control::positive(c0), Control::positive(c1)])
    }

    /// Gate with positive controls on `controls`.
    pub fn mct(controls: &[usize], target: usize) -> Result<Self> {
        Gate::new(target, controls.iter().copied().map(Control::positive))
    }

    pub fn target(&self) -> usize {
        self.flip.trailing_zeros() as usize
    }

    pub fn controls(&self) -> Controls {
        Controls {
            remaining: self.care,
            want: self.want,
        }
    }

    pub fn control_count(&self) -> usize {
        self.care.count_ones() as usize
    }

    /// Mask of every line the gate touches.
    pub fn lines_mask(&self) -> u64 {
        self.care | self.flip
    }

    /// Highest line index referenced.
    pub fn max_line(&self) -> usize {
        63 - self.lines_mask().leading_zeros() as usize
    }

    /// The same gate moved up by `offset` lines.
    pub fn shifted(&self, offset: usize) -> Result<Self> {
        let controls = self.controls().map(|c| Control {
            line: c.line + offset,
            polarity: c.polarity,
        });
        Gate::new(self.target() + offset, controls)
    }

    #[inline(always)]
    pub fn apply_bits(&self, x: u64) -> u64 {
        let hit = ((x & self.care) == self.want) as u64;
        x ^ (self.flip & hit.wrapping_neg())
    }

    pub fn apply(&self, x: BitString) -> Result<BitString> {
        if self.max_line() >= x.width() {
            return Err(Error::invalid(format!(
                "gate uses line {} but input has width {}",
                self.max_line(),
                x.width()
            )));
        }
        BitString::new(x.width(), self.apply_bits(x.bits()))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.control_count() + 1)?;
        for c in self.controls() {
            let sign = if c.polarity == Polarity::Negative {
                "-"
            } else {
                ""
            };
            write!(f, " {sign}{}", c.line)?;
        }
        write!(f, " {}", self.target())
    }
}

/// Shorthand for [`Gate::apply`].
pub fn apply_gate(gate: &Gate, x: BitString) -> Result<BitString> {
    gate.apply(x)
}

/// An ordered list of MCT gates over `width` lines, applied first to last.
///
/// Equality is structural: same width and identical gate lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr", into = "CircuitRepr")]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    width: usize,
    gates: Vec<Gate>,
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRepr) -> Result<Self> {
        Circuit::new(r.width, r.gates)
    }
}

impl From<Circuit> for CircuitRepr {
    fn from(c: Circuit) -> Self {
        CircuitRepr {
            width: c.width,
            gates: c.gates,
        }
    }
}

impl Circuit {
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self> {
        check_width(width)?;
        if let Some(g) = gates.iter().find(|g| g.max_line() >= width) {
            return Err(Error::invalid(format!(
                "gate `{g}` does not fit in {width} lines"
            )));
        }
        Ok(Circuit { width, gates })
    }

    pub fn empty(width: usize) -> Result<Self> {
        Circuit::new(width, Vec::new())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if gate.max_line() >= self.width {
            return Err(Error::invalid(format!(
                "gate `{gate}` does not fit in {} lines",
                self.width
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Simulates a raw word whose bits above `width` are clear.
    #[inline]
    pub fn simulate_bits(&self, x: u64) -> u64 {
        self.gates.iter().fold(x, |acc, g| g.apply_bits(acc))
    }

    pub fn simulate(&self, x: BitString) -> Result<BitString> {
        if x.width() != self.width {
            return Err(Error::invalid(format!(
                "input width {} does not match circuit width {}",
                x.width(),
                self.width
            )));
        }
        BitString::new(self.width, self.simulate_bits(x.bits()))
    }

    /// The inverse circuit. Every MCT gate is an involution, so reversing
    /// the gate order suffices.
    pub fn invert(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().cloned().collect(),
        }
    }

    /// `self` followed by `next`, i.e. the map `next ∘ self`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        if next.width != self.width {
            return Err(Error::invalid(format!(
                "cannot compose widths {} and {}",
                self.width, next.width
            )));
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&next.gates);
        Ok(Circuit {
            width: self.width,
            gates,
        })
    }

    pub fn permutation_table(&self) -> Result<PermTable> {
        check_table_width(self.width)?;
        let images = (0..1u64 << self.width)
            .map(|x| self.simulate_bits(x) as u32)
            .collect();
        let table = PermTable {
            width: self.width,
            images,
        };
        debug_assert!(table.is_permutation());
        Ok(table)
    }
}

pub(crate) fn check_table_width(width: usize) -> Result<()> {
    if width > MAX_TABLE_WIDTH {
        return Err(Error::CapacityExceeded {
            what: "circuit width",
            actual: width,
            limit: MAX_TABLE_WIDTH,
        });
    }
    Ok(())
}

/// Shorthand for [`Circuit::simulate`].
pub fn simulate(circuit: &Circuit, x: BitString) -> Result<BitString> {
    circuit.simulate(x)
}

/// Shorthand for [`Circuit::invert`].
pub fn invert(circuit: &Circuit) -> Circuit {
    circuit.invert()
}

/// Shorthand for [`Circuit::permutation_table`].
pub fn permutation_table(circuit: &Circuit) -> Result<PermTable> {
    circuit.permutation_table()
}

/// The full input-to-output map of a circuit with at most 20 lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermTable {
    width: usize,
    images: Vec<u32>,
}

impl PermTable {
    pub fn identity(width: usize) -> Result<Self> {
        check_width(width)?;
        check_table_width(width)?;
        Ok(PermTable {
            width,
            images: (0..1u32 << width).collect(),
        })
    }

    /// Wraps an explicit image list, rejecting anything that is not a
    /// permutation of `0..2^width`.
    pub fn from_images(width: usize, images: Vec<u32>) -> Result<Self> {
        check_width(width)?;
        check_table_width(width)?;
        if images.len() != 1 << width {
            return Err(Error::invalid(format!(
                "expected {} images, got {}",
                1u64 << width,
                images.len()
            )));
        }
        let table = PermTable { width, images };
        if !table.is_permutation() {
            return Err(Error::invalid("images are not a permutation"));
        }
        Ok(table)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn image(&self, x: u64) -> u64 {
        self.images[x as usize] as u64
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.images.len()];
        for &y in &self.images {
            match seen.get_mut(y as usize) {
                Some(s) if !*s => *s = true,
                _ => return false,
            }
        }
        true
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(x, &y)| x as u32 == y)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarityMode {
    PositiveOnly,
    /// Each control independently positive or negative with probability 1/2.
    Mixed,
}

/// Distribution of randomly generated gates.
///
/// Each gate draws its control count uniformly from
/// `min_controls..=max_controls`, a uniform target, and uniformly chosen
/// distinct control lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatePolicy {
    pub min_controls: usize,
    pub max_controls: usize,
    pub polarity: PolarityMode,
}

impl GatePolicy {
    pub const DEFAULT_MAX_CONTROLS: usize = 4;

    /// Up to four positive controls, clamped to what `n` lines allow.
    pub fn default_for(n: usize) -> Self {
        GatePolicy {
            min_controls: 0,
            max_controls: Self::DEFAULT_MAX_CONTROLS.min(n.saturating_sub(1)),
            polarity: PolarityMode::PositiveOnly,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.min_controls > self.max_controls {
            return Err(Error::invalid(format!(
                "control range {}..={} is empty",
                self.min_controls, self.max_controls
            )));
        }
        if self.max_controls + 1 > n {
            return Err(Error::invalid(format!(
                "{} controls do not fit in {n} lines",
                self.max_controls
            )));
        }
        Ok(())
    }

    /// Same policy with the upper bound clamped to `n - 1` lines.
    pub fn clamped_to(&self, n: usize) -> Self {
        let max_controls = self.max_controls.min(n.saturating_sub(1));
        GatePolicy {
            min_controls: self.min_controls.min(max_controls),
            max_controls,
            polarity: self.polarity,
        }
    }

    pub fn random_gate(&self, n: usize, stream: &mut RngStream) -> Gate {
        let count = stream.between(self.min_controls, self.max_controls);
        let target = stream.below(n);
        let care = rand::seq::index::sample(stream, n - 1, count)
            .into_iter()
            .map(|i| if i >= target { i + 1 } else { i })
            .fold(0u64, |m, line| m | 1 << line);
        // Polarities are drawn in ascending line order.
        let want = match self.polarity {
            PolarityMode::PositiveOnly => care,
            PolarityMode::Mixed => {
                let mut want = 0;
                let mut rest = care;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    if stream.random_bool(0.5) {
                        want |= bit;
                    }
                    rest &= rest - 1;
                }
                want
            }
        };
        Gate {
            care,
            want,
            flip: 1 << target,
        }
    }
}

/// Draws `g` gates on `n` lines from `policy`.
pub fn random_circuit(
    n: usize,
    g: usize,
    stream: &mut RngStream,
    policy: &GatePolicy,
) -> Result<Circuit> {
    check_width(n)?;
    policy.validate(n)?;
    let gates = (0..g).map(|_| policy.random_gate(n, stream)).collect();
    Ok(Circuit { width: n, gates })
}

/// Gate count used when none is given: `10 n^2`.
pub fn default_gate_count(n: usize) -> usize {
    10 * n * n
}
