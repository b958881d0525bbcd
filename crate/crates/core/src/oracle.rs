//! Exhaustive ground truth for small circuits.

use std::fmt;

use serde::Serialize;

use crate::circuit::{check_table_width, Circuit, Gate, PermTable};
use crate::error::{Error, Result};

/// `numerator / 2^width`, kept as integers so results compare exactly.
#[derive(Debug, Clone, Copy, Eq)]
pub struct ExactProbability {
    numerator: u64,
    width: u32,
}

impl ExactProbability {
    pub fn new(numerator: u64, width: u32) -> Result<Self> {
        if width > 62 || numerator > 1u64 << width {
            return Err(Error::invalid(format!(
                "{numerator} / 2^{width} is not a probability"
            )));
        }
        Ok(ExactProbability { numerator, width })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        1u64 << self.width
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator() as f64
    }

    /// The fraction in lowest terms.
    pub fn reduced(&self) -> (u64, u64) {
        if self.numerator == 0 {
            return (0, 1);
        }
        let shift = self.numerator.trailing_zeros().min(self.width);
        (self.numerator >> shift, self.denominator() >> shift)
    }
}

/// Equality of the rational values, regardless of width.
impl PartialEq for ExactProbability {
    fn eq(&self, other: &Self) -> bool {
        (self.numerator as u128) << other.width == (other.numerator as u128) << self.width
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.numerator, self.denominator())
    }
}

impl Serialize for ExactProbability {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExactProbability", 3)?;
        st.serialize_field("numerator", &self.numerator)?;
        st.serialize_field("denominator", &self.denominator())?;
        st.serialize_field("probability", &self.to_f64())?;
        st.end()
    }
}

/// Fraction of all `2^n` inputs on which the two circuits disagree.
pub fn exact_detection_probability(
    golden: &Circuit,
    candidate: &Circuit,
) -> Result<ExactProbability> {
    if golden.width() != candidate.width() {
        return Err(Error::invalid(format!(
            "width mismatch: {} vs {}",
            golden.width(),
            candidate.width()
        )));
    }
    check_table_width(golden.width())?;
    let count = (0..1u64 << golden.width())
        .filter(|&x| golden.simulate_bits(x) != candidate.simulate_bits(x))
        .count() as u64;
    ExactProbability::new(count, golden.width() as u32)
}

/// Fraction of inputs an error circuit moves, i.e. its detection
/// probability against the identity.
pub fn exact_error_probability(error: &Circuit) -> Result<ExactProbability> {
    exact_detection_probability(&Circuit::empty(error.width())?, error)
}

pub fn count_fixed_points(table: &PermTable) -> usize {
    table.fixed_points()
}

/// Two bit flips around a control of a big Toffoli gate, which together
/// act like one near-maximal error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstCaseComposition {
    /// An (n-1)-controlled NOT: controls on lines `0..n-1`, target `n-1`.
    pub ideal: Circuit,
    /// The ideal gate sandwiched between two NOTs on line 0.
    pub corrupted: Circuit,
    /// An (n-2)-controlled NOT on lines `1..n`, satisfying
    /// `NOT_0 ∘ ideal ∘ NOT_0 = effective ∘ ideal`.
    pub effective_error: Circuit,
}

pub fn worst_case_composition(n: usize) -> Result<WorstCaseComposition> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 lines, got {n}")));
    }
    let controls: Vec<usize> = (0..n - 1).collect();
    let big = Gate::mct(&controls, n - 1)?;
    let flip = Gate::not(0)?;
    Ok(WorstCaseComposition {
        ideal: Circuit::new(n, vec![big])?,
        corrupted: Circuit::new(n, vec![flip, big, flip])?,
        effective_error: Circuit::new(n, vec![Gate::mct(&controls[1..], n - 1)?])?,
    })
}

/// A wire in the 8-input AND tree: layer 0 holds the inputs (8 wires),
/// layers 1 and 2 the AND outputs (4 and 2 wires), layer 3 the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wire {
    pub layer: usize,
    pub index: usize,
}

const LAYER_WIDTHS: [usize; 4] = [8, 4, 2, 1];

/// The flip used in the classic masking illustration: the output of the
/// second first-layer AND gate.
pub const MASKING_FLIP: Wire = Wire { layer: 1, index: 1 };

impl Wire {
    pub fn new(layer: usize, index: usize) -> Result<Self> {
        match LAYER_WIDTHS.get(layer) {
            Some(&w) if index < w => Ok(Wire { layer, index }),
            _ => Err(Error::invalid(format!("no wire {index} in layer {layer}"))),
        }
    }

    pub fn all() -> impl Iterator<Item = Wire> {
        LAYER_WIDTHS
            .iter()
            .enumerate()
            .flat_map(|(layer, &w)| (0..w).map(move |index| Wire { layer, index }))
    }
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layer {} wire {}", self.layer, self.index)
    }
}

fn and_cascade(x: u8, flip: Option<Wire>) -> bool {
    let mut wires: Vec<bool> = (0..8).map(|i| x >> i & 1 == 1).collect();
    let mut layer = 0;
    loop {
        if let Some(w) = flip.filter(|w| w.layer == layer) {
            wires[w.index] = !wires[w.index];
        }
        if wires.len() == 1 {
            return wires[0];
        }
        wires = wires.chunks(2).map(|p| p[0] && p[1]).collect();
        layer += 1;
    }
}

/// Counts the inputs of the irreversible AND tree `y = x_8 ... x_1` that
/// expose a negation on `flip`. Returns `(detecting, 256)`.
pub fn and_cascade_demo(flip: Option<Wire>) -> Result<(u32, u32)> {
    if let Some(w) = flip {
        Wire::new(w.layer, w.index)?;
    }
    let detecting = (0..=255u8)
        .filter(|&x| and_cascade(x, None) != and_cascade(x, flip))
        .count() as u32;
    Ok((detecting, 256))
}
