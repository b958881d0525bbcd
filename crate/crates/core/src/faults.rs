//! Error models and their injection into circuits.
//!
//! An error is itself a small reversible circuit confined to a window of
//! `k` neighbouring lines. Injecting errors at gate gaps `p_1 <= ... <= p_l`
//! splits the ideal circuit `R = R_l ∘ ... ∘ R_0` into segments and yields
//! the corrupted circuit `R_l ∘ E_l ∘ ... ∘ E_1 ∘ R_0`. The
//! [`InjectionRecord`] keeps enough to rebuild either side exactly.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits::width_mask;
use crate::circuit::{random_circuit, Circuit, Gate, GatePolicy};
use crate::error::{Error, Result};
use crate::realfmt::content_digest;
use crate::rng::RngStream;

/// Largest window `support` will enumerate (2^16 patterns).
pub const MAX_SUPPORT_WINDOW: usize = 16;

/// How random errors are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomErrorPolicy {
    /// Gates per candidate sequence; `None` means `3k`.
    #[serde(default)]
    pub sequence_length: Option<usize>,
    #[serde(default = "RandomErrorPolicy::default_max_attempts")]
    pub max_attempts: usize,
    /// Gate distribution inside the window; `None` means
    /// [`GatePolicy::default_for`] the window size. Clamped to `k - 1`
    /// controls.
    #[serde(default)]
    pub gate_policy: Option<GatePolicy>,
}

impl RandomErrorPolicy {
    pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

    fn default_max_attempts() -> usize {
        Self::DEFAULT_MAX_ATTEMPTS
    }

    pub fn sequence_length_for(&self, k: usize) -> usize {
        self.sequence_length.unwrap_or(3 * k)
    }

    fn gate_policy_for(&self, k: usize) -> GatePolicy {
        self.gate_policy
            .map(|p| p.clamped_to(k))
            .unwrap_or_else(|| GatePolicy::default_for(k))
    }
}

impl Default for RandomErrorPolicy {
    fn default() -> Self {
        RandomErrorPolicy {
            sequence_length: None,
            max_attempts: Self::DEFAULT_MAX_ATTEMPTS,
            gate_policy: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A (k-1)-fold controlled NOT on the window.
    WorstCase,
    Random(RandomErrorPolicy),
}

impl ErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorKind::WorstCase => "worst_case",
            ErrorKind::Random(_) => "random",
        }
    }
}

/// A size-`k` error on lines `window_start .. window_start + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorSpec {
    pub k: usize,
    pub window_start: usize,
    pub kind: ErrorKind,
}

impl ErrorSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        check_window(n, self.window_start, self.k)
    }

    /// Builds the error circuit, drawing from `stream` for random errors.
    pub fn realize(&self, n: usize, stream: &mut RngStream) -> Result<Circuit> {
        match &self.kind {
            ErrorKind::WorstCase => worst_case_error(n, self.k, self.window_start),
            ErrorKind::Random(policy) => random_error(n, self.k, self.window_start, stream, policy),
        }
    }
}

fn check_window(n: usize, start: usize, k: usize) -> Result<()> {
    if k == 0 || start.checked_add(k).is_none_or(|end| end > n) {
        return Err(Error::invalid(format!(
            "window of size {k} at line {start} does not fit in {n} lines"
        )));
    }
    Ok(())
}

/// The sharpest size-`k` error: positive controls on the lower `k - 1`
/// window lines, target on the top one.
pub fn worst_case_error(n: usize, k: usize, window_start: usize) -> Result<Circuit> {
    check_window(n, window_start, k)?;
    let controls: Vec<usize> = (window_start..window_start + k - 1).collect();
    let gate = Gate::mct(&controls, window_start + k - 1)?;
    Circuit::new(n, vec![gate])
}

/// Draws random window-confined gate sequences until one acts non-trivially
/// on every window line.
pub fn random_error(
    n: usize,
    k: usize,
    window_start: usize,
    stream: &mut RngStream,
    policy: &RandomErrorPolicy,
) -> Result<Circuit> {
    random_error_counted(n, k, window_start, stream, policy).map(|(c, _)| c)
}

/// [`random_error`] that also reports how many candidates were drawn.
pub fn random_error_counted(
    n: usize,
    k: usize,
    window_start: usize,
    stream: &mut RngStream,
    policy: &RandomErrorPolicy,
) -> Result<(Circuit, usize)> {
    check_window(n, window_start, k)?;
    check_support_window(k)?;
    let gate_policy = policy.gate_policy_for(k);
    let len = policy.sequence_length_for(k);
    for attempt in 1..=policy.max_attempts {
        let local = random_circuit(k, len, stream, &gate_policy)?;
        if local_support_size(&local) == k {
            let gates = local
                .gates()
                .iter()
                .map(|g| g.shifted(window_start))
                .collect::<Result<Vec<_>>>()?;
            return Ok((Circuit::new(n, gates)?, attempt));
        }
    }
    Err(Error::SamplingFailure {
        k,
        attempts: policy.max_attempts,
    })
}

fn check_support_window(k: usize) -> Result<()> {
    if k > MAX_SUPPORT_WINDOW {
        return Err(Error::CapacityExceeded {
            what: "error window",
            actual: k,
            limit: MAX_SUPPORT_WINDOW,
        });
    }
    Ok(())
}

/// Support of a circuit on lines `0..width` where `width <= 16`.
fn local_support_size(local: &Circuit) -> usize {
    support_mask(local, 0, local.width()).count_ones() as usize
}

/// Lines in `start..start + k` on which `error` acts non-trivially.
///
/// Line `l` is outside the support iff, for every window pattern `x`,
/// `error(x)` agrees with `x` on `l` and `error(x ^ e_l) == error(x) ^ e_l`.
fn support_mask(error: &Circuit, start: usize, k: usize) -> u64 {
    let images: Vec<u64> = (0..1u64 << k)
        .map(|p| error.simulate_bits(p << start) >> start)
        .collect();
    let mut mask = 0u64;
    for j in 0..k {
        let bit = 1u64 << j;
        let inert = images.iter().enumerate().all(|(p, &y)| {
            let p = p as u64;
            (y ^ p) & bit == 0 && images[(p ^ bit) as usize] == y ^ bit
        });
        if !inert {
            mask |= bit;
        }
    }
    mask << start
}

/// Minimal set of lines an error acts on, found by exhaustive enumeration
/// of the window. Every gate of `error` must lie inside the window.
pub fn support(error: &Circuit, window: (usize, usize)) -> Result<BTreeSet<usize>> {
    let (start, k) = window;
    check_window(error.width(), start, k)?;
    check_support_window(k)?;
    let window_mask = width_mask(k) << start;
    if let Some(g) = error
        .gates()
        .iter()
        .find(|g| g.lines_mask() & !window_mask != 0)
    {
        return Err(Error::invalid(format!(
            "gate `{g}` reaches outside window {start}..{}",
            start + k
        )));
    }
    let mask = support_mask(error, start, k);
    Ok((0..64).filter(|l| mask >> l & 1 == 1).collect())
}

/// Places `l` errors of size `k`: positions uniform over the `g + 1` gate
/// gaps, window starts uniform over `0..=n-k`, all independent.
pub fn random_injection_plan(
    g: usize,
    n: usize,
    l: usize,
    k: usize,
    kind: ErrorKind,
    stream: &mut RngStream,
) -> Result<Vec<(usize, ErrorSpec)>> {
    if l == 0 {
        return Err(Error::invalid("an injection plan needs at least one error"));
    }
    check_window(n, 0, k)?;
    Ok((0..l)
        .map(|_| {
            let position = stream.between(0, g);
            let window_start = stream.between(0, n - k);
            (
                position,
                ErrorSpec {
                    k,
                    window_start,
                    kind,
                },
            )
        })
        .collect())
}

/// Inserts each error's gates before ideal gate `position` (or at the end
/// when `position == len`). `errors` must be sorted by position.
pub fn splice(ideal: &Circuit, errors: &[(usize, &Circuit)]) -> Result<Circuit> {
    Ok(Spliced::new(ideal, errors)?.to_circuit())
}

/// An ideal circuit with errors spliced in, evaluated without copying the
/// ideal gates.
#[derive(Debug, Clone)]
pub struct Spliced<'a> {
    ideal: &'a Circuit,
    errors: Vec<(usize, &'a Circuit)>,
}

impl<'a> Spliced<'a> {
    /// `errors` must be sorted by position, each position at most
    /// `ideal.len()`, and every error as wide as `ideal`.
    pub fn new(ideal: &'a Circuit, errors: &[(usize, &'a Circuit)]) -> Result<Self> {
        let mut previous = 0;
        for &(pos, e) in errors {
            if e.width() != ideal.width() {
                return Err(Error::invalid(format!(
                    "error width {} does not match circuit width {}",
                    e.width(),
                    ideal.width()
                )));
            }
            if pos < previous || pos > ideal.len() {
                return Err(Error::invalid(format!(
                    "injection position {pos} is out of order or beyond {} gates",
                    ideal.len()
                )));
            }
            previous = pos;
        }
        Ok(Spliced {
            ideal,
            errors: errors.to_vec(),
        })
    }

    pub fn to_circuit(&self) -> Circuit {
        let extra: usize = self.errors.iter().map(|(_, e)| e.len()).sum();
        let mut gates = Vec::with_capacity(self.ideal.len() + extra);
        let mut at = 0;
        for &(pos, e) in &self.errors {
            gates.extend_from_slice(&self.ideal.gates()[at..pos]);
            gates.extend_from_slice(e.gates());
            at = pos;
        }
        gates.extend_from_slice(&self.ideal.gates()[at..]);
        Circuit::new(self.ideal.width(), gates).expect("widths checked on construction")
    }

    /// Output of the corrupted circuit.
    pub fn simulate_bits(&self, x: u64) -> u64 {
        let gates = self.ideal.gates();
        let mut at = 0;
        let mut y = x;
        for &(pos, e) in &self.errors {
            y = run(&gates[at..pos], y);
            y = e.simulate_bits(y);
            at = pos;
        }
        run(&gates[at..], y)
    }

    /// Whether the corrupted and ideal circuits disagree on `x`.
    ///
    /// Both circuits end in the same ideal gates after the last error, and
    /// those gates form a bijection, so it suffices to compare the two
    /// states right after the last error. Gates before the first error are
    /// shared and simulated once.
    pub fn differs_from_ideal(&self, x: u64) -> bool {
        let gates = self.ideal.gates();
        let (mut good, mut bad) = (x, x);
        let mut at = 0;
        for &(pos, e) in &self.errors {
            let segment = &gates[at..pos];
            if good == bad {
                good = run(segment, good);
                bad = good;
            } else {
                good = run(segment, good);
                bad = run(segment, bad);
            }
            bad = e.simulate_bits(bad);
            at = pos;
        }
        good != bad
    }
}

fn run(gates: &[Gate], x: u64) -> u64 {
    gates.iter().fold(x, |acc, g| g.apply_bits(acc))
}

/// Realizes every spec and splices the errors into `circuit`. Specs are
/// stably sorted by position first; random errors are drawn from `stream`
/// in that order.
pub fn inject(
    circuit: &Circuit,
    specs: &[(usize, ErrorSpec)],
    stream: &mut RngStream,
) -> Result<(Circuit, InjectionRecord)> {
    let mut sorted = specs.to_vec();
    sorted.sort_by_key(|(p, _)| *p);
    let mut injections = Vec::with_capacity(sorted.len());
    for (position, spec) in &sorted {
        if *position > circuit.len() {
            return Err(Error::invalid(format!(
                "injection position {position} is beyond {} gates",
                circuit.len()
            )));
        }
        spec.validate(circuit.width())?;
        injections.push(InjectedError {
            position: *position,
            window_start: spec.window_start,
            k: spec.k,
            kind: spec.kind.name().to_string(),
            error: spec.realize(circuit.width(), stream)?,
        });
    }
    let record = InjectionRecord {
        format: InjectionRecord::FORMAT.to_string(),
        source: SourceIdentity::of(circuit),
        injections,
    };
    let corrupted = record.splice_into(circuit)?;
    Ok((corrupted, record))
}

/// Identifies the ideal circuit an injection record belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceIdentity {
    pub width: usize,
    pub gate_count: usize,
    /// Hex SHA-256 of the canonical `.real` text.
    pub digest: String,
}

impl SourceIdentity {
    pub fn of(circuit: &Circuit) -> Self {
        SourceIdentity {
            width: circuit.width(),
            gate_count: circuit.len(),
            digest: content_digest(circuit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectedError {
    /// Gate gap, `0..=gate_count`.
    pub position: usize,
    pub window_start: usize,
    pub k: usize,
    /// `worst_case` or `random`.
    pub kind: String,
    /// The error as a full-width circuit.
    pub error: Circuit,
}

/// Bookkeeping for one injection: which errors went where, and into what.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectionRecord {
    pub format: String,
    pub source: SourceIdentity,
    pub injections: Vec<InjectedError>,
}

impl InjectionRecord {
    pub const FORMAT: &'static str = "revdetect.injection.v1";

    pub fn positions(&self) -> Vec<usize> {
        self.injections.iter().map(|i| i.position).collect()
    }

    pub fn windows(&self) -> Vec<(usize, usize)> {
        self.injections
            .iter()
            .map(|i| (i.window_start, i.k))
            .collect()
    }

    pub fn errors(&self) -> Vec<&Circuit> {
        self.injections.iter().map(|i| &i.error).collect()
    }

    /// Checks the record's internal invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::format("injection record", msg));
        if self.format != Self::FORMAT {
            return bad(format!("unsupported format {:?}", self.format));
        }
        let mut last = 0;
        for (i, inj) in self.injections.iter().enumerate() {
            if inj.position < last {
                return bad(format!("injection {i}: positions must be non-decreasing"));
            }
            last = inj.position;
            if inj.position > self.source.gate_count {
                return bad(format!("injection {i}: position beyond gate count"));
            }
            if inj.error.width() != self.source.width {
                return bad(format!("injection {i}: error width differs from source"));
            }
            if inj.kind != "worst_case" && inj.kind != "random" {
                return bad(format!("injection {i}: unknown kind {:?}", inj.kind));
            }
            check_window(self.source.width, inj.window_start, inj.k)
                .or_else(|e| bad(format!("injection {i}: {e}")))?;
            let window = width_mask(inj.k) << inj.window_start;
            if inj
                .error
                .gates()
                .iter()
                .any(|g| g.lines_mask() & !window != 0)
            {
                return bad(format!("injection {i}: error reaches outside its window"));
            }
        }
        Ok(())
    }

    fn splice_into(&self, ideal: &Circuit) -> Result<Circuit> {
        let errors: Vec<(usize, &Circuit)> = self
            .injections
            .iter()
            .map(|i| (i.position, &i.error))
            .collect();
        splice(ideal, &errors)
    }

    /// Rebuilds the corrupted circuit from the ideal one.
    pub fn apply(&self, ideal: &Circuit) -> Result<Circuit> {
        self.validate()?;
        if SourceIdentity::of(ideal) != self.source {
            return Err(Error::invalid("circuit does not match the record's source"));
        }
        self.splice_into(ideal)
    }

    /// Removes the recorded error gates from a corrupted circuit, returning
    /// the ideal one.
    pub fn strip(&self, corrupted: &Circuit) -> Result<Circuit> {
        let mismatch = || Error::invalid("corrupted circuit does not match the record");
        let gates = corrupted.gates();
        let mut cursor = 0;
        let mut ideal = Vec::with_capacity(self.source.gate_count);
        let mut pending = self.injections.iter().peekable();
        for p in 0..=self.source.gate_count {
            while let Some(inj) = pending.next_if(|i| i.position == p) {
                let end = cursor + inj.error.len();
                if gates.get(cursor..end) != Some(inj.error.gates()) {
                    return Err(mismatch());
                }
                cursor = end;
            }
            if p < self.source.gate_count {
                ideal.push(*gates.get(cursor).ok_or_else(mismatch)?);
                cursor += 1;
            }
        }
        if cursor != gates.len() || pending.next().is_some() {
            return Err(mismatch());
        }
        Circuit::new(corrupted.width(), ideal)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: InjectionRecord =
            serde_json::from_str(text).map_err(|e| Error::format("injection record", e))?;
        record.validate()?;
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Control;

    fn window_set(lines: &[usize]) -> BTreeSet<usize> {
        lines.iter().copied().collect()
    }

    #[test]
    fn worst_case_shapes() {
        let not = worst_case_error(5, 1, 3).unwrap();
        assert_eq!(not.gates(), &[Gate::not(3).unwrap()]);
        let ccnot = worst_case_error(5, 3, 1).unwrap();
        assert_eq!(ccnot.gates(), &[Gate::toffoli(1, 2, 3).unwrap()]);
        assert!(worst_case_error(5, 3, 3).is_err());
        assert!(worst_case_error(5, 0, 0).is_err());
    }

    #[test]
    fn worst_case_k4_moves_two_of_sixteen_patterns() {
        let e = worst_case_error(6, 4, 0).unwrap();
        let moved = (0..16u64).filter(|&p| e.simulate_bits(p) != p).count();
        assert_eq!(moved, 2);
    }

    #[test]
    fn support_examples() {
        let not = Circuit::new(6, vec![Gate::not(3).unwrap()]).unwrap();
        assert_eq!(support(&not, (2, 3)).unwrap(), window_set(&[3]));
        let ccnot = Circuit::new(3, vec![Gate::toffoli(0, 1, 2).unwrap()]).unwrap();
        assert_eq!(support(&ccnot, (0, 3)).unwrap(), window_set(&[0, 1, 2]));
        let pair = Circuit::new(
            2,
            vec![Gate::cnot(1, 0).unwrap(), Gate::cnot(1, 0).unwrap()],
        )
        .unwrap();
        assert!(support(&pair, (0, 2)).unwrap().is_empty());
    }

    #[test]
    fn support_rejects_out_of_window_gates_and_big_windows() {
        let c = Circuit::new(4, vec![Gate::cnot(0, 3).unwrap()]).unwrap();
        assert!(support(&c, (1, 3)).is_err());
        let wide = Circuit::empty(20).unwrap();
        assert!(matches!(
            support(&wide, (0, 17)),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn swap_has_full_support() {
        // A SWAP fixes 00 and 11 but touches both lines.
        let swap = Circuit::new(
            2,
            vec![
                Gate::cnot(0, 1).unwrap(),
                Gate::cnot(1, 0).unwrap(),
                Gate::cnot(0, 1).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(support(&swap, (0, 2)).unwrap(), window_set(&[0, 1]));
    }

    #[test]
    fn control_only_line_is_in_support() {
        // CNOT(1 -> 0): line 1 never changes but influences line 0.
        let c = Circuit::new(2, vec![Gate::cnot(1, 0).unwrap()]).unwrap();
        assert_eq!(support(&c, (0, 2)).unwrap(), window_set(&[0, 1]));
    }

    #[test]
    fn random_k1_is_a_not() {
        let mut s = RngStream::derive(4, 4);
        for _ in 0..20 {
            let e = random_error(5, 1, 2, &mut s, &RandomErrorPolicy::default()).unwrap();
            for x in 0..32u64 {
                assert_eq!(e.simulate_bits(x), x ^ 0b100);
            }
        }
    }

    #[test]
    fn random_errors_have_full_support() {
        let mut s = RngStream::derive(8, 1);
        for _ in 0..1000 {
            let e = random_error(9, 5, 3, &mut s, &RandomErrorPolicy::default()).unwrap();
            assert_eq!(support(&e, (3, 5)).unwrap(), window_set(&[3, 4, 5, 6, 7]));
        }
    }

    #[test]
    fn identity_candidates_are_rejected() {
        // Two gates on two lines often cancel or miss a line; every accepted
        // sample must still have full support.
        let policy = RandomErrorPolicy {
            sequence_length: Some(2),
            ..Default::default()
        };
        let mut s = RngStream::derive(2, 2);
        let mut rejected = 0;
        for _ in 0..200 {
            let (e, attempts) = random_error_counted(4, 2, 1, &mut s, &policy).unwrap();
            rejected += attempts - 1;
            assert_eq!(support(&e, (1, 2)).unwrap().len(), 2);
        }
        assert!(rejected > 0);
    }

    #[test]
    fn exhausted_attempts_are_reported() {
        let policy = RandomErrorPolicy {
            sequence_length: Some(0),
            max_attempts: 7,
            gate_policy: None,
        };
        let mut s = RngStream::derive(0, 0);
        assert!(matches!(
            random_error(4, 2, 0, &mut s, &policy),
            Err(Error::SamplingFailure { k: 2, attempts: 7 })
        ));
    }

    #[test]
    fn plan_edge_cases() {
        let mut s = RngStream::derive(1, 1);
        let plan = random_injection_plan(0, 5, 1, 2, ErrorKind::WorstCase, &mut s).unwrap();
        assert_eq!(plan[0].0, 0);
        let plan = random_injection_plan(100, 4, 30, 4, ErrorKind::WorstCase, &mut s).unwrap();
        assert!(plan.iter().all(|(_, spec)| spec.window_start == 0));
        assert!(random_injection_plan(10, 4, 0, 2, ErrorKind::WorstCase, &mut s).is_err());
        assert!(random_injection_plan(10, 4, 1, 5, ErrorKind::WorstCase, &mut s).is_err());
        let make = || {
            let mut s = RngStream::derive(3, 3);
            random_injection_plan(50, 10, 6, 3, ErrorKind::WorstCase, &mut s).unwrap()
        };
        assert_eq!(make(), make());
    }

    fn sample_circuit() -> Circuit {
        Circuit::new(
            6,
            vec![
                Gate::cnot(0, 1).unwrap(),
                Gate::toffoli(1, 2, 5).unwrap(),
                Gate::new(3, vec![Control::negative(4)]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_plan_is_identity() {
        let c = sample_circuit();
        let (corrupted, record) = inject(&c, &[], &mut RngStream::derive(0, 0)).unwrap();
        assert_eq!(corrupted, c);
        assert!(record.injections.is_empty());
    }

    #[test]
    fn position_zero_puts_error_first() {
        let c = sample_circuit();
        let spec = ErrorSpec {
            k: 1,
            window_start: 4,
            kind: ErrorKind::WorstCase,
        };
        let (corrupted, _) = inject(&c, &[(0, spec)], &mut RngStream::derive(0, 0)).unwrap();
        assert_eq!(corrupted.gates()[0], Gate::not(4).unwrap());
        assert_eq!(&corrupted.gates()[1..], c.gates());
        let (at_end, _) = inject(&c, &[(3, spec)], &mut RngStream::derive(0, 0)).unwrap();
        assert_eq!(at_end.gates()[3], Gate::not(4).unwrap());
        assert!(inject(&c, &[(4, spec)], &mut RngStream::derive(0, 0)).is_err());
    }

    #[test]
    fn strip_restores_ideal_and_apply_rebuilds_corrupted() {
        let c = sample_circuit();
        let spec = ErrorSpec {
            k: 2,
            window_start: 2,
            kind: ErrorKind::WorstCase,
        };
        let random = ErrorSpec {
            kind: ErrorKind::Random(RandomErrorPolicy::default()),
            ..spec
        };
        let specs = [(2, spec), (1, random), (2, random)];
        let (corrupted, record) = inject(&c, &specs, &mut RngStream::derive(6, 0)).unwrap();
        assert_eq!(record.positions(), vec![1, 2, 2]);
        assert_eq!(record.strip(&corrupted).unwrap(), c);
        assert_eq!(record.apply(&c).unwrap(), corrupted);

        let parsed = InjectionRecord::from_json(&record.to_json()).unwrap();
        assert_eq!(parsed, record);
        assert!(record.apply(&c.invert()).is_err());
        assert!(record.strip(&c).is_err());
    }

    #[test]
    fn record_validation() {
        let c = sample_circuit();
        let spec = ErrorSpec {
            k: 2,
            window_start: 0,
            kind: ErrorKind::WorstCase,
        };
        let (_, record) =
            inject(&c, &[(1, spec), (3, spec)], &mut RngStream::derive(0, 0)).unwrap();
        let mut swapped = record.clone();
        swapped.injections.swap(0, 1);
        assert!(swapped.validate().is_err());
        let mut outside = record.clone();
        outside.injections[0].window_start = 3;
        assert!(outside.validate().is_err());
        let mut kind = record;
        kind.injections[0].kind = "bogus".into();
        assert!(kind.validate().is_err());
        assert!(InjectionRecord::from_json("{}").is_err());
    }
}
