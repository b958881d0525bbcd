//! Random-stimuli equivalence checking and the closed-form trial-count
//! calculators that go with it.
//!
//! For a single size-`k` error every uniformly random input detects it with
//! probability at least `p = 2^-(k-1)`, independent of the surrounding
//! circuit, so the number of trials until detection is geometric with mean
//! at most `2^(k-1)`.

use serde::{Deserialize, Serialize};

use crate::bits::{check_width, width_mask, BitString};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::rng::{random_word, RngStream};

/// Cap on trials when the caller does not supply one.
pub const DEFAULT_TRIAL_CAP: u64 = 1 << 20;

/// `min(2^n, 2^20)`.
pub fn default_max_trials(n: usize) -> u64 {
    if n >= 20 {
        DEFAULT_TRIAL_CAP
    } else {
        1u64 << n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Detected,
    Exhausted,
}

/// Result of one equivalence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OutcomeRepr", into = "OutcomeRepr")]
pub struct TrialOutcome {
    pub status: TrialStatus,
    /// 1-based index of the detecting input, or `max_trials` if none did.
    pub trials_used: u64,
    pub max_trials: u64,
    pub witness: Option<BitString>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeRepr {
    status: TrialStatus,
    trials_used: u64,
    max_trials: u64,
    witness: Option<String>,
}

impl From<TrialOutcome> for OutcomeRepr {
    fn from(o: TrialOutcome) -> Self {
        OutcomeRepr {
            status: o.status,
            trials_used: o.trials_used,
            max_trials: o.max_trials,
            witness: o.witness.map(|w| w.to_binary_string()),
        }
    }
}

impl TryFrom<OutcomeRepr> for TrialOutcome {
    type Error = Error;

    fn try_from(r: OutcomeRepr) -> Result<Self> {
        let witness = r.witness.as_deref().map(str::parse).transpose()?;
        let consistent = match r.status {
            TrialStatus::Detected => {
                witness.is_some() && (1..=r.max_trials).contains(&r.trials_used)
            }
            TrialStatus::Exhausted => witness.is_none() && r.trials_used == r.max_trials,
        };
        if !consistent || r.max_trials == 0 {
            return Err(Error::format("trial outcome", "inconsistent fields"));
        }
        Ok(TrialOutcome {
            status: r.status,
            trials_used: r.trials_used,
            max_trials: r.max_trials,
            witness,
        })
    }
}

impl TrialOutcome {
    pub fn detected(&self) -> bool {
        self.status == TrialStatus::Detected
    }
}

/// Simulates both circuits on independent uniform inputs until their
/// outputs differ or `max_trials` inputs have been tried.
pub fn check_equivalence(
    golden: &Circuit,
    candidate: &Circuit,
    stream: &mut RngStream,
    max_trials: u64,
) -> Result<TrialOutcome> {
    if golden.width() != candidate.width() {
        return Err(Error::invalid(format!(
            "width mismatch: {} vs {}",
            golden.width(),
            candidate.width()
        )));
    }
    check_with(golden.width(), stream, max_trials, |x| {
        golden.simulate_bits(x) != candidate.simulate_bits(x)
    })
}

/// The trial loop behind [`check_equivalence`]: draws uniform `width`-bit
/// inputs until `differs` reports a mismatch or the budget runs out. Draws
/// exactly the same inputs as [`check_equivalence`] for the same stream.
pub fn check_with(
    width: usize,
    stream: &mut RngStream,
    max_trials: u64,
    mut differs: impl FnMut(u64) -> bool,
) -> Result<TrialOutcome> {
    check_width(width)?;
    if max_trials == 0 {
        return Err(Error::invalid("max_trials must be at least 1"));
    }
    let mask = width_mask(width);
    for trial in 1..=max_trials {
        let x = random_word(mask, stream);
        if differs(x) {
            return Ok(TrialOutcome {
                status: TrialStatus::Detected,
                trials_used: trial,
                max_trials,
                witness: Some(BitString::new(width, x)?),
            });
        }
    }
    Ok(TrialOutcome {
        status: TrialStatus::Exhausted,
        trials_used: max_trials,
        max_trials,
        witness: None,
    })
}

/// Assumed error size and tolerated failure probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceSpec {
    k: u32,
    delta: f64,
}

impl ConfidenceSpec {
    pub fn new(k: u32, delta: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("error size k must be at least 1"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(ConfidenceSpec { k, delta })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `2^(k-1)` as a float.
fn inverse_single_probability(k: u32) -> f64 {
    2f64.powi(k as i32 - 1)
}

/// `ceil(ln(1/delta) * 2^(k-1))`: enough random inputs to expose a single
/// size-`k` error with probability at least `1 - delta`.
pub fn required_inputs(spec: &ConfidenceSpec) -> u64 {
    ((1.0 / spec.delta).ln() * inverse_single_probability(spec.k)).ceil() as u64
}

/// Probability that `trials` inputs all miss a single size-`k` error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailureBounds {
    /// `(1 - 2^-(k-1))^N`, attained by worst-case errors.
    pub exact_worst_case: f64,
    /// `exp(-N / 2^(k-1))`.
    pub exp_bound: f64,
}

pub fn failure_probability_bounds(k: u32, trials: u64) -> Result<FailureBounds> {
    if k == 0 {
        return Err(Error::invalid("error size k must be at least 1"));
    }
    let scale = inverse_single_probability(k);
    Ok(FailureBounds {
        exact_worst_case: (1.0 - 1.0 / scale).powf(trials as f64),
        exp_bound: (-(trials as f64) / scale).exp(),
    })
}

/// Expected trials for `l` independent, commuting worst-case errors of
/// size `k`: `1 / (1 - (1 - 2^-(k-1))^l)`.
pub fn best_case_expected_trials(k: u32, l: u32) -> Result<f64> {
    if k == 0 || l == 0 {
        return Err(Error::invalid("k and l must be at least 1"));
    }
    let miss = 1.0 - 1.0 / inverse_single_probability(k);
    Ok(1.0 / (1.0 - miss.powi(l as i32)))
}

/// Expected trials for the two-bit-flip masking construction on `n` lines,
/// whose detection probability is `4 / 2^n`: `2^(n-2)`.
pub fn worst_case_expected_trials(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 lines, got {n}")));
    }
    Ok(2f64.powi(n as i32 - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{random_circuit, Gate, GatePolicy};

    #[test]
    fn identical_circuits_exhaust() {
        let mut s = RngStream::derive(1, 0);
        let c = random_circuit(10, 100, &mut s, &GatePolicy::default_for(10)).unwrap();
        let out = check_equivalence(&c, &c.clone(), &mut s, 500).unwrap();
        assert_eq!(out.status, TrialStatus::Exhausted);
        assert_eq!(out.trials_used, 500);
        assert!(out.witness.is_none());
    }

    #[test]
    fn witness_really_distinguishes() {
        let mut s = RngStream::derive(1, 1);
        let golden = Circuit::empty(6).unwrap();
        let candidate = Circuit::new(6, vec![Gate::toffoli(0, 1, 2).unwrap()]).unwrap();
        let out = check_equivalence(&golden, &candidate, &mut s, 1000).unwrap();
        let w = out.witness.unwrap();
        assert_ne!(golden.simulate(w).unwrap(), candidate.simulate(w).unwrap());
    }

    #[test]
    fn check_rejects_bad_arguments() {
        let mut s = RngStream::derive(0, 0);
        let a = Circuit::empty(3).unwrap();
        let b = Circuit::empty(4).unwrap();
        assert!(check_equivalence(&a, &b, &mut s, 1).is_err());
        assert!(check_equivalence(&a, &a, &mut s, 0).is_err());
    }

    #[test]
    fn default_cap() {
        assert_eq!(default_max_trials(3), 8);
        assert_eq!(default_max_trials(20), 1 << 20);
        assert_eq!(default_max_trials(40), 1 << 20);
    }

    #[test]
    fn required_inputs_examples() {
        let r = |k, d| required_inputs(&ConfidenceSpec::new(k, d).unwrap());
        assert_eq!(r(3, 0.05), 12);
        assert_eq!(r(1, 0.5), 1);
        assert_eq!(r(5, 0.01), 74);
        assert_eq!(r(3, 0.1), 10);
        assert!(ConfidenceSpec::new(3, 0.0).is_err());
        assert!(ConfidenceSpec::new(3, 1.0).is_err());
        assert!(ConfidenceSpec::new(3, f64::NAN).is_err());
        assert!(ConfidenceSpec::new(0, 0.5).is_err());
    }

    #[test]
    fn failure_bounds_examples() {
        let b = |k, n| failure_probability_bounds(k, n).unwrap();
        assert_eq!(b(1, 1).exact_worst_case, 0.0);
        assert_eq!(b(1, 1000).exact_worst_case, 0.0);
        assert_eq!(b(1, 0).exact_worst_case, 1.0);
        assert_eq!(b(2, 1).exact_worst_case, 0.5);
        assert!((b(5, 16).exact_worst_case - 0.356_074).abs() < 1e-6);
        assert!((b(5, 16).exp_bound - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        for k in 1..=8 {
            assert_eq!(
                best_case_expected_trials(k, 1).unwrap(),
                2f64.powi(k as i32 - 1)
            );
        }
        for l in 1..=10 {
            assert_eq!(best_case_expected_trials(1, l).unwrap(), 1.0);
        }
        assert!((best_case_expected_trials(5, 4).unwrap() - 4.395_144_5).abs() < 1e-6);
        assert_eq!(worst_case_expected_trials(2).unwrap(), 1.0);
        assert_eq!(worst_case_expected_trials(6).unwrap(), 16.0);
        assert_eq!(worst_case_expected_trials(20).unwrap(), 262_144.0);
        assert!(worst_case_expected_trials(1).is_err());
    }

    #[test]
    fn outcome_json_shape() {
        let o = TrialOutcome {
            status: TrialStatus::Detected,
            trials_used: 3,
            max_trials: 16,
            witness: Some(BitString::new(4, 0b0101).unwrap()),
        };
        let j = serde_json::to_string(&o).unwrap();
        assert_eq!(
            j,
            r#"{"status":"detected","trials_used":3,"max_trials":16,"witness":"0101"}"#
        );
        assert_eq!(serde_json::from_str::<TrialOutcome>(&j).unwrap(), o);
        let bad = r#"{"status":"exhausted","trials_used":3,"max_trials":16,"witness":null}"#;
        assert!(serde_json::from_str::<TrialOutcome>(bad).is_err());
    }
}
