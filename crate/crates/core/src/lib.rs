//! Simulation, fault injection and random-stimuli error detection for
//! reversible circuits built from multi-controlled NOT gates.
//!
//! A reversible circuit on `n` lines permutes the `2^n` input strings. A
//! single reversible error buried anywhere in such a circuit is exposed by
//! a uniformly random input with a probability that depends only on the
//! error, and is at least `2^-(k-1)` for an error touching `k` lines. This
//! crate provides the pieces to check that claim exactly on small circuits
//! ([`oracle`]) and statistically on large ones ([`campaign`]).

pub mod bits;
pub mod campaign;
pub mod circuit;
pub mod error;
pub mod faults;
pub mod oracle;
pub mod realfmt;
pub mod rng;
pub mod stimuli;

pub use bits::BitString;
pub use circuit::{Circuit, Control, Gate, GatePolicy, PermTable, Polarity, PolarityMode};
pub use error::{Error, Result};
pub use faults::{ErrorKind, ErrorSpec, InjectionRecord, RandomErrorPolicy};
pub use oracle::ExactProbability;
pub use rng::RngStream;
pub use stimuli::{ConfidenceSpec, TrialOutcome, TrialStatus};
