#![no_main]

use libfuzzer_sys::fuzz_target;
use revdetect::TrialOutcome;

// Accepted outcomes are self-consistent and survive a round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(outcome) = serde_json::from_str::<TrialOutcome>(text) {
        assert!(outcome.trials_used <= outcome.max_trials);
        assert_eq!(outcome.detected(), outcome.witness.is_some());
        let json = serde_json::to_string(&outcome).unwrap();
        assert_eq!(
            serde_json::from_str::<TrialOutcome>(&json).unwrap(),
            outcome
        );
    }
});
