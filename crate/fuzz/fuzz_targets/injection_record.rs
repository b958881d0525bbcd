#![no_main]

use libfuzzer_sys::fuzz_target;
use revdetect::faults::InjectionRecord;

// Accepted records are internally consistent and survive a round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(record) = InjectionRecord::from_json(text) {
        record.validate().expect("from_json validates");
        assert_eq!(
            InjectionRecord::from_json(&record.to_json()).unwrap(),
            record
        );
    }
});
