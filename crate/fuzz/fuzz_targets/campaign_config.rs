#![no_main]

use libfuzzer_sys::fuzz_target;
use revdetect::campaign::CampaignConfig;

// Accepted configs are valid and survive a JSON round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = CampaignConfig::from_json(text) {
        config.validate().expect("from_json validates");
        let json = serde_json::to_string(&config).unwrap();
        assert_eq!(CampaignConfig::from_json(&json).unwrap(), config);
    }
});
