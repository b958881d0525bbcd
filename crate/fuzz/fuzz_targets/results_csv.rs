#![no_main]

use libfuzzer_sys::fuzz_target;
use revdetect::campaign::{summarize, ResultsTable};

// Accepted CSV re-serializes to something that reads back to the same rows,
// and summarizing never panics.
fuzz_target!(|data: &[u8]| {
    if let Ok(table) = ResultsTable::from_csv(data) {
        let text = table.to_csv_string();
        assert_eq!(
            ResultsTable::from_csv(text.as_bytes()).unwrap().rows,
            table.rows
        );
        let _ = summarize(&table);
    }
});
