#![no_main]

use libfuzzer_sys::fuzz_target;
use revdetect::realfmt::parse_real;

// Any text either fails with a line number inside the input or parses to a
// document whose canonical text parses back to the same document.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    match parse_real(text) {
        Ok(doc) => {
            let canonical = doc.to_text();
            let again = parse_real(&canonical).expect("canonical text parses");
            assert_eq!(again, doc);
            assert_eq!(again.to_text(), canonical);
        }
        Err(e) => assert!(e.line >= 1 && e.line <= text.lines().count().max(1)),
    }
});
