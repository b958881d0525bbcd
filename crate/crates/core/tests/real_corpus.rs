//! The `.real` corpus under `tests/data`: every valid file parses and
//! normalizes stably, every invalid file fails on the line and with the
//! error its `# expect:` header names.

use std::fs;
use std::path::{Path, PathBuf};

use revdetect::circuit::PermTable;
use revdetect::realfmt::{parse_circuit, parse_real, write_real};

fn files(dir: &str, ext: &str) -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(dir);
    let mut out: Vec<PathBuf> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    out
}

#[test]
fn invalid_files_fail_where_expected() {
    let all = files("invalid", "real");
    assert!(all.len() >= 20);
    for path in all {
        let text = fs::read_to_string(&path).unwrap();
        let header = text.lines().next().unwrap();
        let spec: Vec<&str> = header
            .strip_prefix("# expect: line ")
            .expect("expect header")
            .split(' ')
            .collect();
        let (line, kind): (usize, &str) = (spec[0].parse().unwrap(), spec[1]);
        let err = parse_real(&text).expect_err(&path.display().to_string());
        assert_eq!(err.line, line, "{}: {err}", path.display());
        let actual = format!("{:?}", err.kind);
        assert!(
            actual.starts_with(kind),
            "{}: expected {kind}, got {actual}",
            path.display()
        );
    }
}

#[test]
fn valid_files_normalize_stably() {
    let all = files("valid", "real");
    assert!(all.len() >= 5);
    for path in all {
        let text = fs::read_to_string(&path).unwrap();
        let doc = parse_real(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let canonical = doc.to_text();
        let again = parse_real(&canonical).unwrap();
        assert_eq!(again, doc, "{}", path.display());
        assert_eq!(again.to_text(), canonical);

        let circuit = doc.to_circuit().unwrap();
        assert_eq!(parse_circuit(&write_real(&circuit)).unwrap(), circuit);

        let expected = path.with_extension("expected");
        if expected.exists() {
            assert_eq!(
                canonical,
                fs::read_to_string(expected).unwrap(),
                "{}",
                path.display()
            );
        }
    }
}

#[test]
fn toffoli_file_computes_and_into_third_line() {
    let c = parse_circuit(
        &fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/valid/toffoli3.real"),
        )
        .unwrap(),
    )
    .unwrap();
    // a is bit 0, b bit 1, c bit 2.
    let expected = PermTable::from_images(3, vec![0, 1, 2, 7, 4, 5, 6, 3]).unwrap();
    assert_eq!(c.permutation_table().unwrap(), expected);
}

#[test]
fn mixed_polarity_semantics() {
    let text = fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/valid/mixed_polarity.real"),
    )
    .unwrap();
    let c = parse_circuit(&text).unwrap();
    // Hand-traced: 0000 -> t1 x1 -> 0001 -> t2 -x1 x2 (x1=1, no) -> t3 x1 -x2 x3 fires -> 0101
    // -> t4 -x3 x2 -x1 x4 (x1=1, no) -> t2 x4 x1 (x4=0, no).
    assert_eq!(c.simulate_bits(0b0000), 0b0101);
    // 0001 -> 0000 -> t2 fires -> 0010 -> t3 (x1=0, no) -> t4 -x3 x2 -x1: fires -> 1010
    // -> t2 x4 x1 fires -> 1011.
    assert_eq!(c.simulate_bits(0b0001), 0b1011);
}
