#![no_main]

use libfuzzer_sys::fuzz_target;
use revdetect::realfmt::{parse_circuit, write_real};
use revdetect::{Circuit, Control, Gate};

// Builds a circuit from raw bytes (width, then per gate: target, control
// mask, polarity mask) and checks write -> parse is the identity.
fuzz_target!(|data: &[u8]| {
    let Some((&w, rest)) = data.split_first() else {
        return;
    };
    let width = (w as usize % 64) + 1;
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    let mut gates = Vec::new();
    for chunk in rest.chunks_exact(17) {
        let target = chunk[0] as usize % width;
        let care = u64::from_le_bytes(chunk[1..9].try_into().unwrap()) & mask & !(1 << target);
        let want = u64::from_le_bytes(chunk[9..17].try_into().unwrap());
        let controls = (0..width).filter(|l| care >> l & 1 == 1).map(|l| {
            if want >> l & 1 == 1 {
                Control::positive(l)
            } else {
                Control::negative(l)
            }
        });
        gates.push(Gate::new(target, controls).expect("valid by construction"));
    }
    let circuit = Circuit::new(width, gates).expect("gates fit");
    let text = write_real(&circuit);
    assert_eq!(parse_circuit(&text).expect("own output parses"), circuit);
});
