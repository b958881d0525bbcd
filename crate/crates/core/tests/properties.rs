//! Invariants of the circuit model, error model and file format, checked
//! against brute-force oracles that do not reuse the library's fast paths.

use std::collections::BTreeSet;

use proptest::prelude::*;
use revdetect::circuit::{random_circuit, Circuit, Gate, GatePolicy, Polarity, PolarityMode};
use revdetect::faults::{
    inject, splice, support, worst_case_error, ErrorKind, ErrorSpec, RandomErrorPolicy, Spliced,
};
use revdetect::oracle::{count_fixed_points, exact_detection_probability};
use revdetect::realfmt::{parse_circuit, parse_real, write_real};
use revdetect::rng::RngStream;
use revdetect::stimuli::failure_probability_bounds;
use revdetect::BitString;

/// Reference simulator over a vector of booleans.
fn reference_simulate(c: &Circuit, x: u64) -> u64 {
    let mut lines: Vec<bool> = (0..c.width()).map(|i| x >> i & 1 == 1).collect();
    for g in c.gates() {
        let fire = g.controls().all(|ctl| match ctl.polarity {
            Polarity::Positive => lines[ctl.line],
            Polarity::Negative => !lines[ctl.line],
        });
        if fire {
            lines[g.target()] = !lines[g.target()];
        }
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, &b)| (b as u64) << i)
        .sum()
}

fn mixed(n: usize) -> GatePolicy {
    GatePolicy {
        min_controls: 0,
        max_controls: (n - 1).min(5),
        polarity: PolarityMode::Mixed,
    }
}

fn circuit(n: usize, g: usize, seed: u64) -> Circuit {
    random_circuit(n, g, &mut RngStream::derive(seed, 0), &mixed(n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulate_matches_reference(n in 1usize..=12, g in 0usize..60, seed: u64, x: u64) {
        let c = circuit(n, g, seed);
        let x = x & ((1 << n) - 1);
        let out = c.simulate(BitString::new(n, x).unwrap()).unwrap();
        prop_assert_eq!(out.bits(), reference_simulate(&c, x));
    }

    #[test]
    fn simulation_is_a_bijection(n in 1usize..=12, g in 0usize..80, seed: u64) {
        let c = circuit(n, g, seed);
        let mut seen = vec![false; 1 << n];
        for x in 0..1u64 << n {
            let y = c.simulate_bits(x) as usize;
            prop_assert!(!seen[y]);
            seen[y] = true;
        }
        // Every output value appears exactly once: the uniform distribution
        // is invariant under the circuit.
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn inverse_undoes_circuit(seed: u64, x in 0u64..4096) {
        let c = circuit(12, 100, seed);
        let y = c.simulate(BitString::new(12, x).unwrap()).unwrap();
        prop_assert_eq!(c.invert().simulate(y).unwrap().bits(), x);
        prop_assert_eq!(c.invert().invert(), c);
    }

    #[test]
    fn composition_preserves_equivalence(n in 1usize..=10, s1: u64, s2: u64, s3: u64) {
        let r1 = circuit(n, 30, s1);
        let r2 = circuit(n, 30, s2);
        let r3 = circuit(n, 30, s3);
        let r3r1 = r1.then(&r3).unwrap();
        let r3r2 = r2.then(&r3).unwrap();
        for x in 0..1u64 << n {
            let before = r1.simulate_bits(x) == r2.simulate_bits(x);
            let after = r3r1.simulate_bits(x) == r3r2.simulate_bits(x);
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn non_identity_has_at_most_all_but_two_fixed_points(n in 1usize..=10, g in 1usize..40, seed: u64) {
        let table = circuit(n, g, seed).permutation_table().unwrap();
        let fixed = count_fixed_points(&table);
        prop_assert!(fixed == 1 << n || fixed <= (1 << n) - 2);
    }

    #[test]
    fn gates_are_involutions(n in 1usize..=12, seed: u64) {
        let g = mixed(n).random_gate(n, &mut RngStream::derive(seed, 1));
        for x in 0..1u64 << n {
            prop_assert_eq!(g.apply_bits(g.apply_bits(x)), x);
        }
    }

    #[test]
    fn real_round_trip(n in 1usize..=16, g in 0usize..50, seed: u64) {
        let c = circuit(n, g, seed);
        let text = write_real(&c);
        let back = parse_circuit(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(write_real(&back), text);
    }

    #[test]
    fn real_parser_never_panics(text in "\\PC*") {
        let _ = parse_real(&text);
    }

    #[test]
    fn real_parser_survives_near_miss_documents(
        body in prop::collection::vec("(t[0-4]|f2|\\.end|\\.begin)( -?[abcz]){0,4}", 0..6)
    ) {
        let text = format!(".numvars 3\n.variables a b c\n.begin\n{}\n.end\n", body.join("\n"));
        if let Err(e) = parse_real(&text) {
            prop_assert!(e.line >= 1 && e.line <= text.lines().count());
        }
    }

    #[test]
    fn worst_case_errors_move_two_patterns_per_context(n in 1usize..=12, k_off in 0usize..12, start_off in 0usize..12) {
        let k = 1 + k_off % n;
        let start = start_off % (n - k + 1);
        let e = worst_case_error(n, k, start).unwrap();
        prop_assert_eq!(support(&e, (start, k)).unwrap().len(), k);
        let moved = (0..1u64 << n).filter(|&x| e.simulate_bits(x) != x).count();
        prop_assert_eq!(moved, 2usize << (n - k));
    }

    #[test]
    fn single_error_decomposition_is_exact(n in 2usize..=10, g in 0usize..40, seed: u64, pos_seed: usize, k_off: usize) {
        let ideal = circuit(n, g, seed);
        let k = 1 + k_off % n;
        let position = pos_seed % (g + 1);
        let spec = ErrorSpec {
            k,
            window_start: 0,
            kind: ErrorKind::Random(RandomErrorPolicy::default()),
        };
        let (corrupted, record) = inject(&ideal, &[(position, spec)], &mut RngStream::derive(seed, 2)).unwrap();
        prop_assert_eq!(record.strip(&corrupted).unwrap(), ideal.clone());
        let before = Circuit::new(n, ideal.gates()[..position].to_vec()).unwrap();
        let after = Circuit::new(n, ideal.gates()[position..].to_vec()).unwrap();
        let e = &record.injections[0].error;
        for x in 0..1u64 << n {
            let expected = after.simulate_bits(e.simulate_bits(before.simulate_bits(x)));
            prop_assert_eq!(corrupted.simulate_bits(x), expected);
        }
    }

    #[test]
    fn spliced_view_matches_materialized_circuit(
        n in 1usize..=12,
        g in 0usize..60,
        seed: u64,
        l in 1usize..6,
        x: u64,
    ) {
        let ideal = circuit(n, g, seed);
        let mut rng = RngStream::derive(seed, 1);
        let mut errors: Vec<(usize, Circuit)> = (0..l)
            .map(|_| {
                let len = rng.between(0, 4);
                (rng.between(0, g), random_circuit(n, len, &mut rng, &mixed(n)).unwrap())
            })
            .collect();
        errors.sort_by_key(|(p, _)| *p);
        let refs: Vec<(usize, &Circuit)> = errors.iter().map(|(p, e)| (*p, e)).collect();
        let view = Spliced::new(&ideal, &refs).unwrap();
        let full = splice(&ideal, &refs).unwrap();
        prop_assert_eq!(full.len(), g + errors.iter().map(|(_, e)| e.len()).sum::<usize>());
        let x = x & ((1 << n) - 1);
        prop_assert_eq!(view.simulate_bits(x), reference_simulate(&full, x));
        prop_assert_eq!(view.differs_from_ideal(x), ideal.simulate_bits(x) != full.simulate_bits(x));
    }

    #[test]
    fn failure_bounds_are_monotone(k in 1u32..12, trials in 0u64..500) {
        let here = failure_probability_bounds(k, trials).unwrap();
        let more_trials = failure_probability_bounds(k, trials + 1).unwrap();
        let bigger_k = failure_probability_bounds(k + 1, trials).unwrap();
        prop_assert!(here.exact_worst_case <= here.exp_bound);
        prop_assert!(more_trials.exact_worst_case <= here.exact_worst_case);
        prop_assert!(more_trials.exp_bound <= here.exp_bound);
        prop_assert!(bigger_k.exact_worst_case >= here.exact_worst_case);
        prop_assert!(bigger_k.exp_bound >= here.exp_bound);
    }
}

/// Support by subset search: the largest set `T` of window lines such that
/// the error leaves `T` untouched and its action on the rest ignores `T`.
fn support_by_factoring(e: &Circuit, start: usize, k: usize) -> BTreeSet<usize> {
    let patterns = 1u64 << k;
    let act = |p: u64| e.simulate_bits(p << start) >> start;
    let mut best = 0u64;
    for t in 0..patterns {
        if t.count_ones() <= best.count_ones() {
            continue;
        }
        let factors = (0..patterns).all(|p| {
            let y = act(p);
            y & t == p & t && (y & !t) == (act(p & !t) & !t)
        });
        if factors {
            best = t;
        }
    }
    (0..k)
        .filter(|j| best >> j & 1 == 0)
        .map(|j| j + start)
        .collect()
}

#[test]
fn support_agrees_with_factoring_oracle() {
    let mut s = RngStream::derive(77, 0);
    for trial in 0..400 {
        let k = 1 + trial % 5;
        let start = trial % 3;
        let local = random_circuit(k, 1 + trial % 7, &mut s, &mixed(k.max(1))).unwrap();
        let gates: Vec<Gate> = local
            .gates()
            .iter()
            .map(|g| g.shifted(start).unwrap())
            .collect();
        let e = Circuit::new(8, gates).unwrap();
        assert_eq!(
            support(&e, (start, k)).unwrap(),
            support_by_factoring(&e, start, k),
            "trial {trial}"
        );
    }
}

#[test]
fn inverse_composition_is_identity_table() {
    let c = random_circuit(
        8,
        50,
        &mut RngStream::derive(8, 8),
        &GatePolicy::default_for(8),
    )
    .unwrap();
    let table = c.then(&c.invert()).unwrap().permutation_table().unwrap();
    assert!(table
        .images()
        .iter()
        .enumerate()
        .all(|(x, &y)| x as u32 == y));
}

#[test]
fn random_tables_are_permutations() {
    for seed in 0..5 {
        let c = random_circuit(
            10,
            300,
            &mut RngStream::derive(seed, 0),
            &GatePolicy::default_for(10),
        )
        .unwrap();
        let mut images = c.permutation_table().unwrap().images().to_vec();
        images.sort_unstable();
        assert!(images.iter().enumerate().all(|(i, &y)| i as u32 == y));
    }
    let c = random_circuit(
        8,
        200,
        &mut RngStream::derive(1, 0),
        &GatePolicy::default_for(8),
    )
    .unwrap();
    assert!(c.permutation_table().unwrap().is_permutation());
}

#[test]
fn two_flip_identity_at_four_lines() {
    // NOT_0 ∘ C3NOT ∘ NOT_0 == C2NOT(lines 1,2 -> 3) ∘ C3NOT on every input.
    let big = Gate::mct(&[0, 1, 2], 3).unwrap();
    let lhs = Circuit::new(4, vec![Gate::not(0).unwrap(), big, Gate::not(0).unwrap()]).unwrap();
    let rhs = Circuit::new(4, vec![big, Gate::mct(&[1, 2], 3).unwrap()]).unwrap();
    for x in 0..16 {
        assert_eq!(reference_simulate(&lhs, x), reference_simulate(&rhs, x));
    }
}

#[test]
fn ccnot_error_in_random_circuit_has_probability_one_quarter() {
    let ideal = random_circuit(
        8,
        120,
        &mut RngStream::derive(31, 0),
        &GatePolicy::default_for(8),
    )
    .unwrap();
    let spec = ErrorSpec {
        k: 3,
        window_start: 2,
        kind: ErrorKind::WorstCase,
    };
    let (corrupted, _) = inject(&ideal, &[(57, spec)], &mut RngStream::derive(0, 0)).unwrap();
    let p = exact_detection_probability(&ideal, &corrupted).unwrap();
    assert_eq!((p.numerator(), p.denominator()), (64, 256));
}

#[test]
fn not_error_anywhere_is_always_detected() {
    let ideal = random_circuit(
        8,
        100,
        &mut RngStream::derive(5, 0),
        &GatePolicy::default_for(8),
    )
    .unwrap();
    for pos in [0, 13, 50, 100] {
        let bad = Circuit::new(
            8,
            ideal.gates()[..pos]
                .iter()
                .cloned()
                .chain([Gate::new(pos % 8, vec![]).unwrap()])
                .chain(ideal.gates()[pos..].iter().cloned())
                .collect(),
        )
        .unwrap();
        let p = exact_detection_probability(&ideal, &bad).unwrap();
        assert_eq!((p.numerator(), p.denominator()), (256, 256));
    }
}
