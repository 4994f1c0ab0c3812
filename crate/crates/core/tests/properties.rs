use proptest::collection::vec;
use proptest::prelude::*;
use surface_mcmc::code_geometry::apply_stabilizer;
use surface_mcmc::harness::{read_results_csv, wilson_interval, write_results_csv, ResultRow};
use surface_mcmc::matching::{match_syndrome, min_weight_perfect_matching_edges};
use surface_mcmc::mcmc::parallel_sweep_schedule;
use surface_mcmc::{CodeLayout, EquivalenceClass, Pauli, PauliFrame};

fn frame_of(codes: &[u8]) -> PauliFrame {
    let ps: Vec<Pauli> = codes.iter().map(|&c| Pauli::from_bits(c & 1 == 1, c & 2 == 2)).collect();
    PauliFrame::from_paulis(&ps)
}

/// A distance with two random frames on its lattice.
fn lattice_and_frames(max_l: usize) -> impl Strategy<Value = (usize, Vec<u8>, Vec<u8>)> {
    (2..=max_l).prop_flat_map(|l| {
        let n = l * l + (l - 1) * (l - 1);
        (Just(l), vec(0u8..4, n), vec(0u8..4, n))
    })
}

/// Sparse frames, closer to real noise than uniform ones.
fn sparse_frame(max_l: usize) -> impl Strategy<Value = (usize, Vec<u8>)> {
    (3..=max_l).prop_flat_map(|l| {
        let n = l * l + (l - 1) * (l - 1);
        (Just(l), vec(prop_oneof![6 => Just(0u8), 1 => 1u8..4], n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn syndrome_and_class_are_linear((l, a, b) in lattice_and_frames(7)) {
        let layout = CodeLayout::new(l).unwrap();
        let (fa, fb) = (frame_of(&a), frame_of(&b));
        let ab = &fa * &fb;
        prop_assert_eq!(layout.class_of(&ab), layout.class_of(&fa).xor(layout.class_of(&fb)));
        let (sa, sb, sab) = (layout.syndrome_of(&fa), layout.syndrome_of(&fb), layout.syndrome_of(&ab));
        let sym = |x: &[u32], y: &[u32]| {
            let mut v: Vec<u32> = x.iter().filter(|i| !y.contains(i)).chain(y.iter().filter(|i| !x.contains(i))).copied().collect();
            v.sort_unstable();
            v
        };
        prop_assert_eq!(sab.p_anyons, sym(&sa.p_anyons, &sb.p_anyons));
        prop_assert_eq!(sab.s_anyons, sym(&sa.s_anyons, &sb.s_anyons));
    }

    #[test]
    fn stabilizers_keep_syndrome_and_class((l, a, _b) in lattice_and_frames(7), pick in any::<prop::sample::Index>()) {
        let layout = CodeLayout::new(l).unwrap();
        let f = frame_of(&a);
        let mut g = f.clone();
        apply_stabilizer(&mut g, layout.stabilizer(pick.index(layout.n_stabilizers())));
        prop_assert_eq!(layout.syndrome_of(&g), layout.syndrome_of(&f));
        prop_assert_eq!(layout.class_of(&g), layout.class_of(&f));
        prop_assert_eq!(&(&g * &g), &PauliFrame::identity(layout.n_qubits()));
    }

    #[test]
    fn matching_chains_explain_the_syndrome((l, a) in sparse_frame(7)) {
        let layout = CodeLayout::new(l).unwrap();
        let f = frame_of(&a);
        let syn = layout.syndrome_of(&f);
        let m = match_syndrome(&layout, &syn).unwrap();
        for c in EquivalenceClass::ALL {
            let chain = m.chains.frame(c);
            prop_assert_eq!(&layout.syndrome_of(chain), &syn);
            prop_assert_eq!(layout.class_of(chain), c);
        }
        // species-wise minimal within the true class
        let own = m.chains.frame(layout.class_of(&f));
        prop_assert!(own.counts().separable_weight() <= f.counts().separable_weight());
    }

    #[test]
    fn matching_is_never_heavier_than_a_greedy_pairing(
        n in (1usize..=5).prop_map(|k| 2 * k),
        w in vec(0u32..30, 45),
    ) {
        // complete graph, so a perfect matching always exists
        let mut edges = Vec::new();
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b, w[k]));
                k += 1;
            }
        }
        let m = min_weight_perfect_matching_edges(n, &edges).unwrap();
        let greedy: u64 = (0..n / 2).map(|i| edges.iter().find(|e| e.0 == 2 * i && e.1 == 2 * i + 1).unwrap().2 as u64).sum();
        prop_assert!(m.total_weight <= greedy);
        let mut seen = vec![false; n];
        let mut total = 0u64;
        for &(a, b) in &m.pairs {
            prop_assert!(!seen[a] && !seen[b]);
            seen[a] = true;
            seen[b] = true;
            total += edges.iter().find(|e| (e.0, e.1) == (a, b)).unwrap().2 as u64;
        }
        prop_assert!(seen.iter().all(|&s| s));
        prop_assert_eq!(total, m.total_weight);
    }

    #[test]
    fn schedules_partition_stabilizers_and_shares(l in 2usize..=13, size in 2usize..=5) {
        let layout = CodeLayout::new(l).unwrap();
        let s = parallel_sweep_schedule(&layout, size).unwrap();
        let mut owner = vec![usize::MAX; layout.n_stabilizers()];
        for r in s.rectangles() {
            prop_assert!(!r.stabilizers.is_empty());
            for &sid in &r.stabilizers {
                prop_assert_eq!(owner[sid as usize], usize::MAX);
                owner[sid as usize] = r.id;
            }
        }
        prop_assert!(owner.iter().all(|&o| o != usize::MAX));
        for turn in s.turns() {
            for (i, &a) in turn.iter().enumerate() {
                for &b in &turn[i + 1..] {
                    let qa = &s.rectangles()[a].qubits;
                    prop_assert!(s.rectangles()[b].qubits.iter().all(|q| !qa.contains(q)));
                }
            }
        }
        for q in 0..layout.n_qubits() {
            prop_assert_eq!(s.share(q) * s.rectangles_of_qubit(q).len() as u64, 12);
        }
    }

    #[test]
    fn wilson_interval_brackets_the_rate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let failures = ((trials as f64) * frac) as u64;
        let (lo, hi) = wilson_interval(failures, trials, 1.96);
        let rate = failures as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= rate + 1e-12 && rate <= hi + 1e-12 && hi <= 1.0);
        if failures == 0 { prop_assert_eq!(lo, 0.0); }
        if failures == trials { prop_assert_eq!(hi, 1.0); }
    }

    #[test]
    fn result_csv_round_trips(rows in vec((2usize..40, 0.0f64..0.5, 0u64..1000, 0u64..1000, any::<u64>()), 0..6), truncated in any::<bool>()) {
        let rows: Vec<ResultRow> = rows
            .into_iter()
            .map(|(distance, p, trials, f, seed)| {
                let failures = f.min(trials);
                let rate = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
                let (ci_low, ci_high) = wilson_interval(failures, trials, 1.96);
                ResultRow { distance, p, model: "depolarizing".into(), algorithm: "enhanced_mwpm".into(), trials, failures, rate, ci_low, ci_high, seed }
            })
            .collect();
        let mut buf = Vec::new();
        write_results_csv(&rows, truncated, &mut buf).unwrap();
        let (back, t) = read_results_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, rows);
        prop_assert_eq!(t, truncated);
    }
}
