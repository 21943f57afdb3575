mod common;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roma_core::analysis::{broadcast_time_distribution, build_transition_matrix, expected_counts};
use roma_core::dynamics::{run_all_sources, step_with_strategy, BroadcastState, ModelKind, ModelSpec, RunOptions};
use roma_core::graphgen::{sample_directed_er, sample_rooted_tree, sample_rooted_tree_containing, DirectedEdgeSet, RngStream};
use roma_core::harness::{parse_config, ExperimentSpec};
use roma_core::protocols::{algorithm1_consensus, Decision};
use roma_core::stats::wilson_interval;
use roma_core::treecount::{
    count_by_enumeration, count_rooted_trees_containing, count_rooted_trees_containing_rooted_at,
    parse_forest, write_forest, RootedForest,
};

fn forest_strategy(max_n: usize) -> impl Strategy<Value = RootedForest> {
    (1..=max_n, any::<u64>(), 0.0..1.0f64).prop_map(|(n, seed, q)| {
        let edges = common::random_forest(n, q, &mut ChaCha8Rng::seed_from_u64(seed));
        RootedForest::from_edges(n, &edges).unwrap()
    })
}

fn model_strategy() -> impl Strategy<Value = ModelSpec> {
    (2usize..40, 0usize..4, any::<u8>()).prop_filter_map("restrictions", |(n, which, x)| {
        let x = x as usize;
        match which {
            0 => ModelSpec::urt(n).ok(),
            1 => ModelSpec::urt_byz(n, x % (n / 2 + 1)).ok(),
            2 => ModelSpec::urt_adv(n, x % (n / 2 + 1)).ok(),
            _ => ModelSpec::der(n, 1 + x % (2 * n)).ok(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rooted_counts_match_enumeration(f in forest_strategy(6)) {
        let n = f.n();
        let total = count_rooted_trees_containing(&f);
        prop_assert_eq!(total.to_string(), count_by_enumeration(n, Some(&f), None).unwrap().to_string());
        let mut sum = num_bigint::BigUint::zero();
        for c in f.components() {
            let k = count_rooted_trees_containing_rooted_at(&f, c.root).unwrap();
            prop_assert_eq!(k.to_string(), count_by_enumeration(n, Some(&f), Some(c.root)).unwrap().to_string());
            sum += k;
        }
        prop_assert_eq!(sum, total);
    }

    #[test]
    fn forest_text_round_trips(f in forest_strategy(12)) {
        let text = write_forest(&f);
        prop_assert_eq!(parse_forest(&text).unwrap(), f);
    }

    #[test]
    fn conditioned_trees_contain_forest(f in forest_strategy(30), seed in any::<u64>()) {
        let t = sample_rooted_tree_containing(&f, &mut RngStream::new(seed, 3).rng());
        prop_assert_eq!(t.n(), f.n());
        prop_assert!(t.contains_forest(&f));
    }

    #[test]
    fn streams_reproduce(seed in any::<u64>(), stream in any::<u64>(), n in 1usize..50) {
        let a = sample_rooted_tree(n, &mut RngStream::new(seed, stream).rng());
        let b = sample_rooted_tree(n, &mut RngStream::new(seed, stream).rng());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn er_sets_respect_forced_and_removed(n in 1usize..12, extra in 0usize..20, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0).rng();
        let forced = DirectedEdgeSet::new(n, vec![(0, n - 1)]).unwrap();
        let removed = DirectedEdgeSet::new(n, if n > 1 { vec![(n - 1, 0)] } else { vec![] }).unwrap();
        let pool = n * n - removed.len();
        let m = (1 + extra).min(pool);
        let s = sample_directed_er(n, m, Some(&forced), Some(&removed), &mut rng).unwrap();
        prop_assert_eq!(s.len(), m);
        prop_assert!(s.contains((0, n - 1)));
        prop_assert!(removed.edges().iter().all(|&e| !s.contains(e)));
    }

    #[test]
    fn informed_sets_never_shrink(spec in model_strategy(), seed in any::<u64>()) {
        let opts = RunOptions::for_spec(&spec);
        let mut s = BroadcastState::new(spec, 0).unwrap();
        let mut rng = RngStream::new(seed, 0).rng();
        for _ in 0..30 {
            let before = s.informed().to_vec();
            let was_complete = s.is_complete();
            step_with_strategy(&mut s, &opts, &mut rng).unwrap();
            prop_assert!(before.iter().zip(s.informed()).all(|(&a, &b)| !a || b));
            prop_assert!(!was_complete || s.is_complete());
            prop_assert!((0..spec.n).all(|v| !(s.is_byzantine(v) && s.is_informed(v))));
        }
    }

    #[test]
    fn all_to_all_never_before_radius(n in 2usize..24, seed in any::<u64>()) {
        let spec = ModelSpec::urt(n).unwrap();
        let r = run_all_sources(&spec, &RunOptions::for_spec(&spec), 500, &mut RngStream::new(seed, 0).rng()).unwrap();
        let radius = r.radius.unwrap();
        prop_assert!(r.all_to_all.unwrap() >= radius);
        prop_assert_eq!(r.per_source.iter().flatten().min().copied(), Some(radius));
    }

    #[test]
    fn absorption_curve_monotone(n in 2usize..30, f_raw in 0usize..10) {
        let f = if ModelSpec::urt_byz(n, f_raw).is_ok() { f_raw } else { 0 };
        let a = build_transition_matrix::<f64>(n, f).unwrap();
        prop_assert!(a.max_row_error() < 1e-12);
        let curve = broadcast_time_distribution(&a, 60);
        prop_assert!(curve.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        prop_assert!(*curve.last().unwrap() > 1.0 - 1e-6);
        let mean = expected_counts(&a, 20);
        prop_assert!(mean.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn exact_rows_are_stochastic(n in 2usize..9) {
        let a = build_transition_matrix::<BigRational>(n, 0).unwrap();
        prop_assert!(a.row_sums().iter().all(|s| s.is_one()));
    }

    #[test]
    fn wilson_contains_estimate(trials in 1u64..10_000, frac in 0.0..=1.0f64) {
        let k = (frac * trials as f64).round() as u64;
        let ci = wilson_interval(k, trials, 2.576);
        let p = k as f64 / trials as f64;
        prop_assert!(ci.lo <= p + 1e-12 && p <= ci.hi + 1e-12);
        prop_assert!(0.0 <= ci.lo && ci.hi <= 1.0);
    }

    #[test]
    fn config_pairs_build_specs(n in 4usize..200, trials in 1usize..1000, seed in any::<u64>()) {
        let text = format!("model = URT\nn = {n}\ntrials = {trials}\nseed = {seed}  # base\n");
        let spec = ExperimentSpec::from_pairs(&parse_config(&text).unwrap()).unwrap();
        prop_assert_eq!(spec.model.kind, ModelKind::Urt);
        prop_assert_eq!((spec.model.n, spec.trials, spec.seed), (n, trials, seed));
    }

    #[test]
    fn flooding_consensus_outputs_first_bit_or_bottom(n in 1usize..40, bits in any::<u64>(), seed in any::<u64>()) {
        let spec = ModelSpec::urt(n).unwrap();
        let inputs: Vec<u8> = (0..n).map(|v| (bits >> (v % 64) & 1) as u8).collect();
        let out = algorithm1_consensus(&spec, &inputs, 1.0, &mut RngStream::new(seed, 0).rng()).unwrap();
        prop_assert!(out.honest_decisions().all(|d| d == Decision::Value(inputs[0]) || d == Decision::Bottom));
    }
}
