use std::collections::BTreeSet;

use covsketch::instance::{gen_random, load_edges, write_edges, EdgeFormat};
use covsketch::sketch::{build_h_leq_n_offline, build_hp, build_hp_prime, read_sketch, write_sketch};
use covsketch::solvers::greedy_kcover;
use covsketch::{CoverageInstance, EdgeRecord, ElementId, SetId, SketchParams, StreamingSketchBuilder};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn union(inst: &CoverageInstance, family: &[u32]) -> usize {
    family
        .iter()
        .flat_map(|&s| inst.set_members(SetId(s)).iter().copied())
        .collect::<BTreeSet<_>>()
        .len()
}

fn instance() -> impl Strategy<Value = CoverageInstance> {
    (1usize..10, 1usize..40, 0.05f64..0.7, any::<u64>())
        .prop_map(|(n, m, p, seed)| gen_random(n, m, p, seed).unwrap())
}

fn family(n: usize) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::btree_set(0..n as u32, 0..=n).prop_map(|s| s.into_iter().collect())
}

fn shuffled_edges(inst: &CoverageInstance, seed: u64) -> Vec<EdgeRecord> {
    let mut edges: Vec<EdgeRecord> = inst.edges().collect();
    edges.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    edges
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn coverage_monotone_and_submodular(
        (inst, a, b, x) in instance().prop_flat_map(|inst| {
            let n = inst.n();
            (Just(inst), family(n), family(n), 0..n as u32)
        })
    ) {
        let small: Vec<u32> = a.iter().copied().filter(|s| b.contains(s)).collect();
        let big: Vec<u32> = a.clone();
        let ids = |v: &[u32]| v.iter().map(|&s| SetId(s)).collect::<Vec<_>>();
        prop_assert!(inst.coverage(&ids(&small)).unwrap() <= inst.coverage(&ids(&big)).unwrap());
        let with = |v: &[u32]| { let mut w = v.to_vec(); w.push(x); w };
        let gain_small = union(&inst, &with(&small)) - union(&inst, &small);
        let gain_big = union(&inst, &with(&big)) - union(&inst, &big);
        prop_assert!(gain_big <= gain_small);
        prop_assert_eq!(inst.coverage(&ids(&big)).unwrap(), union(&inst, &big));
    }

    #[test]
    fn hp_is_nested_in_p(inst in instance(), p in 0.0f64..1.0, q in 0.0f64..1.0, seed in any::<u64>()) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let a = build_hp(&inst, lo, seed);
        let b = build_hp(&inst, hi, seed);
        let outer: BTreeSet<_> = b.elements().iter().copied().collect();
        prop_assert!(a.elements().iter().all(|e| outer.contains(e)));
    }

    #[test]
    fn hp_prime_caps_degree(inst in instance(), p in 0.0f64..=1.0, cap in 1usize..5, seed in any::<u64>()) {
        let hp = build_hp(&inst, p, seed);
        let capped = build_hp_prime(&hp, cap);
        prop_assert!(capped.max_degree() <= cap);
        prop_assert_eq!(capped.elements(), hp.elements());
        for local in 0..hp.elements().len() {
            let full = hp.incident_sets(local);
            let kept = capped.incident_sets(local);
            prop_assert_eq!(kept, &full[..full.len().min(cap)]);
        }
    }

    #[test]
    fn streaming_support_matches_offline_when_cap_binds(
        inst in instance(), cap in 1u64..4, budget in 1u64..60, seed in any::<u64>(), order in any::<u64>()
    ) {
        let params = SketchParams::new(inst.n(), 2, 0.2, 1.0, None).unwrap().with_limits(cap, budget).unwrap();
        let mut builder = StreamingSketchBuilder::new(params, seed);
        for e in shuffled_edges(&inst, order) {
            builder.update(e).unwrap();
        }
        let streamed = builder.finalize().unwrap();
        let offline = build_h_leq_n_offline(&inst, params, seed);
        prop_assert!(streamed.same_support(&offline));
        prop_assert!(builder.stats().peak_edges <= params.working_bound());
    }

    #[test]
    fn sketch_codec_roundtrip(inst in instance(), cap in 1u64..6, budget in 1u64..80, seed in any::<u64>()) {
        let params = SketchParams::new(inst.n(), 3, 0.1, 2.0, Some(inst.m() as u64))
            .unwrap()
            .with_limits(cap, budget)
            .unwrap();
        let sk = build_h_leq_n_offline(&inst, params, seed);
        let mut bytes = Vec::new();
        write_sketch(&sk, &mut bytes).unwrap();
        let back = read_sketch(&bytes[..]).unwrap();
        prop_assert_eq!(&back, &sk);
        for cut in [0, bytes.len() / 2, bytes.len() - 1] {
            prop_assert!(read_sketch(&bytes[..cut]).is_err());
        }
    }

    #[test]
    fn edge_files_roundtrip(inst in instance(), binary in any::<bool>()) {
        let format = if binary { EdgeFormat::Binary } else { EdgeFormat::Text };
        let edges: Vec<EdgeRecord> = inst.edges().collect();
        let mut buf = Vec::new();
        let written = write_edges(&mut buf, format, edges.iter().copied()).unwrap();
        prop_assert_eq!(written, edges.len() as u64);
        let back: Vec<EdgeRecord> = load_edges(&buf[..], format).collect::<Result<_, _>>().unwrap();
        prop_assert_eq!(back, edges);
    }

    #[test]
    fn greedy_prefix_scaling(inst in instance(), eps in 0.05f64..0.95) {
        let sol = greedy_kcover(&inst, inst.n());
        for t in 1..=sol.len() {
            let short = ((1.0 - eps) * t as f64).ceil() as usize;
            let full = union(&inst, &sol.chosen[..t].iter().map(|s| s.0).collect::<Vec<_>>());
            let part = union(&inst, &sol.chosen[..short].iter().map(|s| s.0).collect::<Vec<_>>());
            prop_assert!(part as f64 >= (1.0 - eps) * full as f64);
        }
    }

    #[test]
    fn solution_counters_match_recount(inst in instance(), k in 1usize..12) {
        let sol = greedy_kcover(&inst, k);
        let ids: Vec<u32> = sol.chosen.iter().map(|s| s.0).collect();
        prop_assert_eq!(sol.len(), k.min(inst.n()));
        prop_assert_eq!(ids.iter().collect::<BTreeSet<_>>().len(), ids.len());
        prop_assert_eq!(sol.covered_on_target, union(&inst, &ids));
        prop_assert_eq!(sol.gains.iter().sum::<usize>(), sol.covered_on_target);
        prop_assert!(sol.gains.windows(2).all(|w| w[1] <= w[0]));
    }
}

/// Exhaustive for n <= 8: `⌈k ln(1/λ)⌉` greedy picks reach `(1 − λ)·Opt_k`.
#[test]
fn k_log_inv_lambda_picks_reach_fraction_of_opt() {
    let mut checked = 0;
    for seed in 0..40u64 {
        let n = 3 + (seed as usize % 6);
        let inst = gen_random(n, 30, 0.25, seed).unwrap();
        for k in 1..=3usize.min(n) {
            let opt = (0u32..1 << n)
                .filter(|mask| mask.count_ones() as usize == k)
                .map(|mask| union(&inst, &(0..n as u32).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>()))
                .max()
                .unwrap();
            for lambda in [0.05, 0.2, (-1.0f64).exp()] {
                let picks = (k as f64 * (1.0 / lambda).ln()).ceil() as usize;
                let sol = greedy_kcover(&inst, picks);
                assert_at_least(sol.covered_on_target as f64, (1.0 - lambda) * opt as f64);
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

fn assert_at_least(a: f64, b: f64) {
    assert!(a >= b - 1e-9, "{a} < {b}");
}

#[test]
fn hp_estimator_is_unbiased() {
    let inst = gen_random(6, 300, 0.3, 17).unwrap();
    let family = [SetId(1), SetId(4)];
    let truth = union(&inst, &[1, 4]) as f64;
    let p = 0.3;
    let trials = 2000;
    let ests: Vec<f64> = (0..trials)
        .map(|seed| build_hp(&inst, p, seed).coverage(&family).unwrap() as f64 / p)
        .collect();
    let mean = ests.iter().sum::<f64>() / trials as f64;
    let sd = (ests.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt();
    assert!((mean - truth).abs() <= 4.0 * sd / (trials as f64).sqrt(), "mean {mean} truth {truth}");
}

/// With a fixed budget the retained edge count stays in `[M, M + D]` however
/// large the ground set grows.
#[test]
fn retained_space_does_not_grow_with_m() {
    let (n, cap, budget) = (100usize, 40u64, 3_000u64);
    let mut retained = Vec::new();
    for m in [1_000usize, 10_000, 100_000] {
        let inst = gen_random(n, m, 0.05, m as u64).unwrap();
        let params = SketchParams::new(n, 5, 0.2, 1.0, Some(m as u64))
            .unwrap()
            .with_limits(cap, budget)
            .unwrap();
        let mut builder = StreamingSketchBuilder::new(params, 3);
        builder.extend(inst.edges().map(Ok)).unwrap();
        let sk = builder.finalize().unwrap();
        assert!(inst.edge_count() as u64 > budget);
        assert!((budget..=budget + cap).contains(&sk.total_edges()), "m={m}: {}", sk.total_edges());
        assert!(builder.stats().peak_edges <= params.working_bound());
        assert!(sk.retained().iter().all(|r| r.sets.len() as u64 <= cap));
        retained.push(sk.space_units());
    }
    let spread = retained.iter().max().unwrap() - retained.iter().min().unwrap();
    assert!(spread <= budget, "{retained:?}");
}

#[test]
fn full_retention_sketch_is_the_graph() {
    let inst = gen_random(7, 50, 0.3, 5).unwrap();
    let params = SketchParams::new(7, 3, 0.2, 1.0, Some(50)).unwrap();
    let sk = build_h_leq_n_offline(&inst, params, 9);
    assert!(sk.is_full_retention());
    assert_eq!(sk.total_edges(), inst.edge_count() as u64);
    let on_sketch = greedy_kcover(&sk, 3);
    let on_graph = greedy_kcover(&inst, 3);
    assert_eq!(on_sketch.chosen, on_graph.chosen);
    for e in 0..50 {
        let kept = sk.retained().iter().find(|r| r.element == ElementId(e)).unwrap();
        assert_eq!(kept.sets, inst.element_sets(ElementId(e)));
    }
}
