use covsketch::hardness::{query_counter_demo, AuditToken, PurificationInstance, QueryStrategy};
use covsketch::instance::{disjointness_stream, gen_planted_cover, gen_random};
use covsketch::l0_baseline::{kcover_via_l0, sketch_sets, DistinctSketch, UnionSketch};
use covsketch::solvers::{
    brute_force_kcover, brute_force_setcover, greedy_set_cover, kcover_via_sketch, setcover_multipass,
    setcover_outliers, threshold_greedy, KCoverConfig, MultipassParams, OutlierParams,
};
use covsketch::source::OnceSource;
use covsketch::{Error, Exec, MemorySource, SetId};

#[test]
fn kcover_on_disjointness_intersecting() {
    let edges = disjointness_stream(6, &[1, 3, 5], &[2, 3]).unwrap();
    let mut src = MemorySource::new(edges);
    let cfg = KCoverConfig {
        n: 6,
        k: 1,
        eps: 0.6,
        m_hint: Some(2),
        seed: 1,
    };
    let run = kcover_via_sketch(&mut src, &cfg).unwrap();
    assert_eq!(run.solution.chosen, vec![SetId(2)]);
    assert_eq!(run.solution.covered_on_target, 2);
}

#[test]
fn kcover_on_disjointness_disjoint() {
    let mut src = MemorySource::new(disjointness_stream(6, &[1, 2], &[4]).unwrap());
    let cfg = KCoverConfig {
        n: 6,
        k: 1,
        eps: 0.6,
        m_hint: Some(2),
        seed: 1,
    };
    assert_eq!(kcover_via_sketch(&mut src, &cfg).unwrap().solution.covered_on_target, 1);
}

#[test]
fn multipass_r1_is_classic_greedy() {
    let inst = gen_random(9, 40, 0.2, 3).unwrap();
    let mut src = MemorySource::from_instance(&inst);
    let out = setcover_multipass(&mut src, 9, 40, 1, 0.3, 1.0, 0, Exec::Sequential).unwrap();
    assert_eq!(out.solution.chosen, greedy_set_cover(&inst).chosen);
    assert_eq!(out.passes, 1);
    assert!(out.iterations.is_empty());
}

#[test]
fn multipass_needs_replayable_source() {
    let inst = gen_random(5, 60, 0.3, 2).unwrap();
    let edges: Vec<_> = inst.edges().map(Ok).collect();
    let mut once = OnceSource::new(Box::new(edges.into_iter()));
    let err = setcover_multipass(&mut once, 5, 60, 2, 0.3, 1.0, 0, Exec::Sequential).unwrap_err();
    assert!(matches!(err, Error::Param(_)));
}

#[test]
fn multipass_uncovered_shrinks_per_iteration() {
    for seed in 0..30u64 {
        let planted = gen_planted_cover(10, 64, 2, seed).unwrap();
        let inst = planted.instance;
        let mut src = MemorySource::from_instance(&inst);
        let out = setcover_multipass(&mut src, 10, 64, 3, 0.3, 1.0, seed, Exec::Sequential).unwrap();
        let op = out.params.outlier_params().unwrap();
        for it in &out.iterations {
            let bound = (op.lambda + op.eps_prime()) * it.uncovered_before as f64;
            assert!(it.uncovered_after as f64 <= bound.ceil(), "{it:?}");
        }
        assert_eq!(out.passes, 5);
        assert_eq!(out.solution.covered_on_target, 64);
    }
}

#[test]
fn multipass_budget_shares_sum_to_one() {
    for r in 1..=6 {
        let p = MultipassParams::new(1_000_000, r, 0.3, 1.0).unwrap();
        let (shares, last) = p.log_budget_shares();
        assert_eq!(shares.len(), r - 1);
        assert!((shares.iter().sum::<f64>() + last - 1.0).abs() < 1e-12);
        assert_eq!(p.pass_count(), 2 * (r - 1) + 1);
    }
    assert!(MultipassParams::new(100, 0, 0.3, 1.0).is_err());
    assert!(MultipassParams::new(100, 6, 0.3, 1.0).is_err());
}

#[test]
fn outliers_parallel_matches_sequential() {
    let planted = gen_planted_cover(12, 80, 3, 4).unwrap();
    let params = OutlierParams::new(0.3, 0.2, 1.0).unwrap();
    let run = |exec| {
        let mut src = MemorySource::from_instance(&planted.instance);
        setcover_outliers(&mut src, 12, Some(80), &params, 7, exec).unwrap()
    };
    let (a, b) = (run(Exec::Sequential), run(Exec::Parallel));
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.k_prime, b.k_prime);
    assert_eq!(a.attempts.len(), b.attempts.len());
}

#[test]
fn outliers_size_one_cover() {
    let planted = gen_planted_cover(8, 50, 1, 11).unwrap();
    let (eps, lambda) = (0.3, (-1.0f64).exp());
    let params = OutlierParams::new(eps, lambda, 1.0).unwrap();
    let mut src = MemorySource::from_instance(&planted.instance);
    let out = setcover_outliers(&mut src, 8, Some(50), &params, 0, Exec::Sequential).unwrap();
    let bound = ((1.0 + eps) * (1.0 / lambda).ln() * (1.0 + eps / 3.0)).ceil() as usize;
    assert!(out.solution.len() <= bound);
    assert!(out.solution.chosen.contains(&planted.planted[0]));
}

#[test]
fn outlier_params_derivations() {
    let p = OutlierParams::new(0.3, 0.25, 2.0).unwrap();
    assert!((p.eps_prime() + p.lambda_prime() - 0.25).abs() < 1e-12);
    assert!(p.eps_prime() > 0.0 && p.eps_prime() < 0.25);
    let sched = p.k_prime_schedule(20);
    assert_eq!(*sched.last().unwrap(), 20.0);
    assert!(sched.windows(2).all(|w| w[0] < w[1]));
    assert!((sched[0] - 1.1).abs() < 1e-12);
    assert!(OutlierParams::new(0.3, 0.5, 1.0).is_err());
}

#[test]
fn threshold_greedy_guarantee() {
    for seed in 0..20u64 {
        let inst = gen_random(12, 30, 0.2, seed).unwrap();
        let sol = threshold_greedy(&inst, 3, 0.1).unwrap();
        let (opt, _) = brute_force_kcover(&inst, 3, Exec::Sequential).unwrap();
        let bound = 1.0 - (-1.0f64).exp() - 0.1;
        assert!(sol.covered_on_target as f64 >= bound * opt as f64);
        assert!(sol.len() <= 3);
    }
}

#[test]
fn brute_force_setcover_on_planted() {
    for seed in 0..20u64 {
        let planted = gen_planted_cover(10, 40, 3, seed).unwrap();
        let (size, witness) = brute_force_setcover(&planted.instance, 0.0, Exec::Parallel).unwrap();
        assert!(size <= 3);
        assert_eq!(planted.instance.coverage(&witness).unwrap(), 40);
        let (none, _) = brute_force_setcover(&planted.instance, 1.0, Exec::Sequential).unwrap();
        assert_eq!(none, 0);
    }
}

#[test]
fn l0_kcover_matches_exact_on_small_sets() {
    // Capacity above every set size makes each estimate an exact count.
    let inst = gen_random(7, 60, 0.3, 21).unwrap();
    let sketches = sketch_sets(7, inst.edges().map(Ok), || DistinctSketch::new(128, 5), |s, e| s.insert(e)).unwrap();
    let sol = kcover_via_l0(&sketches, 3, Exec::Parallel).unwrap();
    let (opt, witness) = brute_force_kcover(&inst, 3, Exec::Sequential).unwrap();
    assert_eq!(sol.estimate, opt as f64);
    assert_eq!(sol.chosen, witness);
    assert_eq!(sol.space_units, sketches.iter().map(UnionSketch::space_units).sum::<usize>());
}

#[test]
fn l0_kcover_guard() {
    let inst = gen_random(40, 10, 0.3, 1).unwrap();
    let sketches = sketch_sets(40, inst.edges().map(Ok), || DistinctSketch::new(8, 1), |s, e| s.insert(e)).unwrap();
    assert!(matches!(kcover_via_l0(&sketches, 20, Exec::Sequential), Err(Error::Guard { .. })));
}

#[test]
fn random_query_demo_is_illustrative() {
    let audit = AuditToken::unsafe_acknowledge();
    let inst = PurificationInstance::new(400, 20, 0.2, 6).unwrap();
    let report = query_counter_demo(&inst, QueryStrategy::RandomSubsets, 10_000, 1, &audit);
    assert_eq!(report.queries, 10_000);
    assert!(report.best_ratio > 0.0 && report.best_ratio <= 1.0);
}
