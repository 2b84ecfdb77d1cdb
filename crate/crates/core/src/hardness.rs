//! The purification gadget behind the oracle lower bound for k-cover.
//!
//! `n` items hide `k` gold ones. The coverage function of the derived
//! instance is `C(S) = k + (n/k)·Gold(S)`; the noisy oracle answers
//! `k + |S|` whenever `Gold(S)` sits inside the tolerance band, so it leaks
//! nothing about gold until a query lands outside the band. Exact rational
//! arithmetic is used for every band and approximation check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hash::derive_seed;

/// Capability required for any gold-revealing accessor.
#[derive(Debug)]
pub struct AuditToken(());

impl AuditToken {
    /// Explicit opt-in for audit access; query strategies never receive one.
    pub fn unsafe_acknowledge() -> Self {
        AuditToken(())
    }
}

#[derive(Debug, Clone)]
pub struct PurificationInstance {
    n_items: usize,
    k_gold: usize,
    eps: f64,
    eps_exact: BigRational,
    gold: Vec<bool>,
    seed: u64,
}

fn rat(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl PurificationInstance {
    /// Gold items drawn uniformly without replacement.
    pub fn new(n_items: usize, k_gold: usize, eps: f64, seed: u64) -> Result<Self> {
        if k_gold == 0 || k_gold > n_items {
            return Err(Error::param(format!(
                "need 1 <= k_gold ({k_gold}) <= n_items ({n_items})"
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param(format!("eps {eps} not in (0, 1)")));
        }
        let eps_exact = BigRational::from_float(eps).expect("finite eps");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gold = vec![false; n_items];
        for i in index::sample(&mut rng, n_items, k_gold) {
            gold[i] = true;
        }
        Ok(Self {
            n_items,
            k_gold,
            eps,
            eps_exact,
            gold,
            seed,
        })
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn k_gold(&self) -> usize {
        self.k_gold
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn check_query(&self, items: &[u32]) -> Result<()> {
        let mut seen = vec![false; self.n_items];
        for &i in items {
            let slot = seen.get_mut(i as usize).ok_or(Error::Range {
                what: "item",
                value: i as u64,
                bound: self.n_items as u64,
            })?;
            if *slot {
                return Err(Error::Domain("query must be a set (duplicate item)"));
            }
            *slot = true;
        }
        Ok(())
    }

    fn gold_in(&self, items: &[u32]) -> usize {
        items.iter().filter(|&&i| self.gold[i as usize]).count()
    }

    /// `true` when `Gold(S)` falls outside
    /// `k|S|/n ± ε (k|S|/n + k²/n)`.
    fn outside_band(&self, size: usize, gold: usize) -> bool {
        let (n, k, s, g) = (
            self.n_items as i128,
            self.k_gold as i128,
            size as i128,
            gold as i128,
        );
        // Scaled by n: |n·Gold − k|S|| ≤ ε (k|S| + k²).
        let deviation = rat((n * g - k * s).abs());
        let width = &self.eps_exact * rat(k * s + k * k);
        deviation > width
    }

    /// The purity oracle: `true` (1) iff the query's gold count leaves the band.
    pub fn pure_oracle(&self, items: &[u32]) -> Result<bool> {
        self.check_query(items)?;
        Ok(self.outside_band(items.len(), self.gold_in(items)))
    }

    fn coverage_exact(&self, size: usize, gold: usize) -> BigRational {
        let _ = size;
        let (n, k) = (self.n_items as i128, self.k_gold as i128);
        rat(k) + BigRational::new(BigInt::from(n), BigInt::from(k)) * rat(gold as i128)
    }

    fn noisy_exact_unchecked(&self, items: &[u32]) -> BigRational {
        let gold = self.gold_in(items);
        if self.outside_band(items.len(), gold) {
            self.coverage_exact(items.len(), gold)
        } else {
            rat(self.k_gold as i128 + items.len() as i128)
        }
    }

    /// `k + |S|` inside the band, the true coverage otherwise.
    pub fn noisy_cov_exact(&self, items: &[u32]) -> Result<BigRational> {
        if items.is_empty() {
            return Err(Error::Domain("coverage oracle is defined for non-empty sets"));
        }
        self.check_query(items)?;
        Ok(self.noisy_exact_unchecked(items))
    }

    pub fn noisy_cov_oracle(&self, items: &[u32]) -> Result<f64> {
        Ok(to_f64(&self.noisy_cov_exact(items)?))
    }

    pub fn gold_count(&self, items: &[u32], _audit: &AuditToken) -> Result<usize> {
        self.check_query(items)?;
        Ok(self.gold_in(items))
    }

    pub fn gold_items(&self, _audit: &AuditToken) -> Vec<u32> {
        (0..self.n_items as u32).filter(|&i| self.gold[i as usize]).collect()
    }

    /// `C(S) = k + (n/k)·Gold(S)` for non-empty `S`.
    pub fn true_coverage(&self, items: &[u32], audit: &AuditToken) -> Result<BigRational> {
        if items.is_empty() {
            return Err(Error::Domain("coverage is defined for non-empty sets"));
        }
        let gold = self.gold_count(items, audit)?;
        Ok(self.coverage_exact(items.len(), gold))
    }

    /// Best coverage over families of `k` items: all of the gold, `k + n`.
    pub fn optimum(&self, audit: &AuditToken) -> BigRational {
        self.true_coverage(&self.gold_items(audit), audit)
            .expect("gold is a non-empty set")
    }
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// `(1−ε′)·noisy ≤ C ≤ (1+ε′)·noisy` failed.
    NoisyBracketsTrue,
    /// `(1−ε′)·C ≤ noisy ≤ (1+ε′)·C` failed.
    TrueBracketsNoisy,
    /// Inside the band, `C/(1+ε) ≤ k+|S| ≤ C/(1−ε)` failed.
    BandChain,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub size: usize,
    pub gold: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidityReport {
    pub trials: usize,
    pub impure_queries: usize,
    pub violations: Vec<Violation>,
}

fn random_query(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let size = rng.gen_range(1..=n);
    index::sample(rng, n, size)
        .into_iter()
        .map(|i| i as u32)
        .collect()
}

/// Checks the noisy oracle against the audited coverage on `trials` random
/// non-empty queries with `ε′ = 2ε`.
pub fn verify_oracle_validity(
    inst: &PurificationInstance,
    trials: usize,
    seed: u64,
    exec: Exec,
    audit: &AuditToken,
) -> ValidityReport {
    let one = BigRational::one();
    let eps = inst.eps_exact.clone();
    let eps2 = &eps + &eps;
    let per_trial = exec.map_range(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
        let items = random_query(inst.n_items, &mut rng);
        let gold = inst.gold_in(&items);
        let impure = inst.outside_band(items.len(), gold);
        let noisy = inst.noisy_exact_unchecked(&items);
        let truth = inst.true_coverage(&items, audit).expect("valid query");
        let mut kinds = Vec::new();
        let lo = &one - &eps2;
        let hi = &one + &eps2;
        if !(&lo * &noisy <= truth && truth <= &hi * &noisy) {
            kinds.push(ViolationKind::NoisyBracketsTrue);
        }
        if !(&lo * &truth <= noisy && noisy <= &hi * &truth) {
            kinds.push(ViolationKind::TrueBracketsNoisy);
        }
        if !impure {
            let down = &truth / (&one + &eps);
            let up = &truth / (&one - &eps);
            let chain = &lo * &truth <= down && down <= noisy && noisy <= up && up <= &hi * &truth;
            if !chain {
                kinds.push(ViolationKind::BandChain);
            }
        }
        (impure, items.len(), gold, kinds)
    });
    let mut report = ValidityReport {
        trials,
        ..Default::default()
    };
    for (trial, (impure, size, gold, kinds)) in per_trial.into_iter().enumerate() {
        report.impure_queries += impure as usize;
        for kind in kinds {
            report.violations.push(Violation {
                trial,
                size,
                gold,
                kind,
            });
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QueryStrategy {
    /// Uniform random `k`-subsets.
    RandomSubsets,
    /// Greedy on the noisy coverage oracle.
    GreedyViaNoisy,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub strategy: QueryStrategy,
    pub queries: usize,
    /// Index of the first query whose purity oracle answered 1.
    pub first_impure_query: Option<usize>,
    /// Best `C(S) / Opt` over queried families of at most `k` items.
    pub best_ratio: f64,
    /// Items chosen by the greedy strategy, in order.
    pub greedy_picks: Vec<u32>,
}

impl DemoReport {
    pub fn succeeded(&self) -> bool {
        self.first_impure_query.is_some()
    }
}

struct Tracker<'a> {
    inst: &'a PurificationInstance,
    audit: &'a AuditToken,
    budget: usize,
    queries: usize,
    first_impure: Option<usize>,
    best: BigRational,
}

impl Tracker<'_> {
    /// Spends one query; `None` once the budget is exhausted.
    fn ask(&mut self, items: &[u32]) -> Option<BigRational> {
        if self.queries >= self.budget {
            return None;
        }
        let impure = self.inst.pure_oracle(items).expect("strategy issues valid sets");
        if impure && self.first_impure.is_none() {
            self.first_impure = Some(self.queries);
        }
        self.queries += 1;
        if items.len() <= self.inst.k_gold {
            let truth = self.inst.true_coverage(items, self.audit).expect("non-empty");
            if truth > self.best {
                self.best = truth;
            }
        }
        Some(self.inst.noisy_exact_unchecked(items))
    }
}

/// Runs `strategy` for at most `budget` oracle queries and reports, through
/// the audit view, whether any query escaped the band.
pub fn query_counter_demo(
    inst: &PurificationInstance,
    strategy: QueryStrategy,
    budget: usize,
    seed: u64,
    audit: &AuditToken,
) -> DemoReport {
    let mut t = Tracker {
        inst,
        audit,
        budget,
        queries: 0,
        first_impure: None,
        best: BigRational::zero(),
    };
    let n = inst.n_items;
    let k = inst.k_gold;
    let mut greedy_picks = Vec::new();
    match strategy {
        QueryStrategy::RandomSubsets => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            while t.queries < budget {
                let mut items: Vec<u32> = index::sample(&mut rng, n, k)
                    .into_iter()
                    .map(|i| i as u32)
                    .collect();
                items.sort_unstable();
                t.ask(&items);
            }
        }
        QueryStrategy::GreedyViaNoisy => {
            let mut chosen: Vec<u32> = Vec::new();
            let mut used = vec![false; n];
            'rounds: for _ in 0..k {
                let mut best: Option<(BigRational, u32)> = None;
                for a in 0..n as u32 {
                    if used[a as usize] {
                        continue;
                    }
                    let mut q = chosen.clone();
                    q.push(a);
                    let Some(v) = t.ask(&q) else {
                        break 'rounds;
                    };
                    if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                        best = Some((v, a));
                    }
                }
                let Some((_, a)) = best else { break };
                used[a as usize] = true;
                chosen.push(a);
            }
            greedy_picks = chosen;
        }
    }
    let opt = inst.optimum(audit);
    DemoReport {
        strategy,
        queries: t.queries,
        first_impure_query: t.first_impure,
        best_ratio: if t.best.is_zero() {
            0.0
        } else {
            to_f64(&(t.best / opt))
        },
        greedy_picks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn audit() -> AuditToken {
        AuditToken::unsafe_acknowledge()
    }

    #[test]
    fn gold_count_edges() {
        let inst = PurificationInstance::new(50, 7, 0.1, 3).unwrap();
        let all: Vec<u32> = (0..50).collect();
        assert_eq!(inst.gold_count(&all, &audit()).unwrap(), 7);
        assert_eq!(inst.gold_count(&[], &audit()).unwrap(), 0);
        let gold = inst.gold_items(&audit());
        let probe: Vec<u32> = (0..50).step_by(3).collect();
        let expected = probe.iter().filter(|i| gold.contains(i)).count();
        assert_eq!(inst.gold_count(&probe, &audit()).unwrap(), expected);
    }

    #[test]
    fn pure_oracle_trivial_queries() {
        let inst = PurificationInstance::new(100, 10, 0.1, 1).unwrap();
        assert!(!inst.pure_oracle(&[]).unwrap());
        let all: Vec<u32> = (0..100).collect();
        assert!(!inst.pure_oracle(&all).unwrap());
    }

    #[test]
    fn gold_set_is_impure_by_band_arithmetic() {
        let (n, k, eps) = (1000usize, 100usize, 0.1);
        let inst = PurificationInstance::new(n, k, eps, 5).unwrap();
        let gold = inst.gold_items(&audit());
        // Gold(S) = k for |S| = k; band centre k²/n = 10, half-width
        // eps·(k²/n + k²/n) = 2, so the band is [8, 12] and 100 is outside.
        let centre = (k * k) as f64 / n as f64;
        let half = eps * 2.0 * centre;
        assert!((k as f64) > centre + half);
        assert!(inst.pure_oracle(&gold).unwrap());
    }

    #[test]
    fn noisy_oracle_cases() {
        let inst = PurificationInstance::new(1000, 100, 0.1, 5).unwrap();
        let gold = inst.gold_items(&audit());
        assert_eq!(inst.noisy_cov_oracle(&gold).unwrap(), 1100.0);
        let all: Vec<u32> = (0..1000).collect();
        assert_eq!(inst.noisy_cov_oracle(&all).unwrap(), 1100.0);
        assert!(matches!(inst.noisy_cov_oracle(&[]), Err(Error::Domain(_))));
        assert!(inst.pure_oracle(&[1, 1]).is_err());
        assert!(inst.pure_oracle(&[1000]).is_err());
    }

    #[test]
    fn optimum_identity() {
        for (n, k) in [(10, 3), (1000, 100), (10_000, 250), (7, 7)] {
            let inst = PurificationInstance::new(n, k, 0.1, 2).unwrap();
            assert_eq!(inst.optimum(&audit()), rat((n + k) as i128));
        }
    }

    #[test]
    fn validity_on_small_instance() {
        let inst = PurificationInstance::new(200, 20, 0.15, 4).unwrap();
        let r = verify_oracle_validity(&inst, 500, 1, Exec::Sequential, &audit());
        assert!(r.violations.is_empty(), "{:?}", &r.violations[..1]);
        assert_eq!(r.trials, 500);
        let empty = verify_oracle_validity(&inst, 0, 1, Exec::Sequential, &audit());
        assert!(empty.violations.is_empty() && empty.trials == 0);
    }

    #[test]
    fn validity_parallel_matches_sequential() {
        let inst = PurificationInstance::new(300, 30, 0.1, 9).unwrap();
        let a = verify_oracle_validity(&inst, 200, 3, Exec::Sequential, &audit());
        let b = verify_oracle_validity(&inst, 200, 3, Exec::Parallel, &audit());
        assert_eq!(a.impure_queries, b.impure_queries);
        assert_eq!(a.violations.len(), b.violations.len());
    }

    #[test]
    fn relabeling_preserves_answers() {
        // Swapping two gold items (or two brass items) keeps every gold count.
        let inst = PurificationInstance::new(60, 6, 0.2, 8).unwrap();
        let gold = inst.gold_items(&audit());
        let brass: Vec<u32> = (0..60).filter(|i| !gold.contains(i)).collect();
        let swap = |i: u32| -> u32 {
            match i {
                x if x == gold[0] => gold[1],
                x if x == gold[1] => gold[0],
                x if x == brass[0] => brass[1],
                x if x == brass[1] => brass[0],
                x => x,
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let q = random_query(60, &mut rng);
            let relabeled: Vec<u32> = q.iter().map(|&i| swap(i)).collect();
            assert_eq!(inst.pure_oracle(&q).unwrap(), inst.pure_oracle(&relabeled).unwrap());
        }
    }

    #[test]
    fn demo_budget_zero() {
        let inst = PurificationInstance::new(100, 10, 0.2, 1).unwrap();
        for s in [QueryStrategy::RandomSubsets, QueryStrategy::GreedyViaNoisy] {
            let r = query_counter_demo(&inst, s, 0, 0, &audit());
            assert!(!r.succeeded());
            assert_eq!(r.queries, 0);
        }
    }

    #[test]
    fn greedy_first_pick_ties_to_zero() {
        // Singletons stay inside the band here, so all answer k + 1.
        let inst = PurificationInstance::new(100, 50, 0.2, 3).unwrap();
        for i in 0..100 {
            assert_eq!(inst.noisy_cov_oracle(&[i]).unwrap(), 51.0);
        }
        let r = query_counter_demo(&inst, QueryStrategy::GreedyViaNoisy, 100, 0, &audit());
        assert_eq!(r.greedy_picks, vec![0]);
    }
}
