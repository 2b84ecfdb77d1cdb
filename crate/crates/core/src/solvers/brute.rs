//! Exhaustive oracles for small instances.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::instance::{Bipartite, CoverageInstance, SetId};

pub const KCOVER_GUARD: u128 = 10_000_000;
pub const SETCOVER_GUARD: u128 = 10_000_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Per-set membership as packed `u64` words.
pub(crate) struct Bitsets {
    words: usize,
    bits: Vec<u64>,
}

impl Bitsets {
    pub(crate) fn new<G: Bipartite + ?Sized>(graph: &G) -> Self {
        let words = graph.element_count().div_ceil(64).max(1);
        let mut bits = vec![0u64; words * graph.set_count()];
        for s in 0..graph.set_count() {
            for &e in graph.members(s) {
                bits[s * words + e as usize / 64] |= 1 << (e % 64);
            }
        }
        Self { words, bits }
    }

    fn row(&self, s: usize) -> &[u64] {
        &self.bits[s * self.words..(s + 1) * self.words]
    }
}

/// Depth-first walk over the `k`-subsets of `0..n` that start with `first`,
/// in lexicographic order. `visit` gets the subset and its union size and
/// returns `true` to stop.
fn walk_from<F>(sets: &Bitsets, n: usize, k: usize, first: usize, mut visit: F)
where
    F: FnMut(&[usize], u32) -> bool,
{
    let w = sets.words;
    let mut unions = vec![0u64; w * (k + 1)];
    let mut picked = vec![0usize; k];
    // unions[d] is the union of the first d picks.
    fn push(unions: &mut [u64], w: usize, depth: usize, row: &[u64]) {
        let (done, rest) = unions.split_at_mut((depth + 1) * w);
        let prev = &done[depth * w..];
        for ((dst, a), b) in rest[..w].iter_mut().zip(prev).zip(row) {
            *dst = a | b;
        }
    }
    if k == 0 {
        visit(&[], 0);
        return;
    }
    picked[0] = first;
    push(&mut unions, w, 0, sets.row(first));
    let mut depth = 1;
    let mut next = first + 1;
    loop {
        if depth == k {
            let count = unions[k * w..].iter().map(|x| x.count_ones()).sum();
            if visit(&picked, count) {
                return;
            }
            depth -= 1;
            next = picked[depth] + 1;
            if depth == 0 {
                return;
            }
            continue;
        }
        if next + (k - depth) > n {
            depth -= 1;
            if depth == 0 {
                return;
            }
            next = picked[depth] + 1;
            continue;
        }
        picked[depth] = next;
        push(&mut unions, w, depth, sets.row(next));
        depth += 1;
        next += 1;
    }
}

/// Maximum coverage over all `k`-subsets with the lexicographically smallest
/// optimal witness.
pub fn brute_force_kcover(inst: &CoverageInstance, k: usize, exec: Exec) -> Result<(usize, Vec<SetId>)> {
    let n = inst.n();
    let k = k.min(n);
    let count = binomial(n, k);
    if count > KCOVER_GUARD {
        return Err(Error::Guard {
            count,
            limit: KCOVER_GUARD,
        });
    }
    if k == 0 {
        return Ok((0, Vec::new()));
    }
    let sets = Bitsets::new(inst);
    let per_first = exec.map_range(n - k + 1, |first| {
        let mut best: Option<(u32, Vec<usize>)> = None;
        walk_from(&sets, n, k, first, |picked, value| {
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, picked.to_vec()));
            }
            false
        });
        best
    });
    let (value, witness) = per_first
        .into_iter()
        .flatten()
        .fold(None::<(u32, Vec<usize>)>, |acc, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one subset");
    Ok((
        value as usize,
        witness.into_iter().map(|s| SetId(s as u32)).collect(),
    ))
}

/// Smallest family covering at least `⌈(1 − λ) m⌉` elements, with the
/// lexicographically smallest witness among those of minimum size.
pub fn brute_force_setcover(
    inst: &CoverageInstance,
    max_outlier_fraction: f64,
    exec: Exec,
) -> Result<(usize, Vec<SetId>)> {
    let n = inst.n();
    let count = 1u128.checked_shl(n as u32).unwrap_or(u128::MAX);
    if count > SETCOVER_GUARD {
        return Err(Error::Guard {
            count,
            limit: SETCOVER_GUARD,
        });
    }
    if !(0.0..=1.0).contains(&max_outlier_fraction) {
        return Err(Error::param(format!(
            "outlier fraction {max_outlier_fraction} not in [0, 1]"
        )));
    }
    let m = inst.m();
    let allowed_uncovered = (max_outlier_fraction * m as f64 + 1e-9).floor() as usize;
    let need = m.saturating_sub(allowed_uncovered) as u32;
    if need == 0 {
        return Ok((0, Vec::new()));
    }
    let sets = Bitsets::new(inst);
    for size in 1..=n {
        let hit = exec.find_map_first(n - size + 1, |first| {
            let mut found = None;
            walk_from(&sets, n, size, first, |picked, value| {
                if value >= need {
                    found = Some(picked.to_vec());
                    true
                } else {
                    false
                }
            });
            found
        });
        if let Some(w) = hit {
            return Ok((size, w.into_iter().map(|s| SetId(s as u32)).collect()));
        }
    }
    Err(Error::Domain("no family reaches the required coverage"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_random;
    use crate::solvers::greedy::tests::inst;

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }

    #[test]
    fn kcover_hand_example() {
        let g = inst(3, 3, &[&[0, 1], &[1, 2], &[2]]);
        assert_eq!(
            brute_force_kcover(&g, 2, Exec::Sequential).unwrap(),
            (3, vec![SetId(0), SetId(1)])
        );
        let (v, w) = brute_force_kcover(&g, 3, Exec::Sequential).unwrap();
        assert_eq!((v, w.len()), (3, 3));
    }

    /// Subset-union table over all `2^n` masks, independent of the DFS walk.
    fn mask_dp_opt(g: &CoverageInstance, k: usize) -> (usize, u32) {
        let n = g.n();
        let words = Bitsets::new(g);
        let w = words.words;
        let mut table = vec![0u64; w << n];
        let mut best = (0usize, u32::MAX);
        for mask in 1u32..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = (mask & (mask - 1)) as usize;
            for j in 0..w {
                table[mask as usize * w + j] = table[rest * w + j] | words.row(low)[j];
            }
            if mask.count_ones() as usize == k {
                let v: usize = table[mask as usize * w..(mask as usize + 1) * w]
                    .iter()
                    .map(|x| x.count_ones() as usize)
                    .sum();
                // Smallest lexicographic subset = mask with the smallest
                // reversed bit order; compare sorted index lists instead.
                let better = v > best.0
                    || (v == best.0 && best.1 != u32::MAX && lex_less(mask, best.1));
                if best.1 == u32::MAX || better {
                    best = (v, mask);
                }
            }
        }
        best
    }

    fn lex_less(a: u32, b: u32) -> bool {
        let ids = |m: u32| (0..32).filter(|i| m >> i & 1 == 1).collect::<Vec<u32>>();
        ids(a) < ids(b)
    }

    #[test]
    fn kcover_matches_mask_dp() {
        for seed in 0..20 {
            let g = gen_random(10, 30, 0.2, seed).unwrap();
            let (v, w) = brute_force_kcover(&g, 3, Exec::Sequential).unwrap();
            let (dv, dmask) = mask_dp_opt(&g, 3);
            assert_eq!(v, dv);
            let wmask = w.iter().fold(0u32, |acc, s| acc | 1 << s.0);
            assert_eq!(wmask, dmask, "seed {seed}");
            assert_eq!(g.coverage(&w).unwrap(), v);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        for seed in 0..10 {
            let g = gen_random(11, 40, 0.15, seed).unwrap();
            for k in 1..5 {
                assert_eq!(
                    brute_force_kcover(&g, k, Exec::Sequential).unwrap(),
                    brute_force_kcover(&g, k, Exec::Parallel).unwrap()
                );
            }
            assert_eq!(
                brute_force_setcover(&g, 0.0, Exec::Sequential).unwrap(),
                brute_force_setcover(&g, 0.0, Exec::Parallel).unwrap()
            );
        }
    }

    #[test]
    fn guard_trips() {
        let g = gen_random(60, 5, 0.5, 1).unwrap();
        assert!(matches!(
            brute_force_kcover(&g, 30, Exec::Sequential),
            Err(Error::Guard { .. })
        ));
        assert!(matches!(
            brute_force_setcover(&g, 0.0, Exec::Sequential),
            Err(Error::Guard { .. })
        ));
    }

    #[test]
    fn setcover_partition_and_outliers() {
        let g = inst(3, 3, &[&[0], &[1], &[2]]);
        assert_eq!(brute_force_setcover(&g, 0.0, Exec::Sequential).unwrap().0, 3);
        assert_eq!(brute_force_setcover(&g, 1.0, Exec::Sequential).unwrap().0, 0);
        // 1/3 outliers allowed: two sets suffice.
        assert_eq!(
            brute_force_setcover(&g, 1.0 / 3.0, Exec::Sequential).unwrap(),
            (2, vec![SetId(0), SetId(1)])
        );
    }

    #[test]
    fn setcover_planted_upper_bound() {
        for seed in 0..20 {
            let p = crate::instance::gen_planted_cover(6, 12, 3, seed).unwrap();
            let (size, w) = brute_force_setcover(&p.instance, 0.0, Exec::Sequential).unwrap();
            assert!(size <= 3);
            assert_eq!(p.instance.coverage(&w).unwrap(), 12);
        }
    }
}
