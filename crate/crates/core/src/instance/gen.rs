//! Seeded instance generators.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CoverageInstance, EdgeRecord, SetId};
use crate::error::{Error, Result};

/// Attaches every element that no set contains to one uniformly chosen set.
pub fn normalize(n: usize, m: usize, edges: Vec<EdgeRecord>, seed: u64) -> Result<CoverageInstance> {
    if n == 0 && m > 0 {
        return Err(Error::param("cannot normalize elements without any set"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = CoverageInstance::from_edges_unchecked(n, m, edges)?;
    Ok(attach_isolated(inst.sets, m, &mut rng))
}

fn attach_isolated(mut sets: Vec<Vec<u32>>, m: usize, rng: &mut ChaCha8Rng) -> CoverageInstance {
    let mut covered = vec![false; m];
    for list in &sets {
        for &e in list {
            covered[e as usize] = true;
        }
    }
    let n = sets.len();
    for (e, _) in covered.iter().enumerate().filter(|(_, c)| !**c) {
        sets[rng.gen_range(0..n)].push(e as u32);
    }
    CoverageInstance::from_set_lists(sets, m)
}

/// Each `(set, element)` pair present independently with probability
/// `density`, then normalized.
pub fn gen_random(n: usize, m: usize, density: f64, seed: u64) -> Result<CoverageInstance> {
    if n == 0 || m == 0 {
        return Err(Error::param("gen_random needs n, m >= 1"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::param(format!("density {density} not in (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = vec![Vec::new(); n];
    for list in sets.iter_mut() {
        for e in 0..m as u32 {
            if rng.gen_bool(density) {
                list.push(e);
            }
        }
    }
    Ok(attach_isolated(sets, m, &mut rng))
}

/// An instance with a known set cover of size `planted.len()`.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub instance: CoverageInstance,
    pub planted: Vec<SetId>,
}

/// `k_star` planted sets partition the ground set into non-empty blocks; the
/// other sets are random strict subsets of one block each.
pub fn gen_planted_cover(n: usize, m: usize, k_star: usize, seed: u64) -> Result<PlantedInstance> {
    if k_star == 0 || k_star > n {
        return Err(Error::Range {
            what: "k_star",
            value: k_star as u64,
            bound: n as u64 + 1,
        });
    }
    if m < k_star {
        return Err(Error::param(format!(
            "cannot partition {m} elements into {k_star} non-empty blocks"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..m as u32).collect();
    order.shuffle(&mut rng);
    let mut cuts: Vec<usize> = index::sample(&mut rng, m - 1, k_star - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(m);
    let mut blocks = Vec::with_capacity(k_star);
    let mut start = 0;
    for &end in &cuts {
        blocks.push(order[start..end].to_vec());
        start = end;
    }

    let mut planted: Vec<usize> = index::sample(&mut rng, n, k_star).into_vec();
    planted.sort_unstable();
    let mut sets = vec![Vec::new(); n];
    for (block, &s) in blocks.iter().zip(&planted) {
        sets[s] = block.clone();
    }
    for (s, list) in sets.iter_mut().enumerate() {
        if planted.binary_search(&s).is_ok() {
            continue;
        }
        let block = &blocks[rng.gen_range(0..k_star)];
        let mut subset: Vec<u32> = block.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if subset.len() == block.len() {
            subset.swap_remove(rng.gen_range(0..subset.len()));
        }
        *list = subset;
    }
    Ok(PlantedInstance {
        instance: CoverageInstance::from_set_lists(sets, m),
        planted: planted.into_iter().map(|s| SetId(s as u32)).collect(),
    })
}

/// Two-element instance encoding a set-disjointness input: set `i` (1-based
/// in `a`/`b`, stored as id `i - 1`) contains element 0 iff `i ∈ a` and
/// element 1 iff `i ∈ b`.
pub fn gen_disjointness(n: usize, a: &[u32], b: &[u32]) -> Result<CoverageInstance> {
    let edges = disjointness_stream(n, a, b)?;
    CoverageInstance::from_edges(n, 2, edges)
}

/// The disjointness stream: every edge of element 0 first, then those of
/// element 1.
pub fn disjointness_stream(n: usize, a: &[u32], b: &[u32]) -> Result<Vec<EdgeRecord>> {
    if n == 0 {
        return Err(Error::param("disjointness instance needs n >= 1"));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::param(
            "both sides must be non-empty (an empty side leaves an isolated element)",
        ));
    }
    let mut edges = Vec::with_capacity(a.len() + b.len());
    for (element, side) in [(0u32, a), (1u32, b)] {
        let mut ids = side.to_vec();
        ids.sort_unstable();
        ids.dedup();
        for i in ids {
            if i == 0 || i as usize > n {
                return Err(Error::Range {
                    what: "disjointness index",
                    value: i as u64,
                    bound: n as u64 + 1,
                });
            }
            edges.push(EdgeRecord::new(i - 1, element));
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_dense_set_covers_all() {
        let inst = gen_random(1, 3, 1.0, 42).unwrap();
        assert_eq!(inst.set_members(SetId(0)), &[0, 1, 2]);
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(gen_random(5, 10, 0.3, 7).unwrap(), gen_random(5, 10, 0.3, 7).unwrap());
        assert_ne!(gen_random(5, 10, 0.3, 7).unwrap(), gen_random(5, 10, 0.3, 8).unwrap());
    }

    #[test]
    fn random_edge_count_matches_regeneration() {
        // Replays the generator's draw sequence by hand.
        let (n, m, p, seed) = (5usize, 10usize, 0.3, 7u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hit = vec![false; m];
        let mut edges = 0;
        for _ in 0..n {
            for e in 0..m {
                if rng.gen_bool(p) {
                    edges += 1;
                    hit[e] = true;
                }
            }
        }
        edges += hit.iter().filter(|h| !**h).count();
        assert_eq!(gen_random(n, m, p, seed).unwrap().edge_count(), edges);
    }

    #[test]
    fn random_rejects_bad_density() {
        assert!(gen_random(2, 2, 0.0, 1).is_err());
        assert!(gen_random(2, 2, 1.5, 1).is_err());
    }

    #[test]
    fn planted_pair_covers() {
        let p = gen_planted_cover(4, 8, 2, 3).unwrap();
        assert_eq!(p.planted.len(), 2);
        assert_eq!(p.instance.coverage(&p.planted).unwrap(), 8);
    }

    #[test]
    fn planted_singletons_when_forced() {
        let p = gen_planted_cover(3, 3, 3, 1).unwrap();
        for &s in &p.planted {
            assert_eq!(p.instance.set_members(s).len(), 1);
        }
        assert_eq!(p.instance.coverage(&p.planted).unwrap(), 3);
    }

    #[test]
    fn planted_others_are_strict_subsets_of_a_block() {
        let p = gen_planted_cover(9, 30, 3, 11).unwrap();
        let inst = &p.instance;
        for s in inst.all_sets() {
            if p.planted.contains(&s) {
                continue;
            }
            let members = inst.set_members(s);
            let inside = p.planted.iter().any(|&b| {
                let block = inst.set_members(b);
                members.len() < block.len() && members.iter().all(|e| block.contains(e))
            });
            assert!(inside, "set {s:?} is not a strict subset of any block");
        }
    }

    #[test]
    fn planted_rejects_k_over_n() {
        assert!(matches!(gen_planted_cover(2, 5, 3, 0), Err(Error::Range { .. })));
    }

    #[test]
    fn disjointness_layout() {
        let edges = disjointness_stream(3, &[3, 1], &[2]).unwrap();
        assert_eq!(
            edges,
            vec![EdgeRecord::new(0, 0), EdgeRecord::new(2, 0), EdgeRecord::new(1, 1)]
        );
        assert!(gen_disjointness(2, &[], &[1]).is_err());
        assert!(gen_disjointness(2, &[3], &[1]).is_err());
    }

    #[test]
    fn normalize_attaches_isolated() {
        let inst = normalize(3, 4, vec![EdgeRecord::new(0, 0)], 5).unwrap();
        assert!((0..4).all(|e| inst.degree(crate::instance::ElementId(e)) >= 1));
    }
}
