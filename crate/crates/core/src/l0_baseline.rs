//! Per-set distinct-count sketches and the enumeration k-cover built on them.
//!
//! Each set keeps a bottom-`t` (k-minimum-values) sketch of its elements; the
//! union of any family is estimated by merging. Space grows with `n · t`, and
//! `t` must grow with `ln C(n, k)` for the union bound over all candidate
//! families, which is the `n · k` dependence this baseline illustrates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hash::{derive_seed, keyed_hash, unit_interval};
use crate::instance::{EdgeRecord, ElementId, SetId};
use crate::solvers::binomial;

pub const L0_KCOVER_GUARD: u128 = 1_000_000;

/// Mergeable union-size estimator.
pub trait UnionSketch: Clone + Send + Sync {
    fn merge(&self, other: &Self) -> Result<Self>;
    fn estimate(&self) -> f64;
    /// Retained hashes.
    fn space_units(&self) -> usize;
}

/// Bottom-`t` sketch: the `t` smallest distinct element hashes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctSketch {
    capacity: usize,
    seed: u64,
    mins: Vec<u64>,
}

impl DistinctSketch {
    pub fn new(capacity: usize, seed: u64) -> Result<Self> {
        if capacity < 2 {
            return Err(Error::param("distinct sketch capacity must be >= 2"));
        }
        Ok(Self {
            capacity,
            seed,
            mins: Vec::new(),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mins(&self) -> &[u64] {
        &self.mins
    }

    pub fn insert(&mut self, element: ElementId) {
        self.insert_hash(keyed_hash(self.seed, element.0 as u64));
    }

    fn insert_hash(&mut self, h: u64) {
        if self.mins.len() == self.capacity && h >= *self.mins.last().expect("full") {
            return;
        }
        if let Err(pos) = self.mins.binary_search(&h) {
            self.mins.insert(pos, h);
            self.mins.truncate(self.capacity);
        }
    }

    /// Little-endian `capacity: u32, seed: u64, len: u32, mins: [u64; len]`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.mins.len());
        out.extend_from_slice(&(self.capacity as u32).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.mins.len() as u32).to_le_bytes());
        for h in &self.mins {
            out.extend_from_slice(&h.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Format(m.to_string());
        if bytes.len() < 16 {
            return Err(bad("distinct sketch header truncated"));
        }
        let capacity = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
        let seed = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
        let len = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        if bytes.len() != 16 + 8 * len {
            return Err(bad("distinct sketch length mismatch"));
        }
        if len > capacity {
            return Err(bad("more hashes than capacity"));
        }
        let mins: Vec<u64> = bytes[16..]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if mins.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("hashes not strictly increasing"));
        }
        let mut sk = Self::new(capacity, seed)?;
        sk.mins = mins;
        Ok(sk)
    }
}

impl UnionSketch for DistinctSketch {
    fn merge(&self, other: &Self) -> Result<Self> {
        if self.capacity != other.capacity {
            return Err(Error::Incompatible("capacity mismatch"));
        }
        if self.seed != other.seed {
            return Err(Error::Incompatible("seed mismatch"));
        }
        let mut mins = Vec::with_capacity(self.capacity);
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.mins, &other.mins);
        while mins.len() < self.capacity && (i < a.len() || j < b.len()) {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(_), Some(&y)) => {
                    j += 1;
                    y
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            mins.push(next);
        }
        Ok(Self {
            capacity: self.capacity,
            seed: self.seed,
            mins,
        })
    }

    /// Exact below capacity, otherwise `(t − 1) / U_(t)` with `U_(t)` the
    /// `t`-th smallest hash mapped to `(0, 1)`.
    fn estimate(&self) -> f64 {
        if self.mins.len() < self.capacity {
            return self.mins.len() as f64;
        }
        let kth = self.mins[self.capacity - 1];
        let u = unit_interval(kth).max(f64::MIN_POSITIVE);
        (self.capacity - 1) as f64 / u
    }

    fn space_units(&self) -> usize {
        self.mins.len()
    }
}

/// Sketch size for a target relative error `eps` and failure rate `delta`:
/// capacity `⌈4/ε²⌉`, repeated `⌈ln(1/δ)⌉` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DistinctParams {
    pub capacity: usize,
    pub repetitions: usize,
}

impl DistinctParams {
    pub fn from_accuracy(eps: f64, delta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param(format!("eps {eps} not in (0, 1)")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!("delta {delta} not in (0, 1)")));
        }
        Ok(Self {
            capacity: ((4.0 / (eps * eps)).ceil() as usize).max(2),
            repetitions: ((1.0 / delta).ln().ceil() as usize).max(1),
        })
    }

    /// Failure rate `1 / C(n, k)` so that every candidate family is accurate
    /// simultaneously.
    pub fn for_kcover(n: usize, k: usize, eps: f64) -> Result<Self> {
        let families = binomial(n, k).max(2) as f64;
        Self::from_accuracy(eps, 1.0 / families)
    }
}

/// Independent bottom-`t` sketches combined by the median estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatedDistinctSketch {
    reps: Vec<DistinctSketch>,
}

impl RepeatedDistinctSketch {
    pub fn new(params: DistinctParams, seed: u64) -> Result<Self> {
        let reps = (0..params.repetitions)
            .map(|i| DistinctSketch::new(params.capacity, derive_seed(seed, i as u64)))
            .collect::<Result<_>>()?;
        Ok(Self { reps })
    }

    pub fn insert(&mut self, element: ElementId) {
        for r in &mut self.reps {
            r.insert(element);
        }
    }

    pub fn repetitions(&self) -> &[DistinctSketch] {
        &self.reps
    }
}

impl UnionSketch for RepeatedDistinctSketch {
    fn merge(&self, other: &Self) -> Result<Self> {
        if self.reps.len() != other.reps.len() {
            return Err(Error::Incompatible("repetition count mismatch"));
        }
        let reps = self
            .reps
            .iter()
            .zip(&other.reps)
            .map(|(a, b)| a.merge(b))
            .collect::<Result<_>>()?;
        Ok(Self { reps })
    }

    fn estimate(&self) -> f64 {
        let mut est: Vec<f64> = self.reps.iter().map(UnionSketch::estimate).collect();
        est.sort_by(f64::total_cmp);
        let mid = est.len() / 2;
        if est.len() % 2 == 1 {
            est[mid]
        } else {
            (est[mid - 1] + est[mid]) / 2.0
        }
    }

    fn space_units(&self) -> usize {
        self.reps.iter().map(UnionSketch::space_units).sum()
    }
}

/// One sketch per set, filled from an edge stream.
pub fn sketch_sets<S, I, F>(n: usize, edges: I, make: F, mut insert: impl FnMut(&mut S, ElementId)) -> Result<Vec<S>>
where
    I: IntoIterator<Item = Result<EdgeRecord>>,
    F: Fn() -> Result<S>,
{
    let mut sketches = (0..n).map(|_| make()).collect::<Result<Vec<_>>>()?;
    for edge in edges {
        let edge = edge?;
        let slot = sketches.get_mut(edge.set.index()).ok_or(Error::Range {
            what: "set id",
            value: edge.set.0 as u64,
            bound: n as u64,
        })?;
        insert(slot, edge.element);
    }
    Ok(sketches)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L0Solution {
    pub chosen: Vec<SetId>,
    pub estimate: f64,
    pub space_units: usize,
}

fn best_from<S: UnionSketch>(sketches: &[S], k: usize, first: usize) -> Result<Option<(f64, Vec<usize>)>> {
    fn go<S: UnionSketch>(
        sketches: &[S],
        k: usize,
        picked: &mut Vec<usize>,
        merged: &S,
        best: &mut Option<(f64, Vec<usize>)>,
    ) -> Result<()> {
        if picked.len() == k {
            let est = merged.estimate();
            if best.as_ref().is_none_or(|(b, _)| est > *b) {
                *best = Some((est, picked.clone()));
            }
            return Ok(());
        }
        let start = picked.last().map_or(0, |&s| s + 1);
        let remaining = k - picked.len();
        for s in start..=sketches.len() - remaining {
            let next = merged.merge(&sketches[s])?;
            picked.push(s);
            go(sketches, k, picked, &next, best)?;
            picked.pop();
        }
        Ok(())
    }
    let mut best = None;
    let mut picked = vec![first];
    go(sketches, k, &mut picked, &sketches[first], &mut best)?;
    Ok(best)
}

/// Enumerates every `k`-subset, estimates its union by merging, and returns
/// the best estimate; ties go to the lexicographically smallest subset.
pub fn kcover_via_l0<S: UnionSketch>(sketches: &[S], k: usize, exec: Exec) -> Result<L0Solution> {
    let n = sketches.len();
    let k = k.min(n);
    let count = binomial(n, k);
    if count > L0_KCOVER_GUARD {
        return Err(Error::Guard {
            count,
            limit: L0_KCOVER_GUARD,
        });
    }
    let space_units = sketches.iter().map(UnionSketch::space_units).sum();
    if k == 0 {
        return Ok(L0Solution {
            chosen: Vec::new(),
            estimate: 0.0,
            space_units,
        });
    }
    let per_first = exec.map_range(n - k + 1, |first| best_from(sketches, k, first));
    let mut best: Option<(f64, Vec<usize>)> = None;
    for cand in per_first {
        if let Some(c) = cand? {
            if best.as_ref().is_none_or(|(b, _)| c.0 > *b) {
                best = Some(c);
            }
        }
    }
    let (estimate, chosen) = best.expect("at least one subset");
    Ok(L0Solution {
        chosen: chosen.into_iter().map(|s| SetId(s as u32)).collect(),
        estimate,
        space_units,
    })
}
