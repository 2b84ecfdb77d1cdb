use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{RetainedElement, Sketch, SketchParams};
use crate::error::{Error, Result};
use crate::hash::HashAssignment;
use crate::instance::{CoverageInstance, EdgeRecord, ElementId};

/// Admits elements in increasing hash order, each with its `degree_cap`
/// smallest set ids, until the edge budget is reached.
pub fn build_h_leq_n_offline(inst: &CoverageInstance, params: SketchParams, seed: u64) -> Sketch {
    let hasher = HashAssignment::new(seed);
    let mut order: Vec<(u64, u32)> = (0..inst.m() as u32)
        .filter(|&e| inst.degree(ElementId(e)) > 0)
        .map(|e| (hasher.raw(e), e))
        .collect();
    order.sort_unstable();

    let cap = params.degree_cap.min(usize::MAX as u64) as usize;
    let mut retained = Vec::new();
    let mut total = 0u64;
    for (hash, e) in order {
        let sets = inst.element_sets(ElementId(e));
        let kept = sets[..sets.len().min(cap)].to_vec();
        total += kept.len() as u64;
        retained.push(RetainedElement {
            element: ElementId(e),
            hash,
            sets: kept,
        });
        if total >= params.edge_budget {
            break;
        }
    }
    Sketch::from_sorted(params, seed, retained)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BuilderStats {
    pub updates: u64,
    pub accepted_edges: u64,
    pub evictions: u64,
    pub peak_edges: u64,
    pub peak_elements: usize,
}

#[derive(Debug, Clone)]
struct Slot {
    hash: u64,
    sets: Vec<u32>,
}

/// One-pass builder for the sketch over an edge-arrival stream.
///
/// Keeps the smallest-hash elements seen so far. Whenever the retained edge
/// count exceeds `edge_budget + degree_cap`, the largest-hash element is
/// evicted and its `(hash, id)` becomes a rejection threshold: later edges of
/// any element at or above it are dropped, so evicted elements never return.
/// Each element accepts at most `degree_cap` distinct sets, in arrival order.
#[derive(Debug, Clone)]
pub struct StreamingSketchBuilder {
    params: SketchParams,
    hasher: HashAssignment,
    slots: HashMap<u32, Slot>,
    order: BTreeSet<(u64, u32)>,
    threshold: Option<(u64, u32)>,
    total_edges: u64,
    stats: BuilderStats,
    finalized: bool,
}

impl StreamingSketchBuilder {
    pub fn new(params: SketchParams, seed: u64) -> Self {
        Self {
            params,
            hasher: HashAssignment::new(seed),
            slots: HashMap::new(),
            order: BTreeSet::new(),
            threshold: None,
            total_edges: 0,
            stats: BuilderStats::default(),
            finalized: false,
        }
    }

    pub fn params(&self) -> &SketchParams {
        &self.params
    }

    pub fn stats(&self) -> BuilderStats {
        self.stats
    }

    pub fn retained_edges(&self) -> u64 {
        self.total_edges
    }

    pub fn update(&mut self, edge: EdgeRecord) -> Result<()> {
        if self.finalized {
            return Err(Error::State("update after finalize"));
        }
        if edge.set.index() >= self.params.n {
            return Err(Error::Range {
                what: "set id",
                value: edge.set.0 as u64,
                bound: self.params.n as u64,
            });
        }
        self.stats.updates += 1;
        let e = edge.element.0;
        if !self.slots.contains_key(&e) {
            let hash = self.hasher.raw(e);
            if self.threshold.is_some_and(|t| (hash, e) >= t) {
                return Ok(());
            }
            self.order.insert((hash, e));
            self.slots.insert(
                e,
                Slot {
                    hash,
                    sets: Vec::new(),
                },
            );
        }
        let slot = self.slots.get_mut(&e).expect("inserted above");
        let set = edge.set.0;
        match slot.sets.binary_search(&set) {
            Ok(_) => return Ok(()),
            Err(_) if slot.sets.len() as u64 >= self.params.degree_cap => return Ok(()),
            Err(pos) => slot.sets.insert(pos, set),
        }
        self.total_edges += 1;
        self.stats.accepted_edges += 1;

        while self.total_edges > self.params.working_bound() {
            let (hash, victim) = self.order.pop_last().expect("edges imply a retained element");
            let slot = self.slots.remove(&victim).expect("order and slots agree");
            self.total_edges -= slot.sets.len() as u64;
            self.threshold = Some((hash, victim));
            self.stats.evictions += 1;
        }
        self.stats.peak_edges = self.stats.peak_edges.max(self.total_edges);
        self.stats.peak_elements = self.stats.peak_elements.max(self.slots.len());
        Ok(())
    }

    /// Feeds a whole stream, stopping at the first error.
    pub fn extend<I>(&mut self, edges: I) -> Result<()>
    where
        I: IntoIterator<Item = Result<EdgeRecord>>,
    {
        for edge in edges {
            self.update(edge?)?;
        }
        Ok(())
    }

    pub fn finalize(&mut self) -> Result<Sketch> {
        if self.finalized {
            return Err(Error::State("finalize called twice"));
        }
        self.finalized = true;
        let mut slots = std::mem::take(&mut self.slots);
        let retained = std::mem::take(&mut self.order)
            .into_iter()
            .map(|(hash, e)| {
                let slot = slots.remove(&e).expect("order and slots agree");
                debug_assert_eq!(slot.hash, hash);
                RetainedElement {
                    element: ElementId(e),
                    hash,
                    sets: slot.sets,
                }
            })
            .collect();
        Ok(Sketch::from_sorted(self.params, self.hasher.seed(), retained))
    }
}
