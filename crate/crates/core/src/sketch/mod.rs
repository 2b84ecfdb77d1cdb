//! The degree-capped smallest-hash sketch and its builders.
//!
//! A sketch keeps the elements with the smallest hash values, each with at
//! most `degree_cap` incident sets, stopping at the shortest prefix (in hash
//! order) whose edge count reaches `edge_budget`. Its size depends on `n` and
//! the accuracy parameters only, never on the number of elements.

mod builder;
mod codec;
mod params;
mod subgraph;

pub use builder::{build_h_leq_n_offline, BuilderStats, StreamingSketchBuilder};
pub use codec::{read_sketch, write_sketch, SKETCH_MAGIC, SKETCH_VERSION};
pub use params::{delta_for, SketchParams, DEFAULT_M_HINT};
pub use subgraph::{build_hp, build_hp_prime, Subgraph};

use serde::Serialize;

use crate::error::Result;
use crate::hash::unit_interval;
use crate::instance::{union_size, Bipartite, ElementId, SetId};

/// A sampled element with its (capped, ascending) incident set ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetainedElement {
    pub element: ElementId,
    pub hash: u64,
    pub sets: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEstimate {
    pub raw: usize,
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sketch {
    params: SketchParams,
    seed: u64,
    retained: Vec<RetainedElement>,
    p_star: f64,
    total_edges: u64,
    by_set: Vec<Vec<u32>>,
}

impl Sketch {
    /// Builds a finalized sketch from elements sorted by `(hash, element)`,
    /// keeping the shortest prefix that reaches the edge budget.
    pub(crate) fn from_sorted(
        params: SketchParams,
        seed: u64,
        mut retained: Vec<RetainedElement>,
    ) -> Self {
        debug_assert!(retained
            .windows(2)
            .all(|w| (w[0].hash, w[0].element) < (w[1].hash, w[1].element)));
        let mut total = 0u64;
        let mut cut = None;
        for (i, r) in retained.iter().enumerate() {
            total += r.sets.len() as u64;
            if total >= params.edge_budget {
                cut = Some(i + 1);
                break;
            }
        }
        let p_star = match cut {
            Some(len) => {
                retained.truncate(len);
                unit_interval(retained[len - 1].hash)
            }
            None => 1.0,
        };
        Self::assemble(params, seed, retained, p_star)
    }

    pub(crate) fn assemble(
        params: SketchParams,
        seed: u64,
        retained: Vec<RetainedElement>,
        p_star: f64,
    ) -> Self {
        let mut by_set = vec![Vec::new(); params.n];
        let mut total_edges = 0;
        for (local, r) in retained.iter().enumerate() {
            total_edges += r.sets.len() as u64;
            for &s in &r.sets {
                by_set[s as usize].push(local as u32);
            }
        }
        Self {
            params,
            seed,
            retained,
            p_star,
            total_edges,
            by_set,
        }
    }

    pub fn params(&self) -> &SketchParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Retained elements in ascending hash order.
    pub fn retained(&self) -> &[RetainedElement] {
        &self.retained
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    pub fn total_edges(&self) -> u64 {
        self.total_edges
    }

    /// True when the whole capped stream stayed under the edge budget.
    pub fn is_full_retention(&self) -> bool {
        self.p_star == 1.0
    }

    /// Space in abstract units: one per retained set id and per element.
    pub fn space_units(&self) -> u64 {
        self.total_edges + self.retained.len() as u64
    }

    pub fn estimate_coverage(&self, family: &[SetId]) -> Result<CoverageEstimate> {
        let raw = union_size(self, family)?;
        Ok(CoverageEstimate {
            raw,
            scaled: raw as f64 / self.p_star,
        })
    }

    /// Same retained elements with the same degrees, ignoring which sets
    /// survived capping.
    pub fn same_support(&self, other: &Sketch) -> bool {
        self.p_star == other.p_star
            && self.retained.len() == other.retained.len()
            && self
                .retained
                .iter()
                .zip(&other.retained)
                .all(|(a, b)| a.element == b.element && a.sets.len() == b.sets.len())
    }
}

impl Bipartite for Sketch {
    fn set_count(&self) -> usize {
        self.params.n
    }

    fn element_count(&self) -> usize {
        self.retained.len()
    }

    fn members(&self, set: usize) -> &[u32] {
        &self.by_set[set]
    }
}
