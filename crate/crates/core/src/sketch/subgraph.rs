//! Fixed-threshold subsampled views of an instance.

use crate::hash::HashAssignment;
use crate::instance::{Bipartite, CoverageInstance, ElementId, SetId};

/// Induced subgraph on a subset of elements, keeping all sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    n: usize,
    elements: Vec<ElementId>,
    adjacency: Vec<Vec<u32>>,
    by_set: Vec<Vec<u32>>,
}

impl Subgraph {
    fn new(n: usize, rows: Vec<(ElementId, Vec<u32>)>) -> Self {
        let mut by_set = vec![Vec::new(); n];
        let mut elements = Vec::with_capacity(rows.len());
        let mut adjacency = Vec::with_capacity(rows.len());
        for (local, (element, sets)) in rows.into_iter().enumerate() {
            for &s in &sets {
                by_set[s as usize].push(local as u32);
            }
            elements.push(element);
            adjacency.push(sets);
        }
        Self {
            n,
            elements,
            adjacency,
            by_set,
        }
    }

    /// Retained element ids, ascending.
    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn incident_sets(&self, local: usize) -> &[u32] {
        &self.adjacency[local]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `|Γ(H, S)|`.
    pub fn coverage(&self, family: &[SetId]) -> crate::Result<usize> {
        crate::instance::union_size(self, family)
    }
}

impl Bipartite for Subgraph {
    fn set_count(&self) -> usize {
        self.n
    }

    fn element_count(&self) -> usize {
        self.elements.len()
    }

    fn members(&self, set: usize) -> &[u32] {
        &self.by_set[set]
    }
}

/// Elements whose hash value is at most `p`, with all their edges. `p <= 0`
/// keeps nothing.
pub fn build_hp(inst: &CoverageInstance, p: f64, seed: u64) -> Subgraph {
    let hasher = HashAssignment::new(seed);
    let rows = (0..inst.m() as u32)
        .filter(|&e| p > 0.0 && hasher.value(e) <= p)
        .map(|e| (ElementId(e), inst.element_sets(ElementId(e)).to_vec()))
        .collect();
    Subgraph::new(inst.n(), rows)
}

/// Caps every element at its `degree_cap` smallest set ids.
pub fn build_hp_prime(hp: &Subgraph, degree_cap: usize) -> Subgraph {
    let rows = hp
        .elements
        .iter()
        .zip(&hp.adjacency)
        .map(|(&e, sets)| (e, sets[..sets.len().min(degree_cap)].to_vec()))
        .collect();
    Subgraph::new(hp.n, rows)
}
