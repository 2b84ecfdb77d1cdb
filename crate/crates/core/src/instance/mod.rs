//! The coverage problem data model: sets, elements and their bipartite
//! membership graph.

mod gen;
mod io;
mod remap;

pub use gen::{
    disjointness_stream, gen_disjointness, gen_planted_cover, gen_random, normalize, PlantedInstance,
};
pub use io::{
    load_edges, write_edges, BinaryEdgeReader, EdgeFormat, InstanceMeta, TextEdgeReader,
};
pub use remap::IdRemapper;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl SetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One `(set, element)` membership pair as it arrives on a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRecord {
    pub set: SetId,
    pub element: ElementId,
}

impl EdgeRecord {
    pub fn new(set: u32, element: u32) -> Self {
        Self {
            set: SetId(set),
            element: ElementId(element),
        }
    }
}

/// Read access to a bipartite set/element graph.
///
/// Element indices returned by [`members`](Bipartite::members) are local to
/// the graph and lie in `0..element_count()`.
pub trait Bipartite {
    fn set_count(&self) -> usize;
    fn element_count(&self) -> usize;
    fn members(&self, set: usize) -> &[u32];
}

/// Number of distinct elements adjacent to `family`.
pub fn union_size<G: Bipartite + ?Sized>(graph: &G, family: &[SetId]) -> Result<usize> {
    let mut seen = vec![false; graph.element_count()];
    let mut count = 0;
    for &s in family {
        if s.index() >= graph.set_count() {
            return Err(Error::Range {
                what: "set id",
                value: s.0 as u64,
                bound: graph.set_count() as u64,
            });
        }
        for &e in graph.members(s.index()) {
            let slot = &mut seen[e as usize];
            if !*slot {
                *slot = true;
                count += 1;
            }
        }
    }
    Ok(count)
}

/// In-memory bipartite graph between `n` sets and `m` elements.
///
/// Both adjacency directions are sorted and duplicate-free, and every element
/// belongs to at least one set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageInstance {
    sets: Vec<Vec<u32>>,
    elements: Vec<Vec<u32>>,
}

impl CoverageInstance {
    /// Builds an instance from edges, tolerating duplicates. Rejects
    /// out-of-range ids and elements that no set contains.
    pub fn from_edges<I>(n: usize, m: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = EdgeRecord>,
    {
        let inst = Self::from_edges_unchecked(n, m, edges)?;
        if let Some(e) = inst.elements.iter().position(Vec::is_empty) {
            return Err(Error::IsolatedElement(e as u32));
        }
        Ok(inst)
    }

    pub(crate) fn from_edges_unchecked<I>(n: usize, m: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = EdgeRecord>,
    {
        let mut sets = vec![Vec::new(); n];
        for edge in edges {
            check_edge(edge, n, m)?;
            sets[edge.set.index()].push(edge.element.0);
        }
        Ok(Self::from_set_lists(sets, m))
    }

    pub(crate) fn from_set_lists(mut sets: Vec<Vec<u32>>, m: usize) -> Self {
        let mut elements = vec![Vec::new(); m];
        for (s, list) in sets.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            for &e in list.iter() {
                elements[e as usize].push(s as u32);
            }
        }
        Self { sets, elements }
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn m(&self) -> usize {
        self.elements.len()
    }

    pub fn edge_count(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn set_members(&self, set: SetId) -> &[u32] {
        &self.sets[set.index()]
    }

    pub fn element_sets(&self, element: ElementId) -> &[u32] {
        &self.elements[element.index()]
    }

    pub fn degree(&self, element: ElementId) -> usize {
        self.elements[element.index()].len()
    }

    /// Edges in set-major order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRecord> + '_ {
        self.sets
            .iter()
            .enumerate()
            .flat_map(|(s, list)| list.iter().map(move |&e| EdgeRecord::new(s as u32, e)))
    }

    pub fn all_sets(&self) -> Vec<SetId> {
        (0..self.n() as u32).map(SetId).collect()
    }

    /// `|⋃ S|` for the family `S`.
    pub fn coverage(&self, family: &[SetId]) -> Result<usize> {
        union_size(self, family)
    }

    pub fn meta(&self) -> InstanceMeta {
        InstanceMeta {
            n: self.n() as u64,
            m: self.m() as u64,
            edge_count: self.edge_count() as u64,
        }
    }
}

impl Bipartite for CoverageInstance {
    fn set_count(&self) -> usize {
        self.sets.len()
    }

    fn element_count(&self) -> usize {
        self.elements.len()
    }

    fn members(&self, set: usize) -> &[u32] {
        &self.sets[set]
    }
}

pub(crate) fn check_edge(edge: EdgeRecord, n: usize, m: usize) -> Result<()> {
    if edge.set.index() >= n {
        return Err(Error::Range {
            what: "set id",
            value: edge.set.0 as u64,
            bound: n as u64,
        });
    }
    if edge.element.index() >= m {
        return Err(Error::Range {
            what: "element id",
            value: edge.element.0 as u64,
            bound: m as u64,
        });
    }
    Ok(())
}
