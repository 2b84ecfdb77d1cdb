use serde::Serialize;

use crate::instance::SetId;
use crate::sketch::CoverageEstimate;

/// A chosen family of sets in pick order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub chosen: Vec<SetId>,
    /// Marginal gain of each pick on the graph the solver ran on.
    pub gains: Vec<usize>,
    /// Coverage of `chosen` on the graph the solver ran on.
    pub covered_on_target: usize,
    /// Element count of that graph.
    pub target_size: usize,
    /// Set when the solver ran on a sketch.
    pub estimate_on_g: Option<CoverageEstimate>,
}

impl Solution {
    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }
}
