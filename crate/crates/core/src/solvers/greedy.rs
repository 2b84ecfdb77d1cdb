//! Lazy greedy for maximum coverage and set cover.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::Solution;
use crate::instance::{Bipartite, SetId};

/// Greedy picks in order, lazily re-evaluating stale marginal gains.
///
/// Yields `(set, gain)` pairs. Ties go to the smallest set id, and once no
/// set adds anything the remaining sets come out in id order with gain 0, so
/// the sequence matches naive greedy exactly.
pub struct LazyGreedy<'a, G: ?Sized> {
    graph: &'a G,
    covered: Vec<bool>,
    heap: BinaryHeap<(usize, Reverse<u32>)>,
}

impl<'a, G: Bipartite + ?Sized> LazyGreedy<'a, G> {
    pub fn new(graph: &'a G) -> Self {
        let heap = (0..graph.set_count())
            .map(|s| (graph.members(s).len(), Reverse(s as u32)))
            .collect();
        Self {
            graph,
            covered: vec![false; graph.element_count()],
            heap,
        }
    }

    fn gain(&self, set: u32) -> usize {
        self.graph
            .members(set as usize)
            .iter()
            .filter(|&&e| !self.covered[e as usize])
            .count()
    }
}

impl<G: Bipartite + ?Sized> Iterator for LazyGreedy<'_, G> {
    type Item = (SetId, usize);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (stale, Reverse(set)) = self.heap.pop()?;
            let gain = self.gain(set);
            let key = (gain, Reverse(set));
            // Stale keys only overestimate, so beating the best stale key
            // means beating every true gain.
            if gain == stale || self.heap.peek().is_none_or(|top| key >= *top) {
                for &e in self.graph.members(set as usize) {
                    self.covered[e as usize] = true;
                }
                return Some((SetId(set), gain));
            }
            self.heap.push(key);
        }
    }
}

fn collect<G, I>(graph: &G, picks: I) -> Solution
where
    G: Bipartite + ?Sized,
    I: Iterator<Item = (SetId, usize)>,
{
    let (chosen, gains): (Vec<_>, Vec<_>) = picks.unzip();
    debug_assert!(gains.windows(2).all(|w| w[1] <= w[0]), "gains must not increase");
    Solution {
        covered_on_target: gains.iter().sum(),
        chosen,
        gains,
        target_size: graph.element_count(),
        estimate_on_g: None,
    }
}

/// `min(k, n)` greedy picks, padded with the smallest unused ids once gains
/// reach zero.
pub fn greedy_kcover<G: Bipartite + ?Sized>(graph: &G, k: usize) -> Solution {
    collect(graph, LazyGreedy::new(graph).take(k))
}

/// Greedy until every coverable element is covered.
pub fn greedy_set_cover<G: Bipartite + ?Sized>(graph: &G) -> Solution {
    collect(graph, LazyGreedy::new(graph).take_while(|&(_, gain)| gain > 0))
}
