use super::Solution;
use crate::error::{Error, Result};
use crate::instance::{Bipartite, SetId};

/// Descending-threshold greedy: sweeps `w` from the largest single-set
/// coverage `d` down to `(eps/n) d` by factors of `1 - eps`, adding every set
/// (in id order) whose marginal gain reaches `w` while fewer than `k` are
/// chosen.
pub fn threshold_greedy<G: Bipartite + ?Sized>(graph: &G, k: usize, eps: f64) -> Result<Solution> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps' {eps} not in (0, 1)")));
    }
    let n = graph.set_count();
    let mut covered = vec![false; graph.element_count()];
    let mut used = vec![false; n];
    let mut chosen = Vec::new();
    let mut gains = Vec::new();
    let d = (0..n).map(|s| graph.members(s).len()).max().unwrap_or(0) as f64;
    if d > 0.0 {
        let floor = eps / n as f64 * d;
        let mut w = d;
        while w >= floor && chosen.len() < k {
            for s in 0..n {
                if chosen.len() >= k {
                    break;
                }
                if used[s] {
                    continue;
                }
                let gain = graph
                    .members(s)
                    .iter()
                    .filter(|&&e| !covered[e as usize])
                    .count();
                if gain as f64 >= w {
                    used[s] = true;
                    for &e in graph.members(s) {
                        covered[e as usize] = true;
                    }
                    chosen.push(SetId(s as u32));
                    gains.push(gain);
                }
            }
            w *= 1.0 - eps;
        }
    }
    Ok(Solution {
        covered_on_target: gains.iter().sum(),
        chosen,
        gains,
        target_size: graph.element_count(),
        estimate_on_g: None,
    })
}
