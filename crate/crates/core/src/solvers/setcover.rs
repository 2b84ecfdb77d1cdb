//! Set cover with outliers through sketch-backed greedy, and its multi-pass
//! extension to full set cover.

use serde::Serialize;

use super::{greedy_kcover, greedy_set_cover, Solution};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hash::derive_seed;
use crate::instance::{Bipartite, CoverageInstance, EdgeRecord, IdRemapper, SetId};
use crate::sketch::{SketchParams, StreamingSketchBuilder};
use crate::source::{EdgeSource, EdgeStream};

/// Parameters of one sketch-and-greedy attempt at a guessed cover size `k'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubmoduleConfig {
    pub k_prime: f64,
    pub eps_prime: f64,
    pub lambda_prime: f64,
    pub c_prime: f64,
}

impl SubmoduleConfig {
    fn validate(&self) -> Result<()> {
        if !(self.k_prime >= 1.0 && self.k_prime.is_finite()) {
            return Err(Error::param(format!("k' = {} must be >= 1", self.k_prime)));
        }
        if !(self.eps_prime > 0.0 && self.eps_prime <= 1.0) {
            return Err(Error::param(format!("eps' = {} not in (0, 1]", self.eps_prime)));
        }
        if !(self.lambda_prime > 0.0 && self.lambda_prime <= (-1.0f64).exp()) {
            return Err(Error::param(format!("lambda' = {} not in (0, 1/e]", self.lambda_prime)));
        }
        if !(self.c_prime >= 1.0) {
            return Err(Error::param(format!("C' = {} must be >= 1", self.c_prime)));
        }
        Ok(())
    }

    pub fn log_inv_lambda(&self) -> f64 {
        (1.0 / self.lambda_prime).ln()
    }

    /// Sketch accuracy `eps' / (13 ln(1/λ'))`.
    pub fn inner_eps(&self) -> f64 {
        self.eps_prime / (13.0 * self.log_inv_lambda())
    }

    /// Greedy picks `⌈k' ln(1/λ')⌉`.
    pub fn picks(&self) -> usize {
        (self.k_prime * self.log_inv_lambda()).ceil() as usize
    }

    /// Minimum covered fraction of retained elements for acceptance.
    pub fn accept_fraction(&self) -> f64 {
        1.0 - self.lambda_prime - self.inner_eps() * self.log_inv_lambda()
    }

    pub fn sketch_params(&self, n: usize, m_hint: Option<u64>) -> Result<SketchParams> {
        self.validate()?;
        let eps = self.inner_eps();
        let log_base = (n as f64).ln() / (1.0 + eps).ln();
        let delta2 = (log_base.ceil() * ((self.c_prime * n as f64).ln() + 2.0)).max(1.0);
        SketchParams::new(n, self.picks().max(1), eps, delta2, m_hint)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmoduleResult {
    pub k_prime: f64,
    /// `None` means the attempt was rejected.
    pub solution: Option<Solution>,
    pub covered: usize,
    pub retained: usize,
    pub sketch_edges: u64,
}

/// A streaming submodule: feed edges, then [`finish`](Self::finish).
#[derive(Debug, Clone)]
pub struct SetCoverSubmodule {
    cfg: SubmoduleConfig,
    builder: StreamingSketchBuilder,
}

impl SetCoverSubmodule {
    pub fn new(n: usize, m_hint: Option<u64>, cfg: SubmoduleConfig, seed: u64) -> Result<Self> {
        let params = cfg.sketch_params(n, m_hint)?;
        Ok(Self {
            cfg,
            builder: StreamingSketchBuilder::new(params, seed),
        })
    }

    pub fn update(&mut self, edge: EdgeRecord) -> Result<()> {
        self.builder.update(edge)
    }

    /// Greedy on the sketch; accepts if the picks cover at least
    /// [`accept_fraction`](SubmoduleConfig::accept_fraction) of the retained
    /// elements.
    pub fn finish(mut self) -> Result<SubmoduleResult> {
        let sketch = self.builder.finalize()?;
        let mut sol = greedy_kcover(&sketch, self.cfg.picks());
        sol.estimate_on_g = Some(sketch.estimate_coverage(&sol.chosen)?);
        let retained = sketch.element_count();
        let covered = sol.covered_on_target;
        let accepted = covered as f64 >= self.cfg.accept_fraction() * retained as f64;
        Ok(SubmoduleResult {
            k_prime: self.cfg.k_prime,
            solution: accepted.then_some(sol),
            covered,
            retained,
            sketch_edges: sketch.total_edges(),
        })
    }
}

/// Runs one submodule over a single pass of `source`.
pub fn setcover_submodule(
    source: &mut dyn EdgeSource,
    n: usize,
    m_hint: Option<u64>,
    cfg: SubmoduleConfig,
    seed: u64,
) -> Result<SubmoduleResult> {
    let mut sub = SetCoverSubmodule::new(n, m_hint, cfg, seed)?;
    for edge in source.open()? {
        sub.update(edge?)?;
    }
    sub.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutlierParams {
    pub eps: f64,
    pub lambda: f64,
    pub c: f64,
}

impl OutlierParams {
    pub fn new(eps: f64, lambda: f64, c: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::param(format!("eps {eps} not in (0, 1]")));
        }
        if !(lambda > 0.0 && lambda <= (-1.0f64).exp()) {
            return Err(Error::param(format!("lambda {lambda} not in (0, 1/e]")));
        }
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::param(format!("C {c} must be >= 1")));
        }
        Ok(Self { eps, lambda, c })
    }

    /// `λ (1 − e^{−ε/2})`.
    pub fn eps_prime(&self) -> f64 {
        self.lambda * (1.0 - (-self.eps / 2.0).exp())
    }

    /// `λ e^{−ε/2}`.
    pub fn lambda_prime(&self) -> f64 {
        self.lambda * (-self.eps / 2.0).exp()
    }

    /// `C ⌈log_{1+ε/3} n⌉`, at least `C`.
    pub fn c_prime(&self, n: usize) -> f64 {
        let runs = ((n as f64).ln() / (1.0 + self.eps / 3.0).ln()).ceil();
        self.c * runs.max(1.0)
    }

    /// Guessed cover sizes: `(1+ε/3)^j` for `j = 1, 2, …` until reaching `n`,
    /// which is always the last entry.
    pub fn k_prime_schedule(&self, n: usize) -> Vec<f64> {
        let n = n.max(1) as f64;
        let mut out = Vec::new();
        let mut k = 1.0;
        loop {
            k *= 1.0 + self.eps / 3.0;
            if k >= n {
                out.push(n);
                return out;
            }
            out.push(k);
        }
    }

    pub fn submodule(&self, k_prime: f64, n: usize) -> SubmoduleConfig {
        SubmoduleConfig {
            k_prime,
            eps_prime: self.eps_prime(),
            lambda_prime: self.lambda_prime(),
            c_prime: self.c_prime(n),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutliersOutcome {
    pub solution: Solution,
    /// Guessed cover size of the accepted attempt, `None` on fallback.
    pub k_prime: Option<f64>,
    pub attempts: Vec<SubmoduleResult>,
    pub total_sketch_edges: u64,
}

const FAN_OUT_CHUNK: usize = 4096;

/// One submodule per guessed `k'`, all fed from the same single pass; the
/// first accepting attempt in increasing `k'` wins.
pub fn setcover_outliers_stream(
    edges: EdgeStream<'_>,
    n: usize,
    m_hint: Option<u64>,
    params: &OutlierParams,
    seed: u64,
    exec: Exec,
) -> Result<OutliersOutcome> {
    let mut subs = params
        .k_prime_schedule(n)
        .into_iter()
        .enumerate()
        .map(|(i, k)| SetCoverSubmodule::new(n, m_hint, params.submodule(k, n), derive_seed(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;

    let mut chunk = Vec::with_capacity(FAN_OUT_CHUNK);
    let mut edges = edges.peekable();
    while edges.peek().is_some() {
        chunk.clear();
        for edge in edges.by_ref().take(FAN_OUT_CHUNK) {
            let edge = edge?;
            if edge.set.index() >= n {
                return Err(Error::Range {
                    what: "set id",
                    value: edge.set.0 as u64,
                    bound: n as u64,
                });
            }
            chunk.push(edge);
        }
        exec.for_each_mut(&mut subs, |sub| {
            for &e in &chunk {
                sub.update(e).expect("set ids validated before fan-out");
            }
        });
    }

    let attempts = exec
        .map_vec(subs, SetCoverSubmodule::finish)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let total_sketch_edges = attempts.iter().map(|a| a.sketch_edges).sum();
    let winner = attempts.iter().find(|a| a.solution.is_some());
    let (solution, k_prime) = match winner {
        Some(a) => (a.solution.clone().expect("checked"), Some(a.k_prime)),
        None => {
            let all: Vec<SetId> = (0..n as u32).map(SetId).collect();
            (
                Solution {
                    gains: vec![0; all.len()],
                    chosen: all,
                    covered_on_target: 0,
                    target_size: 0,
                    estimate_on_g: None,
                },
                None,
            )
        }
    };
    Ok(OutliersOutcome {
        solution,
        k_prime,
        attempts,
        total_sketch_edges,
    })
}

pub fn setcover_outliers(
    source: &mut dyn EdgeSource,
    n: usize,
    m_hint: Option<u64>,
    params: &OutlierParams,
    seed: u64,
    exec: Exec,
) -> Result<OutliersOutcome> {
    let stream = source.open()?;
    setcover_outliers_stream(stream, n, m_hint, params, seed, exec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultipassParams {
    pub r: usize,
    pub eps: f64,
    pub c: f64,
    /// `m^{−1/(2+r)}`.
    pub lambda: f64,
    /// `(r − 1) C`.
    pub c_prime: f64,
}

impl MultipassParams {
    pub fn new(m: usize, r: usize, eps: f64, c: f64) -> Result<Self> {
        let max_r = ((m.max(1) as f64).ln().ceil() as usize).max(1);
        if r == 0 || r > max_r {
            return Err(Error::param(format!("r = {r} not in [1, {max_r}]")));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::param(format!("eps {eps} not in (0, 1]")));
        }
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::param(format!("C {c} must be >= 1")));
        }
        Ok(Self {
            r,
            eps,
            c,
            lambda: (m.max(1) as f64).powf(-1.0 / (2.0 + r as f64)),
            c_prime: (r.saturating_sub(1)) as f64 * c,
        })
    }

    /// Share of the `ln m` size budget taken by each outlier iteration and by
    /// the final greedy round: `1/(2+r)` each, then `3/(2+r)`.
    pub fn log_budget_shares(&self) -> (Vec<f64>, f64) {
        let d = 2.0 + self.r as f64;
        (vec![1.0 / d; self.r - 1], 3.0 / d)
    }

    /// Passes over the source: two per outlier iteration plus one.
    pub fn pass_count(&self) -> usize {
        2 * (self.r - 1) + 1
    }

    /// Outlier parameters for one iteration; `λ` is lowered to `1/e` when
    /// `m` is too small for `m^{−1/(2+r)}` to reach it.
    pub fn outlier_params(&self) -> Result<OutlierParams> {
        let lambda = self.lambda.min((-1.0f64).exp());
        OutlierParams::new(self.eps, lambda, self.c_prime.max(1.0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub k_prime: Option<f64>,
    pub picks: usize,
    pub uncovered_before: usize,
    pub uncovered_after: usize,
    pub sketch_edges: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultipassOutcome {
    pub solution: Solution,
    pub params: MultipassParams,
    pub iterations: Vec<IterationLog>,
    pub residual_edges: usize,
    pub passes: usize,
}

fn check_element(edge: &EdgeRecord, n: usize, m: usize) -> Result<()> {
    crate::instance::check_edge(*edge, n, m)
}

/// `r − 1` outlier iterations on the shrinking uncovered residual, then greedy
/// set cover on the materialized remainder. Iteration `i` builds sketches in
/// one pass and marks newly covered elements in a second; the last pass keeps
/// every edge of an uncovered element.
pub fn setcover_multipass(
    source: &mut dyn EdgeSource,
    n: usize,
    m: usize,
    r: usize,
    eps: f64,
    c: f64,
    seed: u64,
    exec: Exec,
) -> Result<MultipassOutcome> {
    let params = MultipassParams::new(m, r, eps, c)?;
    if params.pass_count() > 1 && !source.replayable() {
        return Err(Error::param(format!(
            "{} passes needed but the source cannot be replayed",
            params.pass_count()
        )));
    }
    let start_passes = source.passes();
    let mut covered = vec![false; m];
    let mut covered_count = 0usize;
    let mut in_solution = vec![false; n];
    let mut chosen: Vec<SetId> = Vec::new();
    let mut gains: Vec<usize> = Vec::new();
    let mut iterations = Vec::new();

    for iteration in 1..r {
        let uncovered_before = m - covered_count;
        let outliers = {
            let covered = &covered;
            let stream = source.open()?.filter_map(move |edge| match edge {
                Ok(e) => match check_element(&e, n, m) {
                    Ok(()) if covered[e.element.index()] => None,
                    Ok(()) => Some(Ok(e)),
                    Err(err) => Some(Err(err)),
                },
                Err(err) => Some(Err(err)),
            });
            setcover_outliers_stream(
                Box::new(stream),
                n,
                Some(m as u64),
                &params.outlier_params()?,
                derive_seed(seed, iteration as u64),
                exec,
            )?
        };
        // Rank of each set in this iteration's pick order; an element's gain
        // goes to the earliest pick containing it.
        let mut rank = vec![u32::MAX; n];
        let mut new_picks = Vec::new();
        for &s in &outliers.solution.chosen {
            if !in_solution[s.index()] {
                in_solution[s.index()] = true;
                rank[s.index()] = new_picks.len() as u32;
                new_picks.push(s);
            }
        }
        let mut owner = vec![u32::MAX; m];
        for edge in source.open()? {
            let e = edge?;
            check_element(&e, n, m)?;
            let slot = &mut owner[e.element.index()];
            if !covered[e.element.index()] {
                *slot = (*slot).min(rank[e.set.index()]);
            }
        }
        let mut new_gains = vec![0usize; new_picks.len()];
        for (e, &r) in owner.iter().enumerate() {
            if r != u32::MAX {
                covered[e] = true;
                covered_count += 1;
                new_gains[r as usize] += 1;
            }
        }
        chosen.extend(new_picks);
        gains.extend(new_gains);
        iterations.push(IterationLog {
            iteration,
            k_prime: outliers.k_prime,
            picks: outliers.solution.len(),
            uncovered_before,
            uncovered_after: m - covered_count,
            sketch_edges: outliers.total_sketch_edges,
        });
    }

    let mut remap = IdRemapper::new();
    let mut residual_sets: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut residual_edges = 0;
    for edge in source.open()? {
        let e = edge?;
        check_element(&e, n, m)?;
        if !covered[e.element.index()] {
            let local = remap.id(e.element.0);
            residual_sets[e.set.index()].push(local);
            residual_edges += 1;
        }
    }
    let residual = CoverageInstance::from_set_lists(residual_sets, remap.len());
    let tail = greedy_set_cover(&residual);
    for (&s, &g) in tail.chosen.iter().zip(&tail.gains) {
        if !in_solution[s.index()] {
            in_solution[s.index()] = true;
            chosen.push(s);
            gains.push(g);
        }
    }
    covered_count += tail.covered_on_target;
    debug_assert_eq!(tail.covered_on_target, residual.element_count());

    Ok(MultipassOutcome {
        solution: Solution {
            chosen,
            gains,
            covered_on_target: covered_count,
            target_size: m,
            estimate_on_g: None,
        },
        params,
        iterations,
        residual_edges,
        passes: source.passes() - start_passes,
    })
}
