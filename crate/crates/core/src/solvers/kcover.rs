use serde::Serialize;

use super::{greedy_kcover, Solution};
use crate::error::{Error, Result};
use crate::sketch::{BuilderStats, Sketch, SketchParams, StreamingSketchBuilder};
use crate::source::EdgeSource;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KCoverConfig {
    pub n: usize,
    pub k: usize,
    /// Target additive loss; the sketch itself runs at `eps / 12`.
    pub eps: f64,
    pub m_hint: Option<u64>,
    pub seed: u64,
}

impl KCoverConfig {
    /// Sketch parameters: accuracy `eps / 12` and confidence `2 + ln n`.
    pub fn sketch_params(&self) -> Result<SketchParams> {
        if !(self.eps > 0.0 && self.eps <= 2.4) {
            return Err(Error::param(format!(
                "k-cover eps {} must lie in (0, 2.4] so that eps/12 <= 1/5",
                self.eps
            )));
        }
        SketchParams::new(
            self.n,
            self.k,
            self.eps / 12.0,
            2.0 + (self.n as f64).ln(),
            self.m_hint,
        )
    }
}

#[derive(Debug, Clone)]
pub struct SketchRun {
    pub solution: Solution,
    pub sketch: Sketch,
    pub stats: BuilderStats,
}

/// One pass over `source` to build the sketch, then greedy on the sketch.
pub fn kcover_via_sketch(source: &mut dyn EdgeSource, cfg: &KCoverConfig) -> Result<SketchRun> {
    let params = cfg.sketch_params()?;
    let mut builder = StreamingSketchBuilder::new(params, cfg.seed);
    builder.extend(source.open()?)?;
    let sketch = builder.finalize()?;
    let mut solution = greedy_kcover(&sketch, cfg.k);
    solution.estimate_on_g = Some(sketch.estimate_coverage(&solution.chosen)?);
    Ok(SketchRun {
        solution,
        sketch,
        stats: builder.stats(),
    })
}
