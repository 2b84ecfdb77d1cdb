//! Coverage solvers on instances and sketches, plus exhaustive oracles.

mod brute;
mod greedy;
mod kcover;
mod setcover;
mod solution;
mod threshold;

pub use brute::{binomial, brute_force_kcover, brute_force_setcover, KCOVER_GUARD, SETCOVER_GUARD};
pub use greedy::{greedy_kcover, greedy_set_cover, LazyGreedy};
pub use kcover::{kcover_via_sketch, KCoverConfig, SketchRun};
pub use setcover::{
    setcover_multipass, setcover_outliers, setcover_outliers_stream, setcover_submodule,
    IterationLog, MultipassOutcome, MultipassParams, OutlierParams, OutliersOutcome,
    SetCoverSubmodule, SubmoduleConfig, SubmoduleResult,
};
pub use solution::Solution;
pub use threshold::threshold_greedy;

