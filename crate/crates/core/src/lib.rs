//! Streaming coverage optimization on a degree-capped subsampling sketch.
//!
//! Edges `(set, element)` arrive one at a time. [`sketch`] keeps a
//! hash-subsampled, degree-capped subgraph whose size depends only on the
//! number of sets and the accuracy parameters; [`solvers`] runs greedy k-cover,
//! set cover with outliers and multi-pass set cover on it. [`l0_baseline`] is
//! the per-set distinct-count sketch alternative, and [`hardness`] builds the
//! adversarial instances used to probe the limits of any such approach.

pub mod error;
pub mod exec;
pub mod hardness;
pub mod hash;
pub mod instance;
pub mod l0_baseline;
pub mod sketch;
pub mod solvers;
pub mod source;

pub use error::{Error, Result};
pub use exec::Exec;
pub use instance::{CoverageInstance, EdgeRecord, ElementId, SetId};
pub use sketch::{Sketch, SketchParams, StreamingSketchBuilder};
pub use solvers::Solution;
pub use source::{EdgeSource, FileSource, MemorySource};
