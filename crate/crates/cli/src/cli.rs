use std::path::PathBuf;

use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Generate an instance and write it as an edge file.
    Gen,
    /// One pass over the input, emit the sketch and its statistics.
    BuildSketch,
    /// k-cover via the sketch.
    Kcover,
    /// Set cover with lambda outliers in one pass.
    SetcoverOutliers,
    /// Full set cover in r iterations.
    SetcoverMultipass,
    /// Exact optimum by enumeration (k-cover with --k, else set cover).
    Brute,
    /// Compare solvers on the same instance; CSV output.
    Eval,
    /// Purification oracle checks (requires --unsafe-audit).
    Hardness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportArg {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "covsketch", version, about = "Streaming coverage sketches and solvers")]
pub struct Args {
    pub command: Command,

    /// Edge file, or `-` for standard input (single pass only).
    #[arg(long, conflicts_with = "gen")]
    pub input: Option<PathBuf>,

    /// Generator spec, e.g. `random:n=10,m=50,p=0.3`, `planted:n=10,m=50,k=2`,
    /// `disjoint:n=6,a=1;3,b=2;3`, `purify:n=1000,k=100`.
    #[arg(long)]
    pub gen: Option<String>,

    /// Instance dimensions sidecar; defaults to `<input>.meta.json`.
    #[arg(long)]
    pub meta: Option<PathBuf>,

    #[arg(long)]
    pub k: Option<usize>,

    #[arg(long)]
    pub eps: Option<f64>,

    #[arg(long)]
    pub lambda: Option<f64>,

    #[arg(long)]
    pub delta2: Option<f64>,

    #[arg(long)]
    pub r: Option<usize>,

    /// Confidence multiplier C.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,

    /// Override the derived edge budget M.
    #[arg(long)]
    pub budget: Option<u64>,

    /// Override the derived degree cap D.
    #[arg(long)]
    pub cap: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1)]
    pub repeat: usize,

    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,

    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Report style on standard output.
    #[arg(long, value_enum, default_value_t = ReportArg::Text)]
    pub report: ReportArg,

    #[arg(long)]
    pub parallel: bool,

    #[arg(long)]
    pub unsafe_audit: bool,
}
