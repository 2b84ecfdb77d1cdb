//! `covsketch`: streaming coverage sketches from the command line.

mod cli;
mod commands;
mod error;
mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Args, ReportArg};
use crate::commands::Output;

fn main() -> ExitCode {
    let args = Args::parse();
    match commands::run(&args) {
        Ok(Output::Report(report)) => {
            let json = report.to_json();
            if let Some(path) = args.out.as_ref().filter(|_| writes_report_file(&args)) {
                if let Err(e) = std::fs::write(path, serde_json::to_string_pretty(&json).unwrap()) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(error::EXIT_IO);
                }
            }
            let text = match args.report {
                ReportArg::Text => report.render_text(),
                ReportArg::Json => format!("{json}\n"),
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Ok(Output::Written) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

/// `--out` holds the JSON report unless the command writes its own artifact.
fn writes_report_file(args: &Args) -> bool {
    use crate::cli::Command::*;
    !matches!(args.command, Gen | BuildSketch | Eval)
}
