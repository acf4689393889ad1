// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Args;

use mention_lens_core::report::{emit_report, read_analysis_dir, Formats};

use crate::util;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of analysis JSON files.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated subset of svg, csv, md.
    #[arg(long, default_value = "svg,csv,md")]
    format: Formats,
}

pub fn run(args: ReportArgs) -> Result<ExitCode> {
    let analyses = read_analysis_dir(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let rendered = emit_report(&analyses, &args.out, args.format, &util::timestamp()?)
        .with_context(|| format!("writing report to {}", args.out.display()))?;
    eprintln!(
        "{} analyses, {} files in {}",
        rendered.manifest.analyses.len(),
        rendered.manifest.files.len(),
        rendered.dir.display()
    );
    Ok(ExitCode::SUCCESS)
}
