// SPDX-License-Identifier: Apache-2.0

//! `mention-lens` command-line interface.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod analyze;
mod annotate;
mod ingest;
mod report;
mod sample;
mod util;

#[derive(Debug, Parser)]
#[command(name = "mention-lens", version, about = "Audit software-mention datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert dataset dumps into a canonical mention table.
    Ingest(ingest::IngestArgs),
    /// Draw a seeded sample from a mention table.
    Sample(sample::SampleArgs),
    /// Compute tables from annotated samples.
    #[command(subcommand)]
    Analyze(analyze::AnalyzeCommand),
    /// Inter-annotator agreement over annotated CSV files.
    Iaa(IaaArgs),
    /// Manage an annotation campaign.
    #[command(subcommand)]
    Annotate(annotate::AnnotateCommand),
    /// Render analysis files as tables, figures and a manifest.
    Report(report::ReportArgs),
}

#[derive(Debug, Args)]
pub struct IaaArgs {
    /// Comma-separated layers; defaults to the standard agreement layers.
    #[arg(long, value_delimiter = ',')]
    layers: Vec<String>,
    /// Annotated CSV files; rows for the same mention are merged.
    #[arg(long = "in", required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = PoolingArg::Concatenate)]
    pooling: PoolingArg,
    /// Also write the result as an analysis file into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = util::Output::Md)]
    format: util::Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PoolingArg {
    Concatenate,
    Average,
}

impl From<PoolingArg> for mention_lens_core::annotation::Pooling {
    fn from(p: PoolingArg) -> Self {
        match p {
            PoolingArg::Concatenate => Self::Concatenate,
            PoolingArg::Average => Self::Average,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => ingest::run(a),
        Command::Sample(a) => sample::run(a),
        Command::Analyze(c) => analyze::run(c),
        Command::Iaa(a) => analyze::iaa(a),
        Command::Annotate(c) => annotate::run(c),
        Command::Report(a) => report::run(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
