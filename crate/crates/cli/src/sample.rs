// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use mention_lens_core::ingest::{open_input, MentionTableReader, MentionTableWriter};
use mention_lens_core::report::{hash_file, Analysis, NamedAnalysis};
use mention_lens_core::sampling::{
    plan, Allocation, MentionCountHistogram, SampleSpec, SkewSummary, Strata, Strategy,
};
use mention_lens_core::stats::{levene_test_with, Center, LeveneResult};

use crate::util;

/// Columns appended to every sampled row.
pub const SAMPLE_COLUMNS: [&str; 5] = ["sample_strategy", "sample_seed", "sample_n", "population_index", "stratum_key"];

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Simple,
    Stratified,
    OnePerSoftware,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Simple => Strategy::Simple,
            StrategyArg::Stratified => Strategy::StratifiedProportionate,
            StrategyArg::OnePerSoftware => Strategy::OnePerSoftware,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CenterArg {
    Mean,
    Median,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Sample size; not used by one-per-software.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    seed: u64,
    /// Mention table to sample from (read twice).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// JSON summary: sizes, skew of population and sample, Levene diagnostic.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write count and Levene analysis files for `report`.
    #[arg(long)]
    analysis_dir: Option<PathBuf>,
    /// Center for the Levene diagnostic.
    #[arg(long, value_enum, default_value_t = CenterArg::Mean)]
    levene_center: CenterArg,
}

#[derive(Serialize)]
struct SampleReport {
    spec: SampleSpec,
    input: String,
    population_size: u64,
    sample_size: u64,
    population_strata: u64,
    sample_strata: u64,
    population_skew: SkewSummary,
    sample_skew: SkewSummary,
    /// Mentions per software key in the population vs in the sample.
    levene: Result<LeveneResult, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    allocations: Vec<Allocation>,
}

pub fn run(args: SampleArgs) -> Result<ExitCode> {
    let spec = SampleSpec::new(args.strategy.into(), args.n, args.seed)?;

    let mut strata = Strata::new();
    for rec in MentionTableReader::new(open_input(&args.input)?)? {
        strata.push(&rec?.software_raw)?;
    }
    let p = plan(&spec, &strata)?;
    let n_label = spec.n.unwrap_or(p.indices.len() as u64).to_string();
    let seed = spec.seed.to_string();

    let mut w = MentionTableWriter::with_extra_columns(util::create(&args.out)?, &SAMPLE_COLUMNS)?;
    let mut wanted = p.indices.iter().copied().peekable();
    let mut sample_counts: std::collections::BTreeMap<String, u64> = Default::default();
    let reader = MentionTableReader::new(open_input(&args.input)?)?;
    for (row, rec) in reader.enumerate() {
        let row = row as u64;
        if wanted.peek() != Some(&row) {
            continue;
        }
        wanted.next();
        let rec = rec?;
        let key = strata.key_of(row);
        *sample_counts.entry(key.to_string()).or_insert(0) += 1;
        w.write_with(&rec, &[&spec.strategy.to_string(), &seed, &n_label, &row.to_string(), key])?;
        if wanted.peek().is_none() {
            break;
        }
    }
    w.finish()?.flush()?;
    anyhow::ensure!(wanted.peek().is_none(), "input changed between passes");

    let population = strata.histogram();
    let sample = MentionCountHistogram::from_counts(sample_counts);
    let center = match args.levene_center {
        CenterArg::Mean => Center::Mean,
        CenterArg::Median => Center::Median,
    };
    let groups = [counts(&population), counts(&sample)];
    let levene = levene_test_with(&groups, center).map_err(|e| e.to_string());

    if let Some(path) = &args.report {
        let report = SampleReport {
            spec: spec.clone(),
            input: args.input.display().to_string(),
            population_size: p.population_size,
            sample_size: p.indices.len() as u64,
            population_strata: population.distinct(),
            sample_strata: sample.distinct(),
            population_skew: population.summary(),
            sample_skew: sample.summary(),
            levene: levene.clone(),
            allocations: p.allocations.clone(),
        };
        util::write_json(path, &report)?;
    }
    if let Some(dir) = &args.analysis_dir {
        let input = hash_file(&args.input).with_context(|| format!("hashing {}", args.input.display()))?;
        let mut out = vec![
            NamedAnalysis::new("counts-population", "Mention counts, population", Analysis::Counts { histogram: population })
                .with_inputs(vec![input.clone()]),
            NamedAnalysis::new("counts-sample", "Mention counts, sample", Analysis::Counts { histogram: sample })
                .with_inputs(vec![input.clone()])
                .with_seeds(vec![spec.seed]),
        ];
        if let Ok(result) = levene {
            out.push(
                NamedAnalysis::new(
                    "levene-sample",
                    "Variance of mention counts, population vs sample",
                    Analysis::Levene {
                        result,
                        groups: vec!["population".into(), "sample".into()],
                    },
                )
                .with_inputs(vec![input])
                .with_seeds(vec![spec.seed]),
            );
        }
        util::save_analyses(dir, &out)?;
    }
    eprintln!(
        "sampled {} of {} rows ({} of {} software keys)",
        p.indices.len(),
        p.population_size,
        groups[1].len(),
        groups[0].len()
    );
    Ok(ExitCode::SUCCESS)
}

fn counts(h: &MentionCountHistogram) -> Vec<f64> {
    h.entries.iter().map(|e| e.1 as f64).collect()
}
