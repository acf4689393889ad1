// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};

use mention_lens_core::annotation::{agreement, annotators_of, read_annotated, AGREEMENT_LAYERS};
use mention_lens_core::ingest::{open_input, MentionTableReader};
use mention_lens_core::model::{AnnotatedMention, TagsetRegistry};
use mention_lens_core::report::{hash_file, Analysis, InputHash, NamedAnalysis};
use mention_lens_core::sampling::Strata;
use mention_lens_core::stats::{
    baseline, cluster_distribution, compare_to_baseline, extraction_and_entity_stats,
    link_quality_stats, mention_cluster_by_license_cluster, mention_type_by_license,
    mention_type_distribution, BASELINES,
};

use crate::util::{self, Output};
use crate::IaaArgs;

#[derive(Debug, Args)]
pub struct Common {
    /// Annotated CSV files (as written by `annotate export --all`).
    #[arg(long = "in", required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Comma-separated series labels, one per input; defaults to file stems.
    #[arg(long = "label", value_delimiter = ',')]
    labels: Vec<String>,
    /// Write `<name>.json` and `<name>.csv` per analysis into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Output::Md)]
    format: Output,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Mention type by license category over all inputs pooled.
    Licenses(Common),
    /// Mention type and quality-cluster distributions per input.
    MentionTypes {
        #[command(flatten)]
        common: Common,
        /// Keep publications from this year on.
        #[arg(long)]
        since_year: Option<i32>,
        /// Baseline to compare against, or `none`.
        #[arg(long, default_value = "howison2015")]
        baseline: String,
    },
    /// Link verdict rates per input.
    Links(Common),
    /// Extraction and not-software rates per input.
    Extraction(Common),
    /// Mention counts per software key; inputs are mention tables.
    Counts(Common),
}

fn load(path: &Path, registry: &TagsetRegistry) -> Result<Vec<AnnotatedMention>> {
    read_annotated(open_input(path)?, registry).with_context(|| format!("reading {}", path.display()))
}

fn hashes(paths: &[&Path]) -> Result<Vec<InputHash>> {
    paths.iter().map(|p| Ok(hash_file(p)?)).collect()
}

pub fn run(cmd: AnalyzeCommand) -> Result<ExitCode> {
    let registry = TagsetRegistry::builtin();
    let (common, out) = match cmd {
        AnalyzeCommand::Licenses(c) => {
            let mut annots = Vec::new();
            for p in &c.input {
                annots.extend(load(p, &registry)?);
            }
            let inputs = hashes(&c.input.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
            let out = vec![
                NamedAnalysis::new(
                    "licenses",
                    "Mention types over license categories",
                    Analysis::Contingency {
                        table: mention_type_by_license(&annots),
                    },
                )
                .with_inputs(inputs.clone()),
                NamedAnalysis::new(
                    "license-clusters",
                    "Mention quality clusters over license clusters",
                    Analysis::Contingency {
                        table: mention_cluster_by_license_cluster(&annots),
                    },
                )
                .with_inputs(inputs),
            ];
            (c, out)
        }
        AnalyzeCommand::MentionTypes { common: c, since_year, baseline: base } => {
            let base = match base.as_str() {
                "none" => None,
                name => match baseline(name) {
                    Some(b) => Some((name.to_string(), b)),
                    None => bail!("unknown baseline {name:?} (known: {}, none)", BASELINES.join(", ")),
                },
            };
            let labels = util::labels(&c.input, &c.labels)?;
            let years = since_year.map(|y| format!(", publications from {y}")).unwrap_or_default();
            let mut out = Vec::new();
            for (p, label) in c.input.iter().zip(&labels) {
                let annots = load(p, &registry)?;
                let inputs = hashes(&[p.as_path()])?;
                let dist = mention_type_distribution(&annots, since_year);
                let clusters = cluster_distribution(&dist)?;
                if let Some((name, b)) = &base {
                    out.push(
                        NamedAnalysis::new(
                            format!("delta-{label}"),
                            format!("Mention types, {label} vs {name}{years}"),
                            Analysis::Comparison {
                                table: compare_to_baseline(&dist, b)?,
                            },
                        )
                        .with_inputs(inputs.clone()),
                    );
                }
                out.push(
                    NamedAnalysis::new(
                        format!("mention-types-{label}"),
                        format!("Mention types, {label}{years}"),
                        Analysis::Distribution { table: dist },
                    )
                    .with_series(label.clone())
                    .with_inputs(inputs.clone()),
                );
                out.push(
                    NamedAnalysis::new(
                        format!("mention-clusters-{label}"),
                        format!("Mention quality clusters, {label}{years}"),
                        Analysis::Distribution { table: clusters },
                    )
                    .with_series(label.clone())
                    .with_inputs(inputs),
                );
            }
            if let Some((name, b)) = base {
                out.push(
                    NamedAnalysis::new(
                        format!("mention-clusters-{name}"),
                        format!("Mention quality clusters, {name}"),
                        Analysis::Distribution {
                            table: cluster_distribution(&b)?,
                        },
                    )
                    .with_series(name.clone()),
                );
                out.push(
                    NamedAnalysis::new(
                        format!("mention-types-{name}"),
                        format!("Mention types, {name}"),
                        Analysis::Distribution { table: b },
                    )
                    .with_series(name),
                );
            }
            (c, out)
        }
        AnalyzeCommand::Links(c) => {
            let labels = util::labels(&c.input, &c.labels)?;
            let mut out = Vec::new();
            for (p, label) in c.input.iter().zip(&labels) {
                let stats = link_quality_stats(&load(p, &registry)?);
                out.push(
                    NamedAnalysis::new(format!("links-{label}"), format!("Link quality, {label}"), Analysis::Links { stats })
                        .with_inputs(hashes(&[p.as_path()])?),
                );
            }
            (c, out)
        }
        AnalyzeCommand::Extraction(c) => {
            let labels = util::labels(&c.input, &c.labels)?;
            let mut out = Vec::new();
            for (p, label) in c.input.iter().zip(&labels) {
                let stats = extraction_and_entity_stats(&load(p, &registry)?);
                out.push(
                    NamedAnalysis::new(
                        format!("extraction-{label}"),
                        format!("Extraction quality, {label}"),
                        Analysis::Extraction { stats },
                    )
                    .with_inputs(hashes(&[p.as_path()])?),
                );
            }
            (c, out)
        }
        AnalyzeCommand::Counts(c) => {
            let labels = util::labels(&c.input, &c.labels)?;
            let mut out = Vec::new();
            for (p, label) in c.input.iter().zip(&labels) {
                let mut strata = Strata::new();
                for rec in MentionTableReader::new(open_input(p)?)? {
                    strata.push(&rec?.software_raw)?;
                }
                out.push(
                    NamedAnalysis::new(
                        format!("counts-{label}"),
                        format!("Mention counts, {label}"),
                        Analysis::Counts {
                            histogram: strata.histogram(),
                        },
                    )
                    .with_inputs(hashes(&[p.as_path()])?),
                );
            }
            (c, out)
        }
    };
    emit(&out, common.out.as_deref(), common.format)
}

fn emit(out: &[NamedAnalysis], dir: Option<&Path>, format: Output) -> Result<ExitCode> {
    if let Some(dir) = dir {
        util::save_analyses(dir, out)?;
    }
    util::print_analyses(out, format)?;
    Ok(ExitCode::SUCCESS)
}

/// Annotations from several files, merged by mention id in first-seen order.
pub fn load_merged(paths: &[PathBuf], registry: &TagsetRegistry) -> Result<Vec<AnnotatedMention>> {
    let mut out: Vec<AnnotatedMention> = Vec::new();
    let mut at: HashMap<String, usize> = HashMap::new();
    for p in paths {
        for a in load(p, registry)? {
            match at.get(&a.mention.mention_id) {
                Some(&i) => out[i].annotations.extend(a.annotations),
                None => {
                    at.insert(a.mention.mention_id.clone(), out.len());
                    out.push(a);
                }
            }
        }
    }
    Ok(out)
}

pub fn iaa(args: IaaArgs) -> Result<ExitCode> {
    let registry = TagsetRegistry::builtin();
    let annots = load_merged(&args.input, &registry)?;
    let annotators = annotators_of(&annots);
    let layers: Vec<String> = if args.layers.is_empty() {
        AGREEMENT_LAYERS.iter().map(|s| s.to_string()).collect()
    } else {
        args.layers.clone()
    };
    for l in &layers {
        if mention_lens_core::annotation::layer(l).is_none() {
            bail!("unknown layer {l:?}");
        }
    }
    let entries = agreement(&annots, &annotators, &layers, args.pooling.into());
    let inputs = hashes(&args.input.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
    let a = NamedAnalysis::new("agreement", "Inter-annotator agreement", Analysis::Agreement { entries })
        .with_inputs(inputs);
    emit(&[a], args.out.as_deref(), args.format)
}
