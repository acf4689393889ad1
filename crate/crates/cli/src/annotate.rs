// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Subcommand;

use mention_lens_core::annotation::{Campaign, CampaignConfig, SampleProvenance, LAYERS};
use mention_lens_core::ingest::{open_input, MentionTableReader};
use mention_lens_core::model::TagsetRegistry;
use mention_lens_core::report::{Analysis, NamedAnalysis};

use crate::util::{self, Output};
use crate::PoolingArg;

/// Exit status when a sheet import rejected rows.
const EXIT_REJECTED: u8 = 2;

#[derive(Debug, Subcommand)]
pub enum AnnotateCommand {
    /// Create a campaign directory from a sampled mention table.
    Init {
        #[arg(long)]
        campaign: PathBuf,
        #[arg(long)]
        sample: PathBuf,
        /// Comma-separated annotator ids.
        #[arg(long, required = true, value_delimiter = ',')]
        annotators: Vec<String>,
        /// Comma-separated layers; all layers by default.
        #[arg(long, value_delimiter = ',')]
        layers: Vec<String>,
        /// Campaign id; defaults to the directory name.
        #[arg(long)]
        id: Option<String>,
    },
    /// Write an annotation sheet for one annotator, or every DONE record.
    Export {
        #[arg(long)]
        campaign: PathBuf,
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        annotator: Option<String>,
        #[arg(long)]
        all: bool,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate and store completed sheets.
    Import {
        #[arg(long)]
        campaign: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        sheet: Vec<PathBuf>,
    },
    /// Progress per annotator and layer.
    Status {
        #[arg(long)]
        campaign: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Agreement over the campaign's DONE records.
    Iaa {
        #[arg(long)]
        campaign: PathBuf,
        #[arg(long, value_delimiter = ',')]
        layers: Vec<String>,
        #[arg(long, value_enum, default_value_t = PoolingArg::Concatenate)]
        pooling: PoolingArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Output::Md)]
        format: Output,
    },
    /// Serve the local annotation API.
    Serve {
        #[arg(long)]
        campaign: PathBuf,
        #[arg(long, default_value_t = 8737)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Open the served address in a browser.
        #[arg(long)]
        open: bool,
    },
}

fn open(dir: &PathBuf) -> Result<Campaign> {
    Campaign::open(dir, TagsetRegistry::builtin()).with_context(|| format!("opening campaign {}", dir.display()))
}

pub fn run(cmd: AnnotateCommand) -> Result<ExitCode> {
    match cmd {
        AnnotateCommand::Init {
            campaign,
            sample,
            annotators,
            layers,
            id,
        } => {
            let mut reader = MentionTableReader::new(open_input(&sample)?)?;
            let pos = |name: &str| reader.headers().iter().position(|h| h == name);
            let (strategy_col, seed_col) = (pos("sample_strategy"), pos("sample_seed"));
            let mut mentions = Vec::new();
            let mut provenance = SampleProvenance {
                source: Some(sample.display().to_string()),
                ..Default::default()
            };
            while let Some(item) = reader.next_with_row() {
                let (m, row) = item?;
                if mentions.is_empty() {
                    provenance.strategy = strategy_col.and_then(|c| row.get(c)).map(String::from);
                    provenance.seed = seed_col.and_then(|c| row.get(c)).and_then(|s| s.parse().ok());
                }
                mentions.push(m);
            }
            let id = match id {
                Some(id) => id,
                None => campaign
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .context("campaign path has no directory name; pass --id")?,
            };
            let mut config = CampaignConfig::new(id, annotators);
            if !layers.is_empty() {
                config.layers = layers;
            }
            config.sample = provenance;
            let c = Campaign::init(&campaign, config, mentions, TagsetRegistry::builtin())?;
            eprintln!(
                "campaign {} at {}: {} mentions, {} annotators, {} layers",
                c.config().campaign_id,
                campaign.display(),
                c.mentions().len(),
                c.config().annotators.len(),
                c.config().layers.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        AnnotateCommand::Export {
            campaign,
            annotator,
            all,
            out,
        } => {
            let c = open(&campaign)?;
            let mut w: Box<dyn Write> = match &out {
                Some(p) => Box::new(util::create(p)?),
                None => Box::new(io::stdout().lock()),
            };
            if all {
                w = c.export_all(w)?;
            } else {
                w = c.export_sheet(annotator.as_deref().unwrap_or_default(), w)?;
            }
            w.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        AnnotateCommand::Import { campaign, sheet } => {
            let mut c = open(&campaign)?;
            let mut any_rejected = false;
            for path in &sheet {
                let report = c
                    .import_sheet(open_input(path)?)
                    .with_context(|| format!("importing {}", path.display()))?;
                println!(
                    "{}: {} stored, {} unchanged, {} blank, {} rejected",
                    path.display(),
                    report.accepted.len(),
                    report.unchanged,
                    report.blank,
                    report.rejected.len()
                );
                for r in &report.rejected {
                    any_rejected = true;
                    for v in &r.violations {
                        println!(
                            "  row {} (line {}) {} / {}: {} [{}] {}",
                            r.row, r.line, r.mention_id, r.annotator_id, v.field, v.rule, v.message
                        );
                    }
                }
            }
            Ok(if any_rejected {
                ExitCode::from(EXIT_REJECTED)
            } else {
                ExitCode::SUCCESS
            })
        }
        AnnotateCommand::Status { campaign, json } => {
            let c = open(&campaign)?;
            let p = c.progress();
            if json {
                println!("{}", serde_json::to_string_pretty(&p)?);
                return Ok(ExitCode::SUCCESS);
            }
            println!("campaign {}: {} mentions x {} annotators", c.config().campaign_id, p.mentions, p.annotators);
            println!("{:<16} {:>8} {:>8} {:>8}", "annotator", "pending", "done", "skipped");
            for (a, s) in &p.per_annotator {
                println!("{:<16} {:>8} {:>8} {:>8}", a, s.pending, s.done, s.skipped);
            }
            let o = &p.overall;
            println!("{:<16} {:>8} {:>8} {:>8}", "all", o.pending, o.done, o.skipped);
            println!("\nfilled layers among DONE records:");
            for l in &c.config().layers {
                println!("  {:<22} {}", l, p.per_layer_filled.get(l).copied().unwrap_or(0));
            }
            println!("flagged for adjudication: {}", p.flagged);
            Ok(ExitCode::SUCCESS)
        }
        AnnotateCommand::Iaa {
            campaign,
            layers,
            pooling,
            out,
            format,
        } => {
            let c = open(&campaign)?;
            for l in &layers {
                if !LAYERS.iter().any(|k| k.name == l) {
                    bail!("unknown layer {l:?}");
                }
            }
            let entries = c.agreement(&layers, pooling.into());
            let a = NamedAnalysis::new(
                "agreement",
                format!("Inter-annotator agreement, campaign {}", c.config().campaign_id),
                Analysis::Agreement { entries },
            );
            if let Some(dir) = &out {
                util::save_analyses(dir, std::slice::from_ref(&a))?;
            }
            util::print_analyses(&[a], format)?;
            Ok(ExitCode::SUCCESS)
        }
        AnnotateCommand::Serve {
            campaign,
            port,
            host,
            open: launch,
        } => {
            let c = open(&campaign)?;
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(mention_lens_server::serve_campaign_api(c, SocketAddr::new(host, port), |addr| {
                let url = format!("http://{addr}/");
                eprintln!("serving campaign on {url} (ctrl-c to stop)");
                if launch {
                    open_browser(&url);
                }
            }))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn open_browser(url: &str) {
    let cmd = if cfg!(target_os = "macos") {
        "open"
    } else if cfg!(windows) {
        "explorer"
    } else {
        "xdg-open"
    };
    if let Err(e) = std::process::Command::new(cmd).arg(url).spawn() {
        eprintln!("could not open a browser ({cmd}): {e}");
    }
}
