// SPDX-License-Identifier: Apache-2.0

//! Rendering of analyses into a report directory: CSV and Markdown tables,
//! SVG figures and a provenance manifest.
//!
//! Analyses are exchanged as JSON files, one [`NamedAnalysis`] each. A
//! report is built in a temporary directory next to the destination and
//! moved into place only when complete.

mod figure;
mod render;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use figure::{
    render_comparison_figure, render_distribution_figure, Axis, Figure, FigureData, FigureKind,
    Point, Series,
};
pub use render::{to_csv, to_markdown};

use crate::annotation::LayerAgreement;
use crate::sampling::MentionCountHistogram;
use crate::stats::{
    ContingencyTable, DeltaTable, DistributionTable, ExtractionStats, LeveneResult, LinkStats,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.md";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid figure: {0}")]
    InvalidFigure(String),
    #[error("category universes differ: {0}")]
    UniverseMismatch(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Analysis {
    Distribution { table: DistributionTable },
    Contingency { table: ContingencyTable },
    Comparison { table: DeltaTable },
    Agreement { entries: Vec<LayerAgreement> },
    Links { stats: LinkStats },
    Extraction { stats: ExtractionStats },
    Counts { histogram: MentionCountHistogram },
    Levene { result: LeveneResult, groups: Vec<String> },
}

/// SHA-256 of an input file.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// An analysis with its name and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedAnalysis {
    /// File stem in the report; `[A-Za-z0-9._-]` only.
    pub name: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub description: String,
    /// Series name in comparison figures; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    #[serde(flatten)]
    pub analysis: Analysis,
    #[serde(default)]
    pub inputs: Vec<InputHash>,
    #[serde(default)]
    pub seeds: Vec<u64>,
}

impl NamedAnalysis {
    pub fn new(name: impl Into<String>, title: impl Into<String>, analysis: Analysis) -> Self {
        NamedAnalysis {
            name: name.into(),
            title: title.into(),
            description: String::new(),
            series: None,
            analysis,
            inputs: Vec::new(),
            seeds: Vec::new(),
        }
    }

    pub fn with_inputs(mut self, inputs: Vec<InputHash>) -> Self {
        self.inputs = inputs;
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_series(mut self, series: impl Into<String>) -> Self {
        self.series = Some(series.into());
        self
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Streams a file through SHA-256.
pub fn hash_file(path: &Path) -> Result<InputHash, ReportError> {
    let mut f = fs::File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(InputHash {
        path: path.display().to_string(),
        sha256: hex(&h.finalize()),
    })
}

/// Reads every `*.json` analysis in a directory, in file name order.
pub fn read_analysis_dir(dir: &Path) -> Result<Vec<NamedAnalysis>, ReportError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p)?;
            serde_json::from_slice(&bytes).map_err(|e| ReportError::Invalid(format!("{}: {e}", p.display())))
        })
        .collect()
}

/// Writes one analysis as pretty JSON, the format [`read_analysis_dir`] reads.
pub fn write_analysis(dir: &Path, a: &NamedAnalysis) -> Result<PathBuf, ReportError> {
    check_name(&a.name)?;
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.json", a.name));
    let mut bytes = serde_json::to_vec_pretty(a)?;
    bytes.push(b'\n');
    fs::write(&path, bytes)?;
    Ok(path)
}

fn check_name(name: &str) -> Result<(), ReportError> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || b"._-".contains(&b));
    if ok {
        Ok(())
    } else {
        Err(ReportError::Invalid(format!("analysis name {name:?} must match [A-Za-z0-9._-]+")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub md: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats {
            csv: true,
            md: true,
            svg: true,
        }
    }
}

impl std::str::FromStr for Formats {
    type Err = String;

    /// Comma-separated list of `csv`, `md`, `svg`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut f = Formats {
            csv: false,
            md: false,
            svg: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "csv" => f.csv = true,
                "md" => f.md = true,
                "svg" => f.svg = true,
                other => return Err(format!("unknown format {other:?}; expected csv, md or svg")),
            }
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub generated_at: String,
    pub analyses: Vec<String>,
    pub inputs: Vec<InputHash>,
    pub seeds: Vec<u64>,
    pub figures: Vec<FigureData>,
    pub files: Vec<ReportFile>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderedReport {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

/// Renders all analyses into `out`.
///
/// `out` must be absent, empty, or a previous report (it has a manifest);
/// anything else is refused before writing. `generated_at` is the only
/// field that differs between runs on identical input.
pub fn emit_report(
    analyses: &[NamedAnalysis],
    out: &Path,
    formats: Formats,
    generated_at: &str,
) -> Result<RenderedReport, ReportError> {
    let mut names = BTreeSet::new();
    for a in analyses {
        check_name(&a.name)?;
        if !names.insert(a.name.as_str()) {
            return Err(ReportError::Invalid(format!("analysis name {:?} used twice", a.name)));
        }
    }
    let replace = match fs::read_dir(out) {
        Ok(mut entries) => {
            if entries.next().is_none() {
                false
            } else if out.join(MANIFEST_FILE).is_file() {
                true
            } else {
                return Err(ReportError::Invalid(format!(
                    "{} exists and is not a report directory",
                    out.display()
                )));
            }
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => false,
        Err(e) => return Err(e.into()),
    };

    // Render everything in memory first.
    let mut files: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    let mut figures = Vec::new();
    let mut report_md = String::from("# Report\n\n");
    for a in analyses {
        if formats.csv {
            files.insert(format!("{}.csv", a.name), to_csv(a)?);
        }
        let md = to_markdown(a);
        if formats.md {
            files.insert(format!("{}.md", a.name), md.clone().into_bytes());
        }
        report_md.push_str(&md);
        if let Analysis::Counts { histogram } = &a.analysis {
            if !histogram.entries.is_empty() {
                let title = if a.title.is_empty() { &a.name } else { &a.title };
                let f = render_distribution_figure(histogram, title)?;
                if formats.svg {
                    files.insert(format!("{}.svg", a.name), f.svg.into_bytes());
                    let _ = std::fmt::Write::write_fmt(&mut report_md, format_args!("![{}]({}.svg)\n\n", a.name, a.name));
                }
                figures.push(f.data);
            }
        }
    }
    let mut by_dimension: BTreeMap<&str, Vec<(&str, &DistributionTable)>> = BTreeMap::new();
    for a in analyses {
        if let Analysis::Distribution { table } = &a.analysis {
            let series = a.series.as_deref().unwrap_or(&a.name);
            by_dimension.entry(table.dimension.as_str()).or_default().push((series, table));
        }
    }
    for (dim, dists) in &by_dimension {
        let f = render_comparison_figure(dists, dim)?;
        let name = format!("compare-{dim}");
        if formats.svg {
            files.insert(format!("{name}.svg"), f.svg.into_bytes());
            let _ = std::fmt::Write::write_fmt(&mut report_md, format_args!("![{name}]({name}.svg)\n\n"));
        }
        figures.push(f.data);
    }
    if formats.md && !analyses.is_empty() {
        files.insert(REPORT_FILE.into(), report_md.into_bytes());
    }

    let inputs: BTreeSet<InputHash> = analyses.iter().flat_map(|a| a.inputs.iter().cloned()).collect();
    let seeds: BTreeSet<u64> = analyses.iter().flat_map(|a| a.seeds.iter().copied()).collect();
    let manifest = Manifest {
        tool: "mention-lens".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        generated_at: generated_at.to_string(),
        analyses: analyses.iter().map(|a| a.name.clone()).collect(),
        inputs: inputs.into_iter().collect(),
        seeds: seeds.into_iter().collect(),
        figures,
        files: files
            .iter()
            .map(|(p, b)| ReportFile {
                path: p.clone(),
                sha256: sha256_hex(b),
            })
            .collect(),
    };
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest)?;
    manifest_bytes.push(b'\n');
    files.insert(MANIFEST_FILE.into(), manifest_bytes);

    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent)?;
    let tmp = tempfile::Builder::new().prefix(".report-").tempdir_in(&parent)?;
    for (name, bytes) in &files {
        fs::write(tmp.path().join(name), bytes)?;
    }
    let staged = tmp.keep();
    let result = (|| -> io::Result<()> {
        if replace {
            let old = tempfile::Builder::new().prefix(".report-old-").tempdir_in(&parent)?.keep();
            fs::remove_dir(&old)?;
            fs::rename(out, &old)?;
            fs::rename(&staged, out)?;
            fs::remove_dir_all(&old)
        } else {
            if out.exists() {
                fs::remove_dir(out)?;
            }
            fs::rename(&staged, out)
        }
    })();
    if let Err(e) = result {
        let _ = fs::remove_dir_all(&staged);
        return Err(e.into());
    }
    Ok(RenderedReport {
        dir: out.to_path_buf(),
        manifest,
    })
}
