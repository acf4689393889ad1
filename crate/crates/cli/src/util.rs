// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use mention_lens_core::report::{to_csv, to_markdown, write_analysis, NamedAnalysis};

/// How analyses are printed to stdout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Md,
    Csv,
    Json,
}

pub fn print_analyses(analyses: &[NamedAnalysis], format: Output) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for a in analyses {
        match format {
            Output::Md => out.write_all(to_markdown(a).as_bytes())?,
            Output::Csv => {
                writeln!(out, "# {}", a.name)?;
                out.write_all(&to_csv(a)?)?;
                writeln!(out)?;
            }
            Output::Json => {
                serde_json::to_writer_pretty(&mut out, a)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// Writes `<name>.json` and `<name>.csv` for each analysis.
pub fn save_analyses(dir: &Path, analyses: &[NamedAnalysis]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for a in analyses {
        write_analysis(dir, a)?;
        fs::write(dir.join(format!("{}.csv", a.name)), to_csv(a)?)?;
    }
    Ok(())
}

/// Lowercased file stem with everything after the first dot dropped.
pub fn label_of(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.split('.').next().unwrap_or("");
    if stem.is_empty() {
        "input".into()
    } else {
        stem.to_lowercase()
    }
}

/// Labels for `inputs`: the given ones, or file stems.
pub fn labels(inputs: &[PathBuf], given: &[String]) -> Result<Vec<String>> {
    if given.is_empty() {
        return Ok(inputs.iter().map(|p| label_of(p)).collect());
    }
    if given.len() != inputs.len() {
        bail!("{} labels given for {} inputs", given.len(), inputs.len());
    }
    Ok(given.to_vec())
}

/// RFC 3339 time for manifests. `SOURCE_DATE_EPOCH` pins it for
/// reproducible builds.
pub fn timestamp() -> Result<String> {
    let t = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(s) => {
            let secs: i64 = s.trim().parse().context("SOURCE_DATE_EPOCH is not an integer")?;
            OffsetDateTime::from_unix_timestamp(secs)?
        }
        Err(_) => OffsetDateTime::now_utc(),
    };
    Ok(t.format(&Rfc3339)?)
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
