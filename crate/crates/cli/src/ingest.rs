// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use mention_lens_core::ingest::{
    csm_default_headers, czi_default_headers, explode_csm, ingest_czi_raw, linked_default_headers,
    merge_linked, open_input, read_linked, read_mention_table, read_publication_rows,
    write_joined_table, Collection, Diagnostic, HeaderMap, IngestError, IngestReport, JoinReport,
    MentionSink, MentionTableWriter,
};
use mention_lens_core::model::MentionRecord;

use crate::util;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csm,
    CziRaw,
    CziLinked,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long, value_enum)]
    format: Format,
    /// Input files, gzip accepted. For czi-raw an input may be written
    /// `COLLECTION=PATH`; otherwise the collection comes from the file name.
    /// For czi-linked the first input is a mention table and the rest are
    /// link files.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    /// Rejected rows as CSV (source, row, reason, offset).
    #[arg(long)]
    reject_log: Option<PathBuf>,
    /// `field = Column` overrides for the input headers.
    #[arg(long)]
    header_map: Option<PathBuf>,
}

struct TableSink<W: Write> {
    table: MentionTableWriter<W>,
    rejects: Option<csv::Writer<Box<dyn Write>>>,
}

impl<W: Write> TableSink<W> {
    fn new(out: W, reject_log: Option<&Path>) -> Result<Self> {
        let rejects = match reject_log {
            Some(p) => {
                let mut w = csv::Writer::from_writer(Box::new(util::create(p)?) as Box<dyn Write>);
                w.write_record(["source", "row", "reason", "offset"])?;
                Some(w)
            }
            None => None,
        };
        Ok(TableSink {
            table: MentionTableWriter::new(out)?,
            rejects,
        })
    }

    fn finish(self) -> Result<()> {
        self.table.finish()?.flush()?;
        if let Some(mut r) = self.rejects {
            r.flush()?;
        }
        Ok(())
    }
}

impl<W: Write> MentionSink for TableSink<W> {
    fn mention(&mut self, rec: MentionRecord) -> Result<(), IngestError> {
        self.table.write(&rec)
    }

    fn reject(&mut self, d: &Diagnostic) -> Result<(), IngestError> {
        if let Some(w) = &mut self.rejects {
            let offset = d.offset.map(|o| o.to_string()).unwrap_or_default();
            w.write_record([d.source.as_str(), &d.row.to_string(), &d.reason, &offset])?;
        }
        Ok(())
    }
}

fn headers(args: &IngestArgs, defaults: HeaderMap) -> Result<HeaderMap> {
    match &args.header_map {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            HeaderMap::parse_over(&text, &defaults).with_context(|| format!("in {}", p.display()))
        }
        None => Ok(defaults),
    }
}

fn name_of(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn czi_input(spec: &str) -> Result<(Collection, PathBuf)> {
    if let Some((c, p)) = spec.split_once('=') {
        if let Ok(c) = c.parse() {
            return Ok((c, PathBuf::from(p)));
        }
    }
    let p = PathBuf::from(spec);
    match Collection::from_file_name(&name_of(&p)) {
        Some(c) => Ok((c, p)),
        None => bail!("cannot tell the collection of {spec}; write it as comm=PATH, non_comm=PATH or pub=PATH"),
    }
}

#[derive(Serialize)]
struct LinkedSummary {
    join: JoinReport,
    link_rows_rejected: u64,
}

pub fn run(args: IngestArgs) -> Result<ExitCode> {
    match args.format {
        Format::Csm => {
            if args.input.len() != 1 {
                bail!("csm takes one input file: mention ids are derived from its row numbers");
            }
            let path = PathBuf::from(&args.input[0]);
            let h = headers(&args, csm_default_headers())?;
            let mut sink = TableSink::new(util::create(&args.out)?, args.reject_log.as_deref())?;
            let rows = read_publication_rows(open_input(&path)?, &name_of(&path), &h)?;
            let report = explode_csm(rows, &name_of(&path), &mut sink)?;
            sink.finish()?;
            print_report(&report)
        }
        Format::CziRaw => {
            let h = headers(&args, czi_default_headers())?;
            let mut inputs = args.input.iter().map(|s| czi_input(s)).collect::<Result<Vec<_>>>()?;
            // Fixed merge order regardless of argument order.
            inputs.sort_by(|a, b| (a.0, name_of(&a.1)).cmp(&(b.0, name_of(&b.1))));
            let mut readers = Vec::with_capacity(inputs.len());
            for (c, p) in &inputs {
                readers.push((*c, name_of(p), open_input(p)?));
            }
            let mut sink = TableSink::new(util::create(&args.out)?, args.reject_log.as_deref())?;
            let report = ingest_czi_raw(readers, &h, &mut sink)?;
            sink.finish()?;
            print_report(&report)
        }
        Format::CziLinked => {
            if args.input.len() < 2 {
                bail!("czi-linked needs a mention table followed by at least one link file");
            }
            let h = headers(&args, linked_default_headers())?;
            let mentions = read_mention_table(open_input(Path::new(&args.input[0]))?)?;
            let mut links = Vec::new();
            let mut rejects = TableSink::new(io::sink(), args.reject_log.as_deref())?;
            let mut rejected = 0;
            for p in args.input[1..].iter().map(PathBuf::from) {
                for item in read_linked(open_input(&p)?, &name_of(&p), &h)? {
                    match item? {
                        Ok(l) => links.push(l),
                        Err(d) => {
                            rejected += 1;
                            rejects.reject(&d)?;
                        }
                    }
                }
            }
            rejects.finish()?;
            let (joined, join) = merge_linked(mentions, links);
            write_joined_table(util::create(&args.out)?, &joined)?.flush()?;
            let summary = LinkedSummary {
                join,
                link_rows_rejected: rejected,
            };
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn print_report(r: &IngestReport) -> Result<ExitCode> {
    println!("{}", serde_json::to_string_pretty(r)?);
    Ok(ExitCode::SUCCESS)
}
