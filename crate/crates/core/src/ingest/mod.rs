// SPDX-License-Identifier: Apache-2.0

//! Streaming readers that turn dataset dumps into canonical mention tables.
//!
//! Two source layouts are supported: publication-per-row dumps whose mention
//! column holds a list literal (exploded by [`explode_csm`]) and
//! mention-per-row dumps split into collections (read by [`ingest_czi_raw`]).
//! Candidate repository links are joined on with [`merge_linked`].
//!
//! Malformed rows never abort a run: they are counted, described by a
//! [`Diagnostic`] and handed to the sink's `reject` hook.

mod csm;
mod czi;
pub mod header_map;
mod linked;
mod list;
mod table;

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::model::{normalize_key, SoftwareKey};
pub use csm::{csm_default_headers, explode_csm, read_publication_rows, PublicationRow};
pub use czi::{czi_default_headers, ingest_czi_raw, Collection, RawCziRow};
pub use header_map::{HeaderMap, HeaderMapError};
pub use linked::{
    linked_default_headers, merge_linked, read_linked, JoinReport, JoinedMention,
};
pub use list::{clean_mention, parse_mention_list, ListErrorKind, ListParseError};
pub use table::{
    read_joined_table, read_mention_table, write_joined_table, MentionTableReader,
    MentionTableWriter, MENTION_COLUMNS,
};

use crate::model::MentionRecord;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("required column {field:?} (header {column:?}) not found in {source_name}")]
    MissingColumn {
        source_name: String,
        field: String,
        column: String,
    },
    #[error(
        "duplicate mention_id {id:?}: first at {first_collection} row {first_row}, \
         again at {second_collection} row {second_row}"
    )]
    DuplicateMentionId {
        id: String,
        first_collection: String,
        first_row: u64,
        second_collection: String,
        second_row: u64,
    },
    #[error("{0}")]
    Table(String),
}

/// Why one input row was rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// Input name (file or collection).
    pub source: String,
    /// Zero-based data row index (header excluded).
    pub row: u64,
    pub reason: String,
    /// Byte offset inside the offending field, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
}

/// Exact counts for one ingest run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: u64,
    /// Rows that parsed; they may still emit zero mentions.
    pub rows_accepted: u64,
    /// Rows skipped by a content filter (e.g. not curated as software).
    pub rows_filtered: u64,
    pub rows_rejected: u64,
    pub mentions_emitted: u64,
    pub distinct_software: u64,
    #[serde(skip)]
    keys: HashSet<String>,
}

impl IngestReport {
    pub(crate) fn note_key(&mut self, software: &str) {
        if let Ok(k) = normalize_key(software) {
            if !self.keys.contains(&k) {
                self.keys.insert(k);
                self.distinct_software = self.keys.len() as u64;
            }
        }
    }

    /// Combines reports of disjoint input partitions.
    pub fn merge(mut self, other: IngestReport) -> IngestReport {
        self.rows_read += other.rows_read;
        self.rows_accepted += other.rows_accepted;
        self.rows_filtered += other.rows_filtered;
        self.rows_rejected += other.rows_rejected;
        self.mentions_emitted += other.mentions_emitted;
        self.keys.extend(other.keys);
        self.distinct_software = self.keys.len() as u64;
        self
    }

    /// `rows_read = rows_accepted + rows_filtered + rows_rejected`.
    pub fn is_conserved(&self) -> bool {
        self.rows_read == self.rows_accepted + self.rows_filtered + self.rows_rejected
    }
}

/// Receives the records and rejections an ingest run produces.
pub trait MentionSink {
    fn mention(&mut self, rec: MentionRecord) -> Result<(), IngestError>;

    fn reject(&mut self, _diag: &Diagnostic) -> Result<(), IngestError> {
        Ok(())
    }
}

impl MentionSink for Vec<MentionRecord> {
    fn mention(&mut self, rec: MentionRecord) -> Result<(), IngestError> {
        self.push(rec);
        Ok(())
    }
}

/// Collects both records and diagnostics in memory.
#[derive(Debug, Default)]
pub struct Collected {
    pub mentions: Vec<MentionRecord>,
    pub rejected: Vec<Diagnostic>,
}

impl MentionSink for Collected {
    fn mention(&mut self, rec: MentionRecord) -> Result<(), IngestError> {
        self.mentions.push(rec);
        Ok(())
    }

    fn reject(&mut self, diag: &Diagnostic) -> Result<(), IngestError> {
        self.rejected.push(diag.clone());
        Ok(())
    }
}

/// Opens a file, transparently decompressing gzip input.
pub fn open_input(path: &Path) -> io::Result<Box<dyn Read>> {
    let file = File::open(path)?;
    maybe_gunzip(BufReader::with_capacity(1 << 16, file))
}

/// Wraps a reader in a gzip decoder if it starts with the gzip magic bytes.
pub fn maybe_gunzip<R: BufRead + 'static>(mut reader: R) -> io::Result<Box<dyn Read>> {
    let head = reader.fill_buf()?;
    if head.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(flate2::bufread::MultiGzDecoder::new(reader)))
    } else {
        Ok(Box::new(reader))
    }
}

/// Row-level reader shared by the dataset readers.
pub(crate) struct RowReader<R: Read> {
    inner: csv::Reader<BufReader<R>>,
    pub(crate) headers: Vec<String>,
    record: csv::ByteRecord,
    next_row: u64,
    source: String,
}

pub(crate) enum RowEvent {
    Row(u64, Vec<String>),
    Bad(Diagnostic),
}

impl<R: Read> RowReader<R> {
    /// Comma- or tab-separated input; the delimiter is sniffed from the header line.
    pub(crate) fn new(reader: R, source: impl Into<String>) -> Result<Self, IngestError> {
        let mut reader = BufReader::with_capacity(1 << 16, reader);
        let delimiter = sniff_delimiter(reader.fill_buf()?);
        let mut inner = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .delimiter(delimiter)
            .from_reader(reader);
        let headers = inner
            .byte_headers()?
            .iter()
            .map(|h| {
                let s = String::from_utf8_lossy(h);
                s.trim_start_matches('\u{feff}').to_string()
            })
            .collect();
        Ok(RowReader {
            inner,
            headers,
            record: csv::ByteRecord::new(),
            next_row: 0,
            source: source.into(),
        })
    }

    pub(crate) fn source(&self) -> &str {
        &self.source
    }

    pub(crate) fn next_event(&mut self) -> Result<Option<RowEvent>, IngestError> {
        let row = self.next_row;
        match self.inner.read_byte_record(&mut self.record) {
            Ok(false) => Ok(None),
            Ok(true) => {
                self.next_row += 1;
                if self.record.len() != self.headers.len() {
                    return Ok(Some(RowEvent::Bad(Diagnostic {
                        source: self.source.clone(),
                        row,
                        reason: format!(
                            "expected {} fields, found {}",
                            self.headers.len(),
                            self.record.len()
                        ),
                        offset: None,
                    })));
                }
                let mut fields = Vec::with_capacity(self.record.len());
                for (i, f) in self.record.iter().enumerate() {
                    match std::str::from_utf8(f) {
                        Ok(s) => fields.push(s.to_string()),
                        Err(e) => {
                            return Ok(Some(RowEvent::Bad(Diagnostic {
                                source: self.source.clone(),
                                row,
                                reason: format!("field {i} is not valid UTF-8"),
                                offset: Some(e.valid_up_to()),
                            })))
                        }
                    }
                }
                Ok(Some(RowEvent::Row(row, fields)))
            }
            Err(e) => match e.kind() {
                csv::ErrorKind::Io(_) => Err(e.into()),
                _ => {
                    self.next_row += 1;
                    Ok(Some(RowEvent::Bad(Diagnostic {
                        source: self.source.clone(),
                        row,
                        reason: e.to_string(),
                        offset: None,
                    })))
                }
            },
        }
    }
}

fn sniff_delimiter(head: &[u8]) -> u8 {
    let line = head.split(|&b| b == b'\n').next().unwrap_or(head);
    let tabs = line.iter().filter(|&&b| b == b'\t').count();
    let commas = line.iter().filter(|&&b| b == b',').count();
    if tabs > commas {
        b'\t'
    } else {
        b','
    }
}

/// Optional non-empty field accessor.
pub(crate) fn field<'a>(fields: &'a [String], idx: Option<usize>) -> Option<&'a str> {
    idx.and_then(|i| fields.get(i))
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
}
