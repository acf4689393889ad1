// SPDX-License-Identifier: Apache-2.0

//! The canonical mention table: UTF-8, comma-separated, RFC 4180 quoting,
//! one mention per row.
//!
//! | column         | content                                         |
//! |----------------|-------------------------------------------------|
//! | mention_id     | unique id                                       |
//! | software_raw   | mention string as extracted                     |
//! | context        | surrounding text, empty if unknown              |
//! | pub_id         | DOI or dataset publication id                   |
//! | pub_title      | empty if unknown                                |
//! | pub_year       | four-digit year, empty if unknown               |
//! | pub_urls       | space-separated URLs                            |
//! | source_dataset | CSM, CZI_NC, CZI_COMM, CZI_PUB or OTHER         |
//! | source_row     | zero-based data row in the source file          |
//!
//! Readers look columns up by name, so extra columns (sample metadata,
//! link summaries) may follow.

use std::io::{Read, Write};

use super::linked::JoinedMention;
use super::IngestError;
use crate::model::{LinkedRepoRecord, MentionRecord, RepoSource, SourceDataset};

pub const MENTION_COLUMNS: [&str; 9] = [
    "mention_id",
    "software_raw",
    "context",
    "pub_id",
    "pub_title",
    "pub_year",
    "pub_urls",
    "source_dataset",
    "source_row",
];

const LINK_COLUMNS: [&str; 4] = ["link_count", "distinct_link_targets", "link_sources", "link_urls"];

pub struct MentionTableWriter<W: Write> {
    inner: csv::Writer<W>,
    extra: usize,
}

impl<W: Write> MentionTableWriter<W> {
    pub fn new(writer: W) -> Result<Self, IngestError> {
        Self::with_extra_columns(writer, &[])
    }

    pub fn with_extra_columns(writer: W, extra: &[&str]) -> Result<Self, IngestError> {
        let mut inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(writer);
        let header: Vec<&str> = MENTION_COLUMNS.iter().copied().chain(extra.iter().copied()).collect();
        inner.write_record(&header)?;
        Ok(MentionTableWriter {
            inner,
            extra: extra.len(),
        })
    }

    pub fn write(&mut self, rec: &MentionRecord) -> Result<(), IngestError> {
        self.write_with(rec, &[])
    }

    pub fn write_with(&mut self, rec: &MentionRecord, extra: &[&str]) -> Result<(), IngestError> {
        if extra.len() != self.extra {
            return Err(IngestError::Table(format!(
                "expected {} extra values, got {}",
                self.extra,
                extra.len()
            )));
        }
        let year = rec.pub_year.map(|y| y.to_string()).unwrap_or_default();
        let row = rec.source_row.to_string();
        let urls = rec.pub_urls.join(" ");
        let mut fields: Vec<&str> = vec![
            &rec.mention_id,
            &rec.software_raw,
            rec.context.as_deref().unwrap_or(""),
            &rec.pub_id,
            rec.pub_title.as_deref().unwrap_or(""),
            &year,
            &urls,
            rec.source_dataset.code(),
            &row,
        ];
        fields.extend_from_slice(extra);
        self.inner.write_record(&fields)?;
        Ok(())
    }

    pub fn finish(self) -> Result<W, IngestError> {
        self.inner
            .into_inner()
            .map_err(|e| IngestError::Io(e.into_error()))
    }
}

/// Streaming reader over a canonical mention table.
pub struct MentionTableReader<R: Read> {
    inner: csv::Reader<R>,
    cols: [Option<usize>; 9],
    headers: Vec<String>,
    record: csv::StringRecord,
    row: u64,
}

impl<R: Read> MentionTableReader<R> {
    pub fn new(reader: R) -> Result<Self, IngestError> {
        let mut inner = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
        let headers: Vec<String> = inner.headers()?.iter().map(String::from).collect();
        let mut cols = [None; 9];
        for (slot, name) in cols.iter_mut().zip(MENTION_COLUMNS) {
            *slot = headers.iter().position(|h| h == name);
        }
        for required in [0, 1] {
            if cols[required].is_none() {
                return Err(IngestError::Table(format!(
                    "mention table lacks column {:?}",
                    MENTION_COLUMNS[required]
                )));
            }
        }
        Ok(MentionTableReader {
            inner,
            cols,
            headers,
            record: csv::StringRecord::new(),
            row: 0,
        })
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    /// Next record plus the raw row, for callers that need extra columns.
    pub fn next_with_row(&mut self) -> Option<Result<(MentionRecord, csv::StringRecord), IngestError>> {
        match self.inner.read_record(&mut self.record) {
            Ok(false) => None,
            Ok(true) => {
                self.row += 1;
                Some(self.decode().map(|m| (m, self.record.clone())))
            }
            Err(e) => Some(Err(e.into())),
        }
    }

    fn decode(&self) -> Result<MentionRecord, IngestError> {
        let get = |i: usize| {
            self.cols[i]
                .and_then(|c| self.record.get(c))
                .unwrap_or("")
        };
        let opt = |i: usize| Some(get(i)).filter(|s| !s.is_empty()).map(String::from);
        let bad = |what: &str| IngestError::Table(format!("mention table row {}: {what}", self.row));

        let pub_year = match get(5) {
            "" => None,
            y => Some(y.parse::<i32>().map_err(|_| bad("bad pub_year"))?),
        };
        let source_dataset = match get(7) {
            "" => SourceDataset::Other,
            s => s.parse().map_err(|_| bad("bad source_dataset"))?,
        };
        let source_row = match get(8) {
            "" => self.row - 1,
            s => s.parse().map_err(|_| bad("bad source_row"))?,
        };
        let rec = MentionRecord {
            mention_id: get(0).to_string(),
            software_raw: get(1).to_string(),
            context: opt(2),
            pub_id: get(3).to_string(),
            pub_title: opt(4),
            pub_year,
            pub_urls: get(6).split_whitespace().map(String::from).collect(),
            source_dataset,
            source_row,
        };
        rec.check().map_err(|e| bad(&e.to_string()))?;
        Ok(rec)
    }
}

impl<R: Read> Iterator for MentionTableReader<R> {
    type Item = Result<MentionRecord, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_with_row().map(|r| r.map(|(m, _)| m))
    }
}

pub fn read_mention_table<R: Read>(reader: R) -> Result<Vec<MentionRecord>, IngestError> {
    MentionTableReader::new(reader)?.collect()
}

/// Writes joined mentions: the mention columns followed by a link summary.
pub fn write_joined_table<W: Write>(writer: W, rows: &[JoinedMention]) -> Result<W, IngestError> {
    let mut w = MentionTableWriter::with_extra_columns(writer, &LINK_COLUMNS)?;
    for j in rows {
        let count = j.links.len().to_string();
        let distinct = j.distinct_targets().to_string();
        let sources = j.links.iter().map(|l| l.source.code()).collect::<Vec<_>>().join(" ");
        let urls = j.links.iter().map(|l| l.url.as_str()).collect::<Vec<_>>().join(" ");
        w.write_with(&j.mention, &[&count, &distinct, &sources, &urls])?;
    }
    w.finish()
}

pub fn read_joined_table<R: Read>(reader: R) -> Result<Vec<JoinedMention>, IngestError> {
    let mut r = MentionTableReader::new(reader)?;
    let pos = |name: &str| r.headers().iter().position(|h| h == name);
    let (src_col, url_col) = (pos("link_sources"), pos("link_urls"));
    let mut out = Vec::new();
    while let Some(item) = r.next_with_row() {
        let (mention, row) = item?;
        let split = |c: Option<usize>| -> Vec<String> {
            c.and_then(|c| row.get(c))
                .unwrap_or("")
                .split_whitespace()
                .map(String::from)
                .collect()
        };
        let sources = split(src_col);
        let urls = split(url_col);
        let links = urls
            .into_iter()
            .enumerate()
            .map(|(i, url)| LinkedRepoRecord {
                mention_id: mention.mention_id.clone(),
                source: sources
                    .get(i)
                    .map(|s| RepoSource::from_loose(s))
                    .unwrap_or(RepoSource::Other),
                url,
                match_basis: None,
            })
            .collect();
        out.push(JoinedMention { mention, links });
    }
    Ok(out)
}
