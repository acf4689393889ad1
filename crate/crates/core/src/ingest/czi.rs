// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use super::header_map::HeaderMap;
use super::{field, Diagnostic, IngestError, IngestReport, MentionSink, RowEvent, RowReader};
use crate::model::{parse_year, MentionRecord, SourceDataset};

/// Default column names of the raw mention-per-row layout.
pub fn czi_default_headers() -> HeaderMap {
    HeaderMap::with_defaults(&[
        ("mention_id", "ID"),
        ("pmcid", "pmcid"),
        ("doi", "doi"),
        ("software", "software"),
        ("text", "text"),
        ("curation_label", "curation_label"),
        ("pubdate", "pubdate"),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Collection {
    Commercial,
    NonCommercial,
    Publishers,
}

impl Collection {
    pub fn dataset(self) -> SourceDataset {
        match self {
            Collection::Commercial => SourceDataset::CziCommercial,
            Collection::NonCommercial => SourceDataset::CziNonCommercial,
            Collection::Publishers => SourceDataset::CziPublishers,
        }
    }

    /// Guesses the collection from a file name such as `comm_raw.tsv.gz`.
    pub fn from_file_name(name: &str) -> Option<Collection> {
        let lower = name.to_ascii_lowercase();
        if lower.contains("non_comm") || lower.contains("noncomm") || lower.contains("non-comm") {
            Some(Collection::NonCommercial)
        } else if lower.contains("comm") {
            Some(Collection::Commercial)
        } else if lower.contains("publisher") {
            Some(Collection::Publishers)
        } else {
            None
        }
    }
}

impl FromStr for Collection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "comm" | "commercial" => Ok(Collection::Commercial),
            "non_comm" | "noncomm" | "non_commercial" => Ok(Collection::NonCommercial),
            "pub" | "publishers" => Ok(Collection::Publishers),
            other => Err(format!("unknown collection {other:?}")),
        }
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Collection::Commercial => "commercial",
            Collection::NonCommercial => "non_commercial",
            Collection::Publishers => "publishers",
        })
    }
}

/// One row of the raw subset after column mapping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawCziRow {
    pub mention_id: String,
    pub paper_id: String,
    pub doi: Option<String>,
    pub software_raw: String,
    pub text: String,
    pub curation_label: String,
    pub pubdate: String,
    pub collection: Collection,
}

impl RawCziRow {
    pub fn is_curated_software(&self) -> bool {
        self.curation_label.trim().eq_ignore_ascii_case("software")
    }
}

/// Merges the raw collections and keeps the rows curated as software.
///
/// Mention ids must be unique over everything emitted; a repeat aborts the
/// run with both provenance rows.
pub fn ingest_czi_raw<R, S>(
    inputs: Vec<(Collection, String, R)>,
    headers: &HeaderMap,
    sink: &mut S,
) -> Result<IngestReport, IngestError>
where
    R: Read,
    S: MentionSink + ?Sized,
{
    let mut report = IngestReport::default();
    let mut seen: HashMap<Box<str>, (Collection, u64)> = HashMap::new();

    for (collection, name, reader) in inputs {
        let mut rows = RowReader::new(reader, name.clone())?;
        let cols = headers.resolve(&rows.headers);
        for required in ["mention_id", "software", "curation_label"] {
            if !cols.has(required) {
                return Err(IngestError::MissingColumn {
                    source_name: name,
                    field: required.into(),
                    column: headers.column(required).unwrap_or_default().into(),
                });
            }
        }

        while let Some(event) = rows.next_event()? {
            report.rows_read += 1;
            let (row_idx, fields) = match event {
                RowEvent::Row(i, f) => (i, f),
                RowEvent::Bad(d) => {
                    report.rows_rejected += 1;
                    sink.reject(&d)?;
                    continue;
                }
            };
            let get = |f: &str| field(&fields, cols.index(f));
            let raw = RawCziRow {
                mention_id: get("mention_id").unwrap_or("").to_string(),
                paper_id: get("pmcid").or(get("doi")).unwrap_or("").to_string(),
                doi: get("doi").map(String::from),
                software_raw: get("software").unwrap_or("").to_string(),
                text: get("text").unwrap_or("").to_string(),
                curation_label: get("curation_label").unwrap_or("").to_string(),
                pubdate: get("pubdate").unwrap_or("").to_string(),
                collection,
            };
            if !raw.is_curated_software() {
                report.rows_filtered += 1;
                continue;
            }
            let reject = |reason: &str| Diagnostic {
                source: rows.source().to_string(),
                row: row_idx,
                reason: reason.to_string(),
                offset: None,
            };
            if raw.mention_id.is_empty() {
                report.rows_rejected += 1;
                sink.reject(&reject("empty mention id"))?;
                continue;
            }
            if raw.software_raw.is_empty() {
                report.rows_rejected += 1;
                sink.reject(&reject("empty software name"))?;
                continue;
            }
            if let Some(&(first_coll, first_row)) = seen.get(raw.mention_id.as_str()) {
                return Err(IngestError::DuplicateMentionId {
                    id: raw.mention_id,
                    first_collection: first_coll.to_string(),
                    first_row,
                    second_collection: collection.to_string(),
                    second_row: row_idx,
                });
            }
            seen.insert(raw.mention_id.clone().into_boxed_str(), (collection, row_idx));

            report.rows_accepted += 1;
            report.mentions_emitted += 1;
            report.note_key(&raw.software_raw);
            sink.mention(to_record(raw, row_idx))?;
        }
    }
    Ok(report)
}

fn to_record(raw: RawCziRow, row: u64) -> MentionRecord {
    let mut urls = Vec::new();
    if let Some(doi) = &raw.doi {
        urls.push(format!("https://doi.org/{doi}"));
    }
    if raw.paper_id.starts_with("PMC") {
        urls.push(format!(
            "https://www.ncbi.nlm.nih.gov/pmc/articles/{}/",
            raw.paper_id
        ));
    }
    MentionRecord {
        pub_id: raw.doi.clone().unwrap_or_else(|| raw.paper_id.clone()),
        mention_id: raw.mention_id,
        software_raw: raw.software_raw,
        context: (!raw.text.is_empty()).then_some(raw.text),
        pub_title: None,
        pub_year: parse_year(&raw.pubdate),
        pub_urls: urls,
        source_dataset: raw.collection.dataset(),
        source_row: row,
    }
}
