// SPDX-License-Identifier: Apache-2.0

use std::io::Read;

use super::header_map::{HeaderMap, ResolvedColumns};
use super::list::parse_mention_list;
use super::{field, Diagnostic, IngestError, IngestReport, MentionSink, RowEvent, RowReader};
use crate::model::{parse_year, MentionRecord, SourceDataset};

/// Default column names of the publication-per-row layout.
pub fn csm_default_headers() -> HeaderMap {
    HeaderMap::with_defaults(&[
        ("doi", "doi"),
        ("id", "cord_uid"),
        ("title", "title"),
        ("source", "source_x"),
        ("license", "license"),
        ("publish_time", "publish_time"),
        ("journal", "journal"),
        ("urls", "url"),
        ("software", "software"),
    ])
}

/// One publication with its unexploded mention list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicationRow {
    pub source_row: u64,
    pub identifiers: Vec<String>,
    pub title: String,
    pub source: String,
    pub license: String,
    pub publish_time: String,
    pub journal: String,
    pub urls: Vec<String>,
    pub software_list_raw: String,
}

/// Splits an identifier or URL cell: either a list literal or `;`-separated.
fn split_multi(cell: Option<&str>) -> Vec<String> {
    let Some(cell) = cell else {
        return Vec::new();
    };
    if cell.starts_with('[') {
        if let Ok(items) = parse_mention_list(cell) {
            return items;
        }
    }
    cell.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn to_row(source_row: u64, fields: &[String], cols: &ResolvedColumns) -> PublicationRow {
    let get = |f: &str| field(fields, cols.index(f)).unwrap_or("").to_string();
    let mut identifiers = split_multi(field(fields, cols.index("doi")));
    identifiers.extend(split_multi(field(fields, cols.index("id"))));
    PublicationRow {
        source_row,
        identifiers,
        title: get("title"),
        source: get("source"),
        license: get("license"),
        publish_time: get("publish_time"),
        journal: get("journal"),
        urls: split_multi(field(fields, cols.index("urls"))),
        software_list_raw: fields
            .get(cols.index("software").unwrap_or(usize::MAX))
            .cloned()
            .unwrap_or_default(),
    }
}

/// Reads publication rows; unreadable rows come back as diagnostics.
pub fn read_publication_rows<R: Read>(
    reader: R,
    source_name: &str,
    headers: &HeaderMap,
) -> Result<impl Iterator<Item = Result<Result<PublicationRow, Diagnostic>, IngestError>>, IngestError>
{
    let mut rows = RowReader::new(reader, source_name)?;
    let cols = headers.resolve(&rows.headers);
    if !cols.has("software") {
        return Err(IngestError::MissingColumn {
            source_name: source_name.to_string(),
            field: "software".into(),
            column: headers.column("software").unwrap_or_default().to_string(),
        });
    }
    Ok(std::iter::from_fn(move || match rows.next_event() {
        Ok(None) => None,
        Ok(Some(RowEvent::Row(i, fields))) => Some(Ok(Ok(to_row(i, &fields, &cols)))),
        Ok(Some(RowEvent::Bad(d))) => Some(Ok(Err(d))),
        Err(e) => Some(Err(e)),
    }))
}

/// Explodes publication rows into one record per (publication, mention).
///
/// Bibliographic fields are copied onto every record; the mention id is
/// `csm-<source_row>-<index within row>`.
pub fn explode_csm<I, S>(rows: I, source_name: &str, sink: &mut S) -> Result<IngestReport, IngestError>
where
    I: IntoIterator<Item = Result<Result<PublicationRow, Diagnostic>, IngestError>>,
    S: MentionSink + ?Sized,
{
    let mut report = IngestReport::default();
    for item in rows {
        report.rows_read += 1;
        let row = match item? {
            Ok(row) => row,
            Err(diag) => {
                report.rows_rejected += 1;
                sink.reject(&diag)?;
                continue;
            }
        };
        let names = match parse_mention_list(&row.software_list_raw) {
            Ok(names) => names,
            Err(e) => {
                report.rows_rejected += 1;
                sink.reject(&Diagnostic {
                    source: source_name.to_string(),
                    row: row.source_row,
                    reason: e.kind.to_string(),
                    offset: Some(e.offset),
                })?;
                continue;
            }
        };
        report.rows_accepted += 1;

        let pub_id = row
            .identifiers
            .first()
            .cloned()
            .unwrap_or_else(|| format!("{source_name}:row:{}", row.source_row));
        let pub_year = parse_year(&row.publish_time);
        let pub_title = (!row.title.is_empty()).then(|| row.title.clone());
        for (idx, name) in names.into_iter().enumerate() {
            report.note_key(&name);
            report.mentions_emitted += 1;
            sink.mention(MentionRecord {
                mention_id: format!("csm-{}-{}", row.source_row, idx),
                software_raw: name,
                context: None,
                pub_id: pub_id.clone(),
                pub_title: pub_title.clone(),
                pub_year,
                pub_urls: row.urls.clone(),
                source_dataset: SourceDataset::Csm,
                source_row: row.source_row,
            })?;
        }
    }
    Ok(report)
}
