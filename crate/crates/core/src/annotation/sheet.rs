// SPDX-License-Identifier: Apache-2.0

//! Annotation sheets: comma-separated UTF-8 with a legend of `#` lines
//! before the header.
//!
//! ```text
//! # annotation sheet: campaign csm-100, annotator SD
//! # mention_type: PUB [order 2] Cite to publication. A reference to ...
//! mention_id,software_raw,context,pub_id,pub_year,pub_urls,retrieval_quality,...,confidence,notes,annotator_id
//! ```
//!
//! Mention columns are read-only context; layer cells, `confidence` and
//! `notes` are filled in by the annotator. A row with all of those empty
//! is unannotated.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::Serialize;

use super::layers::{is_blank, layer, set_layer, layer_value, LayerKind, LAYERS};
use super::AnnotationError;
use crate::model::{
    validate_annotation, AnnotatedMention, AnnotationRecord, MentionRecord, Rule, SourceDataset,
    TagsetRegistry, Violation,
};

pub const SHEET_MENTION_COLUMNS: [&str; 6] =
    ["mention_id", "software_raw", "context", "pub_id", "pub_year", "pub_urls"];
pub const SHEET_TAIL_COLUMNS: [&str; 3] = ["confidence", "notes", "annotator_id"];

/// Full header for the given layers.
pub fn sheet_header(layers: &[String]) -> Vec<String> {
    SHEET_MENTION_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(layers.iter().cloned())
        .chain(SHEET_TAIL_COLUMNS.iter().map(|s| s.to_string()))
        .collect()
}

/// Legend lines (without the `# ` prefix) describing each coded layer.
pub fn legend_lines(registry: &TagsetRegistry, layers: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for name in layers {
        match layer(name).map(|l| l.kind) {
            Some(LayerKind::Code(ts)) => {
                if let Some(set) = registry.get(ts) {
                    for c in &set.codes {
                        let order = c.order.map(|o| format!(" [order {o}]")).unwrap_or_default();
                        out.push(one_line(&format!(
                            "{name}: {}{order} {}. {}",
                            c.code, c.label, c.definition
                        )));
                    }
                }
            }
            Some(LayerKind::Flag) => out.push(format!("{name}: Y or N")),
            Some(LayerKind::Text) => out.push(format!("{name}: free text")),
            None => {}
        }
    }
    out.push(format!("confidence: integer 1 (unsure) to 5 (certain)"));
    out
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// One sheet row to write.
pub struct SheetEntry<'a> {
    pub mention: &'a MentionRecord,
    pub annotator_id: &'a str,
    pub record: Option<&'a AnnotationRecord>,
}

/// Writes a sheet. `title` lines go first, then the legend, then the rows.
pub fn write_sheet<'a, W: Write>(
    out: W,
    title: &[String],
    registry: &TagsetRegistry,
    layers: &[String],
    entries: impl IntoIterator<Item = SheetEntry<'a>>,
) -> Result<W, AnnotationError> {
    let mut out = out;
    for line in title.iter().cloned().chain(legend_lines(registry, layers)) {
        writeln!(out, "# {}", one_line(&line))?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(out);
    w.write_record(sheet_header(layers))?;
    for e in entries {
        let m = e.mention;
        let mut row: Vec<String> = vec![
            m.mention_id.clone(),
            m.software_raw.clone(),
            m.context.clone().unwrap_or_default(),
            m.pub_id.clone(),
            m.pub_year.map(|y| y.to_string()).unwrap_or_default(),
            m.pub_urls.join(" "),
        ];
        for l in layers {
            row.push(e.record.and_then(|r| layer_value(r, l)).unwrap_or_default());
        }
        row.push(
            e.record
                .filter(|r| r.confidence > 0)
                .map(|r| r.confidence.to_string())
                .unwrap_or_default(),
        );
        row.push(e.record.and_then(|r| r.notes.clone()).unwrap_or_default());
        row.push(e.annotator_id.to_string());
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| AnnotationError::Io(e.into_error()))
}

/// One parsed data row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheetRow {
    /// 1-based data row (legend and header excluded).
    pub row: u64,
    /// 1-based line in the file where the row starts.
    pub line: u64,
    /// Mention columns as found in the sheet.
    pub mention: MentionRecord,
    pub record: AnnotationRecord,
    /// No layer, confidence or note filled in.
    pub blank: bool,
    /// Cells that could not be read.
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParsedSheet {
    pub layers: Vec<String>,
    pub rows: Vec<SheetRow>,
}

/// Reads a sheet. With `expected_layers`, the header must match exactly;
/// otherwise any subset of known layers is accepted.
pub fn read_sheet<R: Read>(input: R, expected_layers: Option<&[String]>) -> Result<ParsedSheet, AnnotationError> {
    let mut data = Vec::new();
    let mut input = input;
    input.read_to_end(&mut data)?;
    // Line numbers come from byte offsets; the csv reader's own count is
    // off by one after CRLF terminators.
    let line_of = |byte: usize| {
        let mut start = byte.min(data.len());
        while start < data.len() && matches!(data[start], b'\r' | b'\n') {
            start += 1;
        }
        data[..start].iter().filter(|&&b| b == b'\n').count() as u64 + 1
    };
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(data.as_slice());
    let header: Vec<String> = r
        .headers()?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_string())
        .collect();

    let layers: Vec<String> = match expected_layers {
        Some(expected) => {
            let want = sheet_header(expected);
            if header != want {
                return Err(AnnotationError::HeaderMismatch {
                    expected: want.join(","),
                    found: header.join(","),
                });
            }
            expected.to_vec()
        }
        None => {
            for required in ["mention_id", "annotator_id"] {
                if !header.iter().any(|h| h == required) {
                    return Err(AnnotationError::HeaderMismatch {
                        expected: format!("a {required} column"),
                        found: header.join(","),
                    });
                }
            }
            header
                .iter()
                .filter(|h| LAYERS.iter().any(|l| l.name == h.as_str()))
                .cloned()
                .collect()
        }
    };
    let col: HashMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();

    let mut rows = Vec::new();
    let mut rec = csv::StringRecord::new();
    let mut n = 0;
    while r.read_record(&mut rec)? {
        n += 1;
        let line = rec.position().map_or(0, |p| line_of(p.byte() as usize));
        let get = |c: &str| col.get(c).and_then(|&i| rec.get(i)).unwrap_or("");
        let mut violations = Vec::new();

        let pub_year = match get("pub_year").trim() {
            "" => None,
            y => match y.parse() {
                Ok(v) => Some(v),
                Err(_) => {
                    violations.push(Violation::new("pub_year", Rule::Malformed, format!("not a year: {y:?}")));
                    None
                }
            },
        };
        let mention = MentionRecord {
            mention_id: get("mention_id").trim().to_string(),
            software_raw: get("software_raw").to_string(),
            context: Some(get("context").to_string()).filter(|s| !s.is_empty()),
            pub_id: get("pub_id").to_string(),
            pub_title: None,
            pub_year,
            pub_urls: get("pub_urls").split_whitespace().map(String::from).collect(),
            source_dataset: SourceDataset::Other,
            source_row: n - 1,
        };

        let mut record = AnnotationRecord {
            mention_id: mention.mention_id.clone(),
            annotator_id: get("annotator_id").trim().to_string(),
            ..Default::default()
        };
        for l in &layers {
            if let Err(v) = set_layer(&mut record, l, get(l)) {
                violations.push(v);
            }
        }
        match get("confidence").trim() {
            "" => {}
            c => match c.parse::<u8>() {
                Ok(v) => record.confidence = v,
                Err(_) => violations.push(Violation::new(
                    "confidence",
                    Rule::Malformed,
                    format!("not an integer: {c:?}"),
                )),
            },
        }
        record.notes = Some(get("notes").to_string()).filter(|s| !s.is_empty());
        let blank = is_blank(&record) && violations.is_empty();
        rows.push(SheetRow {
            row: n,
            line,
            mention,
            record,
            blank,
            violations,
        });
    }
    Ok(ParsedSheet { layers, rows })
}

/// Reads completed sheets (or a campaign export) as analysis input.
/// Blank rows are skipped; any invalid row is an error.
pub fn read_annotated<R: Read>(input: R, registry: &TagsetRegistry) -> Result<Vec<AnnotatedMention>, AnnotationError> {
    let sheet = read_sheet(input, None)?;
    let mut order: Vec<AnnotatedMention> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for row in sheet.rows {
        if row.blank {
            continue;
        }
        let mut violations = row.violations;
        violations.extend(validate_annotation(&row.record, registry)?.violations);
        if !violations.is_empty() {
            return Err(AnnotationError::InvalidRow {
                row: row.row,
                line: row.line,
                violations,
            });
        }
        match index.get(&row.mention.mention_id) {
            Some(&i) => order[i].annotations.push(row.record),
            None => {
                index.insert(row.mention.mention_id.clone(), order.len());
                order.push(AnnotatedMention {
                    mention: row.mention,
                    annotations: vec![row.record],
                });
            }
        }
    }
    Ok(order)
}

/// Convenience for tests and tools: writes annotated mentions as one sheet.
pub fn write_annotated<W: Write>(
    out: W,
    registry: &TagsetRegistry,
    annots: &[AnnotatedMention],
) -> Result<W, AnnotationError> {
    let layers: Vec<String> = LAYERS.iter().map(|l| l.name.to_string()).collect();
    let entries = annots.iter().flat_map(|a| {
        a.annotations.iter().map(move |r| SheetEntry {
            mention: &a.mention,
            annotator_id: &r.annotator_id,
            record: Some(r),
        })
    });
    write_sheet(out, &[], registry, &layers, entries)
}

impl From<csv::Error> for AnnotationError {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => match e.into_kind() {
                csv::ErrorKind::Io(io) => AnnotationError::Io(io),
                _ => unreachable!(),
            },
            _ => AnnotationError::Format(e.to_string()),
        }
    }
}
