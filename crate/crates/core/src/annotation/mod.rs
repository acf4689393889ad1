// SPDX-License-Identifier: Apache-2.0

//! Annotation campaigns: sheets for annotators, validated import, an
//! append-only store, guideline advisories and agreement.

mod agreement;
mod campaign;
mod guideline;
mod layers;
mod sheet;

use thiserror::Error;

pub use agreement::{
    agreement, annotators_of, coding_matrix, pooled_matrix, LayerAgreement, Pooling, ALL_LAYERS,
};
pub use campaign::{
    Action, Campaign, CampaignConfig, ImportReport, LogEntry, Progress, Receipt, RejectedRow,
    SampleProvenance, Slot, Status, StatusCounts, CONFIG_FILE, LOG_FILE, SAMPLE_FILE, STATE_FILE,
};
pub use guideline::{
    guideline_checks, Advisory, ADJUDICATE, ADJUDICATION_THRESHOLD, MENTION_NOT_IN_CONTEXT,
    SC_WITHOUT_URL, URL_NOT_HTTP, URL_NOT_IN_CONTEXT, URL_TYPE_WITHOUT_URL,
};
pub use layers::{is_blank, layer, layer_value, set_layer, Layer, LayerKind, AGREEMENT_LAYERS, LAYERS};
pub use sheet::{
    legend_lines, read_annotated, read_sheet, sheet_header, write_annotated, write_sheet,
    ParsedSheet, SheetEntry, SheetRow, SHEET_MENTION_COLUMNS, SHEET_TAIL_COLUMNS,
};

use crate::ingest::IngestError;
use crate::model::{ModelError, Violation};

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed sheet: {0}")]
    Format(String),
    #[error("sheet header does not match: expected {expected}, found {found}")]
    HeaderMismatch { expected: String, found: String },
    #[error("row {row} (line {line}) is invalid: {}", describe(.violations))]
    InvalidRow {
        row: u64,
        line: u64,
        violations: Vec<Violation>,
    },
    #[error("record rejected: {}", describe(.0))]
    Rejected(Vec<Violation>),
    #[error("unknown annotator {0:?}")]
    UnknownAnnotator(String),
    #[error("campaign configuration: {0}")]
    Config(String),
    #[error("campaign store is corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

fn describe(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("{} [{}]: {}", v.field, v.rule, v.message))
        .collect::<Vec<_>>()
        .join("; ")
}
