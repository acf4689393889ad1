// SPDX-License-Identifier: Apache-2.0

//! On-disk annotation campaigns.
//!
//! A campaign directory holds:
//!
//! - `campaign.toml`: id, layers, annotators and sample provenance.
//! - `sample.csv`: the sampled mentions in the canonical mention table format.
//! - `log.csv`: every accepted action, appended and synced before it is
//!   acknowledged. This is the source of truth.
//! - `state.csv`: the current status of every (mention, annotator) pair,
//!   rewritten atomically after each change and rebuilt from the log on open.
//!
//! `log.csv` columns are `seq, action, mention_id, annotator_id, version`
//! followed by every layer, `confidence` and `notes`. `state.csv` has
//! `mention_id, annotator_id, status, version` and the same tail.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::agreement::{agreement, coding_matrix, LayerAgreement, Pooling};
use super::guideline::{guideline_checks, Advisory};
use super::layers::{layer, layer_value, set_layer, LayerKind, LAYERS};
use super::sheet::{legend_lines, read_sheet, write_sheet, SheetEntry};
use super::AnnotationError;
use crate::ingest::{read_mention_table, MentionTableWriter};
use crate::model::{
    validate_annotation, AnnotatedMention, AnnotationRecord, MentionRecord, Rule, TagsetRegistry,
    Violation,
};

pub const CONFIG_FILE: &str = "campaign.toml";
pub const SAMPLE_FILE: &str = "sample.csv";
pub const LOG_FILE: &str = "log.csv";
pub const STATE_FILE: &str = "state.csv";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    #[default]
    Pending,
    Done,
    Skipped,
}

impl Status {
    pub fn code(self) -> &'static str {
        match self {
            Status::Pending => "PENDING",
            Status::Done => "DONE",
            Status::Skipped => "SKIPPED",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Action {
    Submit,
    Skip,
    Reset,
}

impl Action {
    fn code(self) -> &'static str {
        match self {
            Action::Submit => "SUBMIT",
            Action::Skip => "SKIP",
            Action::Reset => "RESET",
        }
    }

    fn parse(s: &str) -> Option<Action> {
        match s {
            "SUBMIT" => Some(Action::Submit),
            "SKIP" => Some(Action::Skip),
            "RESET" => Some(Action::Reset),
            _ => None,
        }
    }
}

/// Where the sample came from; informational.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleProvenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub campaign_id: String,
    pub layers: Vec<String>,
    pub annotators: Vec<String>,
    #[serde(default)]
    pub sample: SampleProvenance,
}

impl CampaignConfig {
    /// A campaign over every layer.
    pub fn new(campaign_id: impl Into<String>, annotators: Vec<String>) -> Self {
        CampaignConfig {
            campaign_id: campaign_id.into(),
            layers: LAYERS.iter().map(|l| l.name.to_string()).collect(),
            annotators,
            sample: SampleProvenance::default(),
        }
    }

    fn check(&self, registry: &TagsetRegistry) -> Result<(), AnnotationError> {
        let bad = |m: String| Err(AnnotationError::Config(m));
        if self.campaign_id.trim().is_empty() {
            return bad("campaign_id is empty".into());
        }
        if self.annotators.is_empty() {
            return bad("a campaign needs at least one annotator".into());
        }
        let mut seen = HashSet::new();
        for a in &self.annotators {
            if a.trim().is_empty() || a.trim() != a {
                return bad(format!("invalid annotator id {a:?}"));
            }
            if !seen.insert(a) {
                return bad(format!("annotator {a:?} listed twice"));
            }
        }
        let mut seen = HashSet::new();
        for l in &self.layers {
            match layer(l) {
                None => return bad(format!("unknown layer {l:?}")),
                Some(layer) => {
                    if let LayerKind::Code(ts) = layer.kind {
                        if registry.get(ts).is_none() {
                            return bad(format!("layer {l:?} needs tagset {ts:?}"));
                        }
                    }
                }
            }
            if !seen.insert(l) {
                return bad(format!("layer {l:?} listed twice"));
            }
        }
        if !self.layers.iter().any(|l| l == crate::model::RETRIEVAL_QUALITY) {
            return bad("retrieval_quality is always annotated and must be a campaign layer".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub status: Status,
    pub version: u64,
    /// Present exactly when the status is DONE.
    pub record: Option<AnnotationRecord>,
}

/// One line of the log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub seq: u64,
    pub action: Action,
    pub mention_id: String,
    pub annotator_id: String,
    pub version: u64,
    /// The submitted record for SUBMIT; otherwise only `notes` is set.
    pub record: AnnotationRecord,
}

/// Response to an accepted write.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Receipt {
    pub mention_id: String,
    pub annotator_id: String,
    pub status: Status,
    pub version: u64,
    pub warnings: Vec<Advisory>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub pending: u64,
    pub done: u64,
    pub skipped: u64,
}

impl StatusCounts {
    fn add(&mut self, s: Status) {
        match s {
            Status::Pending => self.pending += 1,
            Status::Done => self.done += 1,
            Status::Skipped => self.skipped += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.pending + self.done + self.skipped
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub mentions: u64,
    pub annotators: u64,
    pub overall: StatusCounts,
    pub per_annotator: BTreeMap<String, StatusCounts>,
    /// DONE records with the layer filled, per layer.
    pub per_layer_filled: BTreeMap<String, u64>,
    /// DONE records flagged for adjudication.
    pub flagged: u64,
}

/// A sheet row that was not stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    pub row: u64,
    pub line: u64,
    pub mention_id: String,
    pub annotator_id: String,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    /// Records stored by this import.
    pub accepted: Vec<AnnotationRecord>,
    /// Rows identical to the stored record.
    pub unchanged: u64,
    /// Rows with nothing filled in.
    pub blank: u64,
    pub rejected: Vec<RejectedRow>,
}

pub struct Campaign {
    dir: PathBuf,
    config: CampaignConfig,
    registry: TagsetRegistry,
    mentions: Vec<MentionRecord>,
    mention_index: HashMap<String, usize>,
    annotator_index: HashMap<String, usize>,
    slots: Vec<Slot>,
    log: File,
    seq: u64,
}

fn log_header() -> Vec<String> {
    ["seq", "action", "mention_id", "annotator_id", "version"]
        .iter()
        .map(|s| s.to_string())
        .chain(record_tail_header())
        .collect()
}

fn state_header() -> Vec<String> {
    ["mention_id", "annotator_id", "status", "version"]
        .iter()
        .map(|s| s.to_string())
        .chain(record_tail_header())
        .collect()
}

fn record_tail_header() -> impl Iterator<Item = String> {
    LAYERS
        .iter()
        .map(|l| l.name.to_string())
        .chain(["confidence".to_string(), "notes".to_string()])
}

fn record_tail(rec: Option<&AnnotationRecord>) -> Vec<String> {
    let mut out: Vec<String> = LAYERS
        .iter()
        .map(|l| rec.and_then(|r| layer_value(r, l.name)).unwrap_or_default())
        .collect();
    out.push(rec.filter(|r| r.confidence > 0).map(|r| r.confidence.to_string()).unwrap_or_default());
    out.push(rec.and_then(|r| r.notes.clone()).unwrap_or_default());
    out
}

fn csv_line(fields: &[String]) -> Result<Vec<u8>, AnnotationError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(fields)?;
    w.into_inner().map_err(|e| AnnotationError::Io(e.into_error()))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), AnnotationError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| AnnotationError::Io(e.error))?;
    Ok(())
}

impl Campaign {
    /// Creates a campaign directory. Fails if one already exists there.
    pub fn init(
        dir: impl AsRef<Path>,
        config: CampaignConfig,
        mentions: Vec<MentionRecord>,
        registry: TagsetRegistry,
    ) -> Result<Campaign, AnnotationError> {
        let dir = dir.as_ref();
        config.check(&registry)?;
        let mut seen = HashSet::new();
        for m in &mentions {
            m.check()?;
            if m.mention_id.starts_with('#') {
                return Err(AnnotationError::Config(format!(
                    "mention id {:?} starts with '#', which sheets treat as a comment",
                    m.mention_id
                )));
            }
            if !seen.insert(m.mention_id.as_str()) {
                return Err(AnnotationError::Config(format!("mention id {:?} occurs twice", m.mention_id)));
            }
        }
        fs::create_dir_all(dir)?;
        if dir.join(CONFIG_FILE).exists() {
            return Err(AnnotationError::Config(format!("{} already holds a campaign", dir.display())));
        }
        let mut sample = MentionTableWriter::new(Vec::new())?;
        for m in &mentions {
            sample.write(m)?;
        }
        write_atomic(&dir.join(SAMPLE_FILE), &sample.finish()?)?;
        write_atomic(&dir.join(LOG_FILE), &csv_line(&log_header())?)?;
        let toml = toml::to_string(&config).map_err(|e| AnnotationError::Config(e.to_string()))?;
        write_atomic(&dir.join(CONFIG_FILE), toml.as_bytes())?;
        Campaign::open(dir, registry)
    }

    /// Loads a campaign and replays its log.
    pub fn open(dir: impl AsRef<Path>, registry: TagsetRegistry) -> Result<Campaign, AnnotationError> {
        let dir = dir.as_ref().to_path_buf();
        let text = fs::read_to_string(dir.join(CONFIG_FILE))?;
        let config: CampaignConfig = toml::from_str(&text).map_err(|e| AnnotationError::Config(e.to_string()))?;
        config.check(&registry)?;
        let mentions = read_mention_table(BufReader::new(File::open(dir.join(SAMPLE_FILE))?))?;
        let mention_index = mentions
            .iter()
            .enumerate()
            .map(|(i, m)| (m.mention_id.clone(), i))
            .collect();
        let annotator_index = config
            .annotators
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let slots = vec![Slot::default(); mentions.len() * config.annotators.len()];
        let log = OpenOptions::new().append(true).open(dir.join(LOG_FILE))?;
        let mut c = Campaign {
            dir,
            config,
            registry,
            mentions,
            mention_index,
            annotator_index,
            slots,
            log,
            seq: 0,
        };
        for entry in c.history()? {
            c.apply(&entry)?;
            c.seq = entry.seq;
        }
        c.write_state()?;
        Ok(c)
    }

    /// Every log entry in order.
    pub fn history(&self) -> Result<Vec<LogEntry>, AnnotationError> {
        let mut r = csv::ReaderBuilder::new().from_reader(BufReader::new(File::open(self.dir.join(LOG_FILE))?));
        let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
        if header != log_header() {
            return Err(AnnotationError::Corrupt(format!("{LOG_FILE}: unexpected header")));
        }
        let mut out = Vec::new();
        for (i, row) in r.records().enumerate() {
            let row = row?;
            let corrupt = |what: &str| AnnotationError::Corrupt(format!("{LOG_FILE} entry {}: {what}", i + 1));
            let seq: u64 = row[0].parse().map_err(|_| corrupt("bad seq"))?;
            let action = Action::parse(&row[1]).ok_or_else(|| corrupt("bad action"))?;
            let version: u64 = row[4].parse().map_err(|_| corrupt("bad version"))?;
            let mut record = AnnotationRecord {
                mention_id: row[2].to_string(),
                annotator_id: row[3].to_string(),
                ..Default::default()
            };
            for (j, l) in LAYERS.iter().enumerate() {
                set_layer(&mut record, l.name, &row[5 + j]).map_err(|v| corrupt(&v.message))?;
            }
            let tail = 5 + LAYERS.len();
            if !row[tail].is_empty() {
                record.confidence = row[tail].parse().map_err(|_| corrupt("bad confidence"))?;
            }
            record.notes = Some(row[tail + 1].to_string()).filter(|s| !s.is_empty());
            out.push(LogEntry {
                seq,
                action,
                mention_id: row[2].to_string(),
                annotator_id: row[3].to_string(),
                version,
                record,
            });
        }
        Ok(out)
    }

    fn slot_index(&self, mention_id: &str, annotator_id: &str) -> Result<usize, Vec<Violation>> {
        let mut v = Vec::new();
        let m = self.mention_index.get(mention_id);
        if m.is_none() {
            v.push(Violation::new(
                "mention_id",
                Rule::UnknownReference,
                format!("{mention_id:?} is not in the campaign sample"),
            ));
        }
        let a = self.annotator_index.get(annotator_id);
        if a.is_none() {
            v.push(Violation::new(
                "annotator_id",
                Rule::UnknownReference,
                format!("{annotator_id:?} is not a campaign annotator"),
            ));
        }
        match (m, a) {
            (Some(m), Some(a)) => Ok(m * self.config.annotators.len() + a),
            _ => Err(v),
        }
    }

    fn apply(&mut self, e: &LogEntry) -> Result<(), AnnotationError> {
        let i = self
            .slot_index(&e.mention_id, &e.annotator_id)
            .map_err(|_| AnnotationError::Corrupt(format!("log entry {} references an unknown slot", e.seq)))?;
        let slot = &mut self.slots[i];
        match e.action {
            Action::Submit => {
                if !validate_annotation(&e.record, &self.registry)?.is_valid() {
                    return Err(AnnotationError::Corrupt(format!("log entry {} holds an invalid record", e.seq)));
                }
                slot.status = Status::Done;
                slot.record = Some(e.record.clone());
            }
            Action::Skip => {
                slot.status = Status::Skipped;
                slot.record = None;
            }
            Action::Reset => {
                slot.status = Status::Pending;
                slot.record = None;
            }
        }
        slot.version = e.version;
        Ok(())
    }

    fn append(&mut self, action: Action, mention_id: &str, annotator_id: &str, record: &AnnotationRecord) -> Result<LogEntry, AnnotationError> {
        let i = self.slot_index(mention_id, annotator_id).map_err(AnnotationError::Rejected)?;
        let entry = LogEntry {
            seq: self.seq + 1,
            action,
            mention_id: mention_id.to_string(),
            annotator_id: annotator_id.to_string(),
            version: self.slots[i].version + 1,
            record: record.clone(),
        };
        let mut fields = vec![
            entry.seq.to_string(),
            action.code().to_string(),
            entry.mention_id.clone(),
            entry.annotator_id.clone(),
            entry.version.to_string(),
        ];
        fields.extend(record_tail(Some(record)));
        self.log.write_all(&csv_line(&fields)?)?;
        self.log.sync_data()?;
        self.apply(&entry)?;
        self.seq = entry.seq;
        Ok(entry)
    }

    fn write_state(&self) -> Result<(), AnnotationError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(state_header())?;
        let n = self.config.annotators.len();
        for (i, slot) in self.slots.iter().enumerate() {
            let mut row = vec![
                self.mentions[i / n].mention_id.clone(),
                self.config.annotators[i % n].clone(),
                slot.status.code().to_string(),
                slot.version.to_string(),
            ];
            row.extend(record_tail(slot.record.as_ref()));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| AnnotationError::Io(e.into_error()))?;
        write_atomic(&self.dir.join(STATE_FILE), &bytes)
    }

    /// Violations that block storing `rec`.
    pub fn check(&self, rec: &AnnotationRecord) -> Result<Vec<Violation>, AnnotationError> {
        let mut v = self.slot_index(&rec.mention_id, &rec.annotator_id).err().unwrap_or_default();
        for l in LAYERS.iter().filter(|l| !self.config.layers.iter().any(|c| c == l.name)) {
            if layer_value(rec, l.name).is_some() {
                v.push(Violation::new(l.name, Rule::Malformed, "layer is not part of this campaign"));
            }
        }
        v.extend(validate_annotation(rec, &self.registry)?.violations);
        Ok(v)
    }

    /// Stores a record. Every accepted submit bumps the version, even if the
    /// record is unchanged; the last write wins.
    pub fn submit(&mut self, rec: AnnotationRecord) -> Result<Receipt, AnnotationError> {
        let violations = self.check(&rec)?;
        if !violations.is_empty() {
            return Err(AnnotationError::Rejected(violations));
        }
        let entry = self.append(Action::Submit, &rec.mention_id, &rec.annotator_id, &rec)?;
        self.write_state()?;
        Ok(self.receipt(&entry))
    }

    /// Marks a pair SKIPPED, dropping any stored record.
    pub fn skip(&mut self, mention_id: &str, annotator_id: &str, note: Option<String>) -> Result<Receipt, AnnotationError> {
        self.control(Action::Skip, mention_id, annotator_id, note)
    }

    /// Returns a pair to PENDING, dropping any stored record.
    pub fn reset(&mut self, mention_id: &str, annotator_id: &str, note: Option<String>) -> Result<Receipt, AnnotationError> {
        self.control(Action::Reset, mention_id, annotator_id, note)
    }

    fn control(&mut self, action: Action, mention_id: &str, annotator_id: &str, note: Option<String>) -> Result<Receipt, AnnotationError> {
        let rec = AnnotationRecord {
            mention_id: mention_id.to_string(),
            annotator_id: annotator_id.to_string(),
            notes: note.filter(|n| !n.trim().is_empty()),
            ..Default::default()
        };
        let entry = self.append(action, mention_id, annotator_id, &rec)?;
        self.write_state()?;
        Ok(self.receipt(&entry))
    }

    fn receipt(&self, e: &LogEntry) -> Receipt {
        let i = self.slot_index(&e.mention_id, &e.annotator_id).expect("slot exists");
        let slot = &self.slots[i];
        let warnings = match (&slot.record, self.mention_index.get(&e.mention_id)) {
            (Some(r), Some(&m)) => guideline_checks(r, &self.mentions[m]),
            _ => Vec::new(),
        };
        Receipt {
            mention_id: e.mention_id.clone(),
            annotator_id: e.annotator_id.clone(),
            status: slot.status,
            version: slot.version,
            warnings,
        }
    }

    pub fn config(&self) -> &CampaignConfig {
        &self.config
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn registry(&self) -> &TagsetRegistry {
        &self.registry
    }

    pub fn mentions(&self) -> &[MentionRecord] {
        &self.mentions
    }

    pub fn mention(&self, mention_id: &str) -> Option<&MentionRecord> {
        self.mention_index.get(mention_id).map(|&i| &self.mentions[i])
    }

    pub fn slot(&self, mention_id: &str, annotator_id: &str) -> Option<&Slot> {
        self.slot_index(mention_id, annotator_id).ok().map(|i| &self.slots[i])
    }

    /// Slots of one mention in annotator order.
    pub fn slots_of(&self, mention_id: &str) -> Option<&[Slot]> {
        let n = self.config.annotators.len();
        self.mention_index.get(mention_id).map(|&i| &self.slots[i * n..(i + 1) * n])
    }

    /// Log entries of one mention that carry a note.
    pub fn thread(&self, mention_id: &str) -> Result<Vec<LogEntry>, AnnotationError> {
        Ok(self
            .history()?
            .into_iter()
            .filter(|e| e.mention_id == mention_id && e.record.notes.is_some())
            .collect())
    }

    pub fn is_annotator(&self, annotator_id: &str) -> bool {
        self.annotator_index.contains_key(annotator_id)
    }

    pub fn progress(&self) -> Progress {
        let mut overall = StatusCounts::default();
        let mut per_annotator: BTreeMap<String, StatusCounts> = self
            .config
            .annotators
            .iter()
            .map(|a| (a.clone(), StatusCounts::default()))
            .collect();
        let mut per_layer_filled: BTreeMap<String, u64> = self.config.layers.iter().map(|l| (l.clone(), 0)).collect();
        let mut flagged = 0;
        let n = self.config.annotators.len();
        for (i, slot) in self.slots.iter().enumerate() {
            overall.add(slot.status);
            per_annotator
                .get_mut(&self.config.annotators[i % n])
                .expect("registered")
                .add(slot.status);
            if let Some(r) = &slot.record {
                for (l, c) in per_layer_filled.iter_mut() {
                    if layer_value(r, l).is_some() {
                        *c += 1;
                    }
                }
                if guideline_checks(r, &self.mentions[i / n]).iter().any(|a| a.id == super::guideline::ADJUDICATE) {
                    flagged += 1;
                }
            }
        }
        Progress {
            mentions: self.mentions.len() as u64,
            annotators: n as u64,
            overall,
            per_annotator,
            per_layer_filled,
            flagged,
        }
    }

    /// Sheet for one annotator, pre-filled with their DONE records.
    pub fn export_sheet<W: Write>(&self, annotator_id: &str, out: W) -> Result<W, AnnotationError> {
        let a = *self
            .annotator_index
            .get(annotator_id)
            .ok_or_else(|| AnnotationError::UnknownAnnotator(annotator_id.to_string()))?;
        let n = self.config.annotators.len();
        let title = vec![format!(
            "annotation sheet: campaign {}, annotator {annotator_id}",
            self.config.campaign_id
        )];
        let entries = self.mentions.iter().enumerate().map(|(m, mention)| SheetEntry {
            mention,
            annotator_id,
            record: self.slots[m * n + a].record.as_ref(),
        });
        write_sheet(out, &title, &self.registry, &self.config.layers, entries)
    }

    /// Legend lines for the campaign layers.
    pub fn legend(&self) -> Vec<String> {
        legend_lines(&self.registry, &self.config.layers)
    }

    /// Imports a completed sheet. Valid rows that differ from the stored
    /// record are stored; other rows are reported.
    pub fn import_sheet<R: std::io::Read>(&mut self, input: R) -> Result<ImportReport, AnnotationError> {
        let sheet = read_sheet(input, Some(&self.config.layers))?;
        let mut report = ImportReport::default();
        for row in sheet.rows {
            if row.blank {
                report.blank += 1;
                continue;
            }
            let mut violations = row.violations;
            violations.extend(self.check(&row.record)?);
            if !violations.is_empty() {
                report.rejected.push(RejectedRow {
                    row: row.row,
                    line: row.line,
                    mention_id: row.record.mention_id,
                    annotator_id: row.record.annotator_id,
                    violations,
                });
                continue;
            }
            let current = self.slot(&row.record.mention_id, &row.record.annotator_id);
            if current.and_then(|s| s.record.as_ref()) == Some(&row.record) {
                report.unchanged += 1;
                continue;
            }
            self.append(Action::Submit, &row.record.mention_id.clone(), &row.record.annotator_id.clone(), &row.record)?;
            report.accepted.push(row.record);
        }
        self.write_state()?;
        Ok(report)
    }

    /// DONE records grouped by mention, in sample and annotator order.
    /// Mentions without any DONE record are left out.
    pub fn annotations(&self) -> Vec<AnnotatedMention> {
        let n = self.config.annotators.len();
        self.mentions
            .iter()
            .enumerate()
            .filter_map(|(m, mention)| {
                let annotations: Vec<AnnotationRecord> =
                    self.slots[m * n..(m + 1) * n].iter().filter_map(|s| s.record.clone()).collect();
                (!annotations.is_empty()).then(|| AnnotatedMention {
                    mention: mention.clone(),
                    annotations,
                })
            })
            .collect()
    }

    /// Every DONE record as one sheet over all layers.
    pub fn export_all<W: Write>(&self, out: W) -> Result<W, AnnotationError> {
        let annots = self.annotations();
        let title = vec![format!("annotations: campaign {}", self.config.campaign_id)];
        let entries = annots.iter().flat_map(|a| {
            a.annotations.iter().map(move |r| SheetEntry {
                mention: &a.mention,
                annotator_id: &r.annotator_id,
                record: Some(r),
            })
        });
        write_sheet(out, &title, &self.registry, &self.config.layers, entries)
    }

    /// The units × annotators matrix of one layer over the whole sample.
    pub fn matrix(&self, layer: &str) -> Vec<Vec<Option<String>>> {
        coding_matrix(&self.annotations(), &self.config.annotators, layer)
    }

    /// Agreement on `layers` (the campaign's agreement layers if empty).
    pub fn agreement(&self, layers: &[String], pooling: Pooling) -> Vec<LayerAgreement> {
        let layers: Vec<String> = if layers.is_empty() {
            super::layers::AGREEMENT_LAYERS
                .iter()
                .filter(|l| self.config.layers.iter().any(|c| c == *l))
                .map(|l| l.to_string())
                .collect()
        } else {
            layers.to_vec()
        };
        agreement(&self.annotations(), &self.config.annotators, &layers, pooling)
    }
}
