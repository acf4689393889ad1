// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};

use super::record::AnnotationRecord;
use super::tagset::{
    TagsetRegistry, LICENSE_CATEGORY, LINK_QUALITY, MENTION_QUALITY, MENTION_TYPE,
    RETRIEVAL_QUALITY,
};
use super::ModelError;

pub const CONFIDENCE_RANGE: std::ops::RangeInclusive<u8> = 1..=5;

/// Blocking rules a stored annotation must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// A field that must always be filled is empty.
    Required,
    /// The value is not a code of the field's tagset.
    CodeNotInTagset,
    /// Mention quality `NA` allows only retrieval quality and confidence.
    NaExcludesLayer,
    ConfidenceOutOfRange,
    /// A cell that could not be read as the field's type.
    Malformed,
    /// The referenced mention or annotator is not part of the campaign.
    UnknownReference,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::Required => "required",
            Rule::CodeNotInTagset => "code-not-in-tagset",
            Rule::NaExcludesLayer => "na-excludes-layer",
            Rule::ConfidenceOutOfRange => "confidence-out-of-range",
            Rule::Malformed => "malformed",
            Rule::UnknownReference => "unknown-reference",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: Rule,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, rule: Rule, message: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            rule,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.field, self.message, self.rule)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_rule(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// Checks a record against the tagsets and the blocking rules.
///
/// A registry missing one of the five built-in tagsets is a configuration
/// error, not a validation failure.
pub fn validate_annotation(
    rec: &AnnotationRecord,
    tagsets: &TagsetRegistry,
) -> Result<ValidationReport, ModelError> {
    let retrieval = tagsets.require(RETRIEVAL_QUALITY)?;
    let mention_type = tagsets.require(MENTION_TYPE)?;
    let mention_quality = tagsets.require(MENTION_QUALITY)?;
    let license = tagsets.require(LICENSE_CATEGORY)?;
    let link = tagsets.require(LINK_QUALITY)?;

    let mut out = Vec::new();
    if rec.mention_id.trim().is_empty() {
        out.push(Violation::new("mention_id", Rule::Required, "mention_id is empty"));
    }
    if rec.annotator_id.trim().is_empty() {
        out.push(Violation::new(
            "annotator_id",
            Rule::Required,
            "annotator_id is empty",
        ));
    }
    if rec.retrieval_quality.is_empty() {
        out.push(Violation::new(
            RETRIEVAL_QUALITY,
            Rule::Required,
            "retrieval quality must always be annotated",
        ));
    } else if !retrieval.contains(&rec.retrieval_quality) {
        out.push(not_in_tagset(RETRIEVAL_QUALITY, &rec.retrieval_quality));
    }

    let optional_codes = [
        (MENTION_TYPE, rec.mention_type.as_deref(), mention_type),
        (MENTION_QUALITY, rec.mention_quality.as_deref(), mention_quality),
        (LINK_QUALITY, rec.link_quality.as_deref(), link),
        (LICENSE_CATEGORY, rec.license_category.as_deref(), license),
    ];
    for (field, value, set) in optional_codes {
        if let Some(code) = value {
            if !set.contains(code) {
                out.push(not_in_tagset(field, code));
            }
        }
    }

    if !CONFIDENCE_RANGE.contains(&rec.confidence) {
        out.push(Violation::new(
            "confidence",
            Rule::ConfidenceOutOfRange,
            format!(
                "confidence {} outside {}..={}",
                rec.confidence,
                CONFIDENCE_RANGE.start(),
                CONFIDENCE_RANGE.end()
            ),
        ));
    }

    if rec.mention_quality.as_deref() == Some("NA") {
        let excluded = [
            (MENTION_TYPE, rec.mention_type.is_some()),
            ("found_url", rec.found_url.is_some()),
            (LINK_QUALITY, rec.link_quality.is_some()),
            ("license_spdx_or_name", rec.license_spdx_or_name.is_some()),
            (LICENSE_CATEGORY, rec.license_category.is_some()),
        ];
        for (field, present) in excluded {
            if present {
                out.push(Violation::new(
                    field,
                    Rule::NaExcludesLayer,
                    format!("{field} must be empty when mention quality is NA"),
                ));
            }
        }
    }

    Ok(ValidationReport { violations: out })
}

fn not_in_tagset(field: &str, code: &str) -> Violation {
    Violation::new(
        field,
        Rule::CodeNotInTagset,
        format!("{code:?} is not a {field} code"),
    )
}
