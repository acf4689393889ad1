// SPDX-License-Identifier: Apache-2.0

//! Canonical data model: mention and annotation records, the closed code
//! lists annotators choose from, and the blocking validation rules.

mod record;
mod tagset;
mod validate;

use thiserror::Error;

pub use record::{
    normalize_key, parse_year, AnnotatedMention, AnnotationRecord, LinkedRepoRecord, MatchBasis,
    MentionRecord, RepoSource, SoftwareKey, SourceDataset, YEAR_RANGE,
};
pub use tagset::{
    LicenseCategory, LinkQuality, MentionQuality, MentionType, RetrievalQuality, TagCode, Tagset,
    TagsetRegistry, LICENSE_CATEGORY, LINK_QUALITY, MENTION_QUALITY, MENTION_TYPE,
    RETRIEVAL_QUALITY,
};
pub use validate::{validate_annotation, Rule, ValidationReport, Violation, CONFIDENCE_RANGE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown tagset {0:?}")]
    UnknownTagset(String),
    #[error("{code:?} is not a valid {tagset} code")]
    InvalidCode { tagset: &'static str, code: String },
    #[error("invalid tagset {name}: {reason}")]
    InvalidTagset { name: String, reason: String },
    #[error("software name is empty after trimming")]
    EmptyName,
    #[error("best mention of an empty list")]
    EmptyMentionList,
    #[error("invalid record: {0}")]
    InvalidRecord(String),
}

/// Rank of a mention type code, 1 (best) to 7 (worst).
pub fn mention_type_rank(code: &str) -> Result<u32, ModelError> {
    code.parse::<MentionType>().map(MentionType::rank)
}

/// The best-ranked mention type among those found for one mention.
pub fn best_mention(codes: &[MentionType]) -> Result<MentionType, ModelError> {
    codes
        .iter()
        .copied()
        .min_by_key(|c| c.rank())
        .ok_or(ModelError::EmptyMentionList)
}
