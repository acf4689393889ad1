// SPDX-License-Identifier: Apache-2.0

//! Toolkit for assessing software-mention datasets.
//!
//! The pipeline reads dataset dumps into a canonical mention table
//! ([`ingest`]), draws seeded samples from it ([`sampling`]), runs annotation
//! campaigns over the samples ([`annotation`]), and computes agreement and
//! citation-practice statistics ([`stats`]) that [`report`] renders as
//! tables and SVG figures.

pub mod annotation;
pub mod ingest;
pub mod model;
pub mod report;
pub mod sampling;
pub mod stats;

pub use model::{
    AnnotatedMention, AnnotationRecord, LicenseCategory, LinkQuality, MentionQuality,
    MentionRecord, MentionType, RetrievalQuality, SoftwareKey, SourceDataset, TagsetRegistry,
};
