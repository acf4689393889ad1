// SPDX-License-Identifier: Apache-2.0

//! Agreement, variance and citation-practice statistics.
//!
//! Everything here is a pure function of its inputs. Floating-point sums run
//! in a fixed order, so results are reproducible bit for bit.

mod alpha;
mod analysis;
mod levene;
pub mod special;
mod table;

use thiserror::Error;

pub use alpha::{coincidences, krippendorff_alpha, AgreementResult, Coincidences, CodingMatrix};
pub use analysis::{
    baseline, cluster_distribution, cluster_license, cluster_license_code, cluster_mention_code,
    cluster_mention_quality, compare_to_baseline, extraction_and_entity_stats, howison2015,
    link_quality_stats, mention_cluster_by_license_cluster, mention_type_by_license,
    mention_type_distribution, DeltaRow, DeltaTable, ExtractionStats, LicenseCluster, LinkStats,
    MentionCluster, BASELINES, CONTINGENCY_DECIMALS, DISTRIBUTION_DECIMALS, LICENSE_CLUSTER,
    MENTION_CLUSTER,
};
pub use levene::{levene_test, levene_test_with, Center, LeveneResult};
pub use table::{ContingencyTable, DistRow, DistributionTable, Percent, Rate};

use crate::model::ModelError;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("{0}")]
    InvalidInput(String),
    #[error("alpha undefined: {0}")]
    AlphaUndefined(String),
    #[error("mismatched tables: {0}")]
    Mismatch(String),
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
