// SPDX-License-Identifier: Apache-2.0

//! Citation-practice analyses over annotated mentions. Each mention
//! contributes its primary annotation (the first one recorded).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::table::{ContingencyTable, DistributionTable, Percent, Rate};
use super::StatsError;
use crate::model::{
    AnnotatedMention, AnnotationRecord, LicenseCategory, LinkQuality, MentionQuality, MentionType,
    RetrievalQuality, LICENSE_CATEGORY, MENTION_TYPE,
};

/// Precision of single-dimension distributions.
pub const DISTRIBUTION_DECIMALS: u8 = 1;
/// Precision of license × mention-type tables.
pub const CONTINGENCY_DECIMALS: u8 = 2;

pub const LICENSE_CLUSTER: &str = "license_cluster";
pub const MENTION_CLUSTER: &str = "mention_cluster";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LicenseCluster {
    Open,
    ClosedCluster,
}

impl LicenseCluster {
    pub const ALL: &'static [LicenseCluster] = &[LicenseCluster::Open, LicenseCluster::ClosedCluster];

    pub fn code(self) -> &'static str {
        match self {
            LicenseCluster::Open => "OPEN",
            LicenseCluster::ClosedCluster => "CLOSED_CLUSTER",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MentionCluster {
    Good,
    Okay,
    Poor,
    Unclustered,
}

impl MentionCluster {
    pub const ALL: &'static [MentionCluster] = &[
        MentionCluster::Good,
        MentionCluster::Okay,
        MentionCluster::Poor,
        MentionCluster::Unclustered,
    ];

    pub fn code(self) -> &'static str {
        match self {
            MentionCluster::Good => "GOOD",
            MentionCluster::Okay => "OKAY",
            MentionCluster::Poor => "POOR",
            MentionCluster::Unclustered => "UNCLUSTERED",
        }
    }
}

impl fmt::Display for LicenseCluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl fmt::Display for MentionCluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

pub fn cluster_license(category: LicenseCategory) -> LicenseCluster {
    match category {
        LicenseCategory::Permissive | LicenseCategory::Copyleft => LicenseCluster::Open,
        LicenseCategory::Closed
        | LicenseCategory::Academic
        | LicenseCategory::Unknown
        | LicenseCategory::UnknownSaas => LicenseCluster::ClosedCluster,
    }
}

pub fn cluster_mention_quality(code: MentionType) -> MentionCluster {
    match code {
        MentionType::Pub => MentionCluster::Good,
        MentionType::Pro | MentionType::Url => MentionCluster::Okay,
        MentionType::Ins | MentionType::Nam => MentionCluster::Poor,
        MentionType::Man | MentionType::Not => MentionCluster::Unclustered,
    }
}

/// [`cluster_license`] on a code string.
pub fn cluster_license_code(code: &str) -> Result<LicenseCluster, StatsError> {
    Ok(cluster_license(LicenseCategory::from_str(code)?))
}

/// [`cluster_mention_quality`] on a code string.
pub fn cluster_mention_code(code: &str) -> Result<MentionCluster, StatsError> {
    Ok(cluster_mention_quality(MentionType::from_str(code)?))
}

fn primaries(annots: &[AnnotatedMention]) -> impl Iterator<Item = (&AnnotatedMention, &AnnotationRecord)> {
    annots.iter().filter_map(|a| a.primary(None).map(|p| (a, p)))
}

/// Mention type × rolled-up license category. Records whose mention
/// quality is NA or UN, or that lack a type or license, are left out.
/// Cell percents are of the grand total.
pub fn mention_type_by_license(annots: &[AnnotatedMention]) -> ContingencyTable {
    let mut t = ContingencyTable::new(
        LICENSE_CATEGORY,
        MENTION_TYPE,
        LicenseCategory::ROLLUP.iter().map(|c| c.code().to_string()).collect(),
        MentionType::ALL.iter().map(|c| c.code().to_string()).collect(),
        CONTINGENCY_DECIMALS,
    );
    for (_, rec) in primaries(annots) {
        if matches!(rec.mention_quality(), Some(MentionQuality::Na | MentionQuality::Un)) {
            continue;
        }
        if let (Some(ty), Some(lic)) = (rec.mention_type(), rec.license_category()) {
            t.add(lic.rollup().code(), ty.code())
                .expect("categories come from the tagsets");
        }
    }
    t
}

/// Mention-type cluster × license cluster, same filter as
/// [`mention_type_by_license`].
pub fn mention_cluster_by_license_cluster(annots: &[AnnotatedMention]) -> ContingencyTable {
    let mut t = ContingencyTable::new(
        LICENSE_CLUSTER,
        MENTION_CLUSTER,
        LicenseCluster::ALL.iter().map(|c| c.code().to_string()).collect(),
        MentionCluster::ALL.iter().map(|c| c.code().to_string()).collect(),
        DISTRIBUTION_DECIMALS,
    );
    for (_, rec) in primaries(annots) {
        if matches!(rec.mention_quality(), Some(MentionQuality::Na | MentionQuality::Un)) {
            continue;
        }
        if let (Some(ty), Some(lic)) = (rec.mention_type(), rec.license_category()) {
            t.add(cluster_license(lic).code(), cluster_mention_quality(ty).code())
                .expect("categories are fixed");
        }
    }
    t
}

/// Mention types over records that have one, optionally only for
/// publications from `since_year` on (records without a year are then
/// excluded).
pub fn mention_type_distribution(annots: &[AnnotatedMention], since_year: Option<i32>) -> DistributionTable {
    let mut counts: BTreeMap<MentionType, u64> = BTreeMap::new();
    for (a, rec) in primaries(annots) {
        if let Some(y) = since_year {
            if !a.mention.pub_year.is_some_and(|py| py >= y) {
                continue;
            }
        }
        if let Some(ty) = rec.mention_type() {
            *counts.entry(ty).or_default() += 1;
        }
    }
    DistributionTable::from_counts(
        MENTION_TYPE,
        MentionType::ALL
            .iter()
            .map(|t| (t.code(), counts.get(t).copied().unwrap_or(0))),
        DISTRIBUTION_DECIMALS,
    )
}

/// Regroups a mention-type distribution into quality clusters. Percents are
/// of the full total, so unclustered types lower the other shares.
pub fn cluster_distribution(dist: &DistributionTable) -> Result<DistributionTable, StatsError> {
    if dist.dimension != MENTION_TYPE {
        return Err(StatsError::Mismatch(format!(
            "expected a {MENTION_TYPE} distribution, got {}",
            dist.dimension
        )));
    }
    let mut counts: BTreeMap<MentionCluster, u64> = BTreeMap::new();
    for row in &dist.rows {
        *counts.entry(cluster_mention_code(&row.category)?).or_default() += row.count;
    }
    Ok(DistributionTable::from_counts(
        MENTION_CLUSTER,
        MentionCluster::ALL
            .iter()
            .map(|c| (c.code(), counts.get(c).copied().unwrap_or(0))),
        dist.percent_precision,
    ))
}

/// Mention-type counts of a 2015 manual study of software mentions in
/// biology articles, total 282. That study had no NOT category; it is
/// listed with 0 so all mention-type tables share rows.
pub fn howison2015() -> DistributionTable {
    let counts = [("PUB", 105), ("MAN", 6), ("PRO", 15), ("INS", 53), ("URL", 13), ("NAM", 90)];
    DistributionTable::from_counts(
        MENTION_TYPE,
        MentionType::ALL.iter().map(|t| {
            let n = counts.iter().find(|c| c.0 == t.code()).map_or(0, |c| c.1);
            (t.code(), n)
        }),
        DISTRIBUTION_DECIMALS,
    )
}

/// Built-in baselines by name.
pub fn baseline(name: &str) -> Option<DistributionTable> {
    match name {
        "howison2015" => Some(howison2015()),
        _ => None,
    }
}

pub const BASELINES: &[&str] = &["howison2015"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub category: String,
    pub percent: Option<Percent>,
    pub baseline_percent: Option<Percent>,
    /// `percent - baseline_percent` in points; absent if either is.
    pub delta: Option<Percent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaTable {
    pub dimension: String,
    pub rows: Vec<DeltaRow>,
}

impl DeltaTable {
    pub fn delta(&self, category: &str) -> Option<Percent> {
        self.rows.iter().find(|r| r.category == category)?.delta
    }
}

/// Per-category percent-point differences. Categories present on only one
/// side count 0 on the other. Deltas subtract the rendered percents, so a
/// delta always equals the difference of the two printed values.
pub fn compare_to_baseline(dist: &DistributionTable, base: &DistributionTable) -> Result<DeltaTable, StatsError> {
    if dist.dimension != base.dimension {
        return Err(StatsError::Mismatch(format!(
            "cannot compare {} with {}",
            dist.dimension, base.dimension
        )));
    }
    if dist.percent_precision != base.percent_precision {
        return Err(StatsError::Mismatch(format!(
            "percent precision {} vs {}",
            dist.percent_precision, base.percent_precision
        )));
    }
    let mut categories: Vec<&str> = dist.categories().collect();
    for c in base.categories() {
        if !categories.contains(&c) {
            categories.push(c);
        }
    }
    let pct = |t: &DistributionTable, c: &str| {
        t.row(c)
            .map_or_else(|| Percent::of(0, t.total, t.percent_precision), |r| r.percent)
    };
    let rows = categories
        .into_iter()
        .map(|c| {
            let (p, b) = (pct(dist, c), pct(base, c));
            let delta = match (p, b) {
                (Some(p), Some(b)) => Some(p.minus(b)?),
                _ => None,
            };
            Ok(DeltaRow {
                category: c.to_string(),
                percent: p,
                baseline_percent: b,
                delta,
            })
        })
        .collect::<Result<_, StatsError>>()?;
    Ok(DeltaTable {
        dimension: dist.dimension.clone(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkStats {
    /// MULTIPLE_CONFLICT over mentions with any link.
    pub multi_target: Rate,
    /// WRONG over linked mentions whose links agree.
    pub wrong_target: Rate,
    /// NONE over all mentions with a link verdict.
    pub unlinked: Rate,
    pub verdicts: BTreeMap<String, u64>,
}

pub fn link_quality_stats(annots: &[AnnotatedMention]) -> LinkStats {
    let mut n: BTreeMap<LinkQuality, u64> = BTreeMap::new();
    for (_, rec) in primaries(annots) {
        if let Some(q) = rec.link_quality() {
            *n.entry(q).or_default() += 1;
        }
    }
    let get = |q| n.get(&q).copied().unwrap_or(0);
    let (correct, wrong, multi, none) = (
        get(LinkQuality::Correct),
        get(LinkQuality::Wrong),
        get(LinkQuality::MultipleConflict),
        get(LinkQuality::None),
    );
    LinkStats {
        multi_target: Rate::new(multi, correct + wrong + multi),
        wrong_target: Rate::new(wrong, correct + wrong),
        unlinked: Rate::new(none, correct + wrong + multi + none),
        verdicts: LinkQuality::ALL
            .iter()
            .map(|q| (q.code().to_string(), get(*q)))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionStats {
    /// Retrieval quality N over annotated mentions.
    pub incorrect_extraction: Rate,
    /// Mention quality NA over annotated mentions.
    pub not_software: Rate,
}

pub fn extraction_and_entity_stats(annots: &[AnnotatedMention]) -> ExtractionStats {
    let (mut total, mut wrong, mut na) = (0, 0, 0);
    for (_, rec) in primaries(annots) {
        total += 1;
        if rec.retrieval() == Some(RetrievalQuality::No) {
            wrong += 1;
        }
        if rec.mention_quality() == Some(MentionQuality::Na) {
            na += 1;
        }
    }
    ExtractionStats {
        incorrect_extraction: Rate::new(wrong, total),
        not_software: Rate::new(na, total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MentionRecord, SourceDataset};

    fn annotated(year: Option<i32>, ty: Option<&str>, mq: &str, lic: Option<&str>) -> AnnotatedMention {
        let id = format!("m{}", rand_id());
        AnnotatedMention {
            mention: MentionRecord {
                mention_id: id.clone(),
                software_raw: "x".into(),
                context: None,
                pub_id: "p".into(),
                pub_title: None,
                pub_year: year,
                pub_urls: vec![],
                source_dataset: SourceDataset::Other,
                source_row: 0,
            },
            annotations: vec![AnnotationRecord {
                mention_id: id,
                annotator_id: "a".into(),
                retrieval_quality: "Y".into(),
                mention_type: ty.map(String::from),
                mention_quality: Some(mq.into()),
                license_category: lic.map(String::from),
                confidence: 3,
                ..Default::default()
            }],
        }
    }

    fn rand_id() -> u64 {
        use std::sync::atomic::{AtomicU64, Ordering};
        static N: AtomicU64 = AtomicU64::new(0);
        N.fetch_add(1, Ordering::Relaxed)
    }

    #[test]
    fn clusters_are_total() {
        for &c in LicenseCategory::ALL {
            cluster_license(c);
        }
        assert_eq!(cluster_license(LicenseCategory::Copyleft), LicenseCluster::Open);
        assert_eq!(cluster_license(LicenseCategory::UnknownSaas), LicenseCluster::ClosedCluster);
        assert_eq!(cluster_license(LicenseCategory::Academic), LicenseCluster::ClosedCluster);
        assert_eq!(cluster_mention_quality(MentionType::Pub), MentionCluster::Good);
        assert_eq!(cluster_mention_quality(MentionType::Man), MentionCluster::Unclustered);
        assert_eq!(cluster_mention_quality(MentionType::Nam), MentionCluster::Poor);
        assert!(cluster_license_code("GPL").is_err());
        assert!(cluster_mention_code("XYZ").is_err());
    }

    #[test]
    fn six_record_contingency() {
        let a = [
            annotated(None, Some("INS"), "SN", Some("CLOSED")),
            annotated(None, Some("INS"), "SN", Some("CLOSED")),
            annotated(None, Some("PUB"), "SC", Some("UNKNOWN_SAAS")),
            annotated(None, Some("PUB"), "SP", Some("COPYLEFT")),
            annotated(None, Some("NAM"), "UN", Some("CLOSED")),
            annotated(None, None, "NA", None),
        ];
        let t = mention_type_by_license(&a);
        assert_eq!(t.grand_total, 4);
        assert_eq!(t.get("CLOSED", "INS"), Some(2));
        assert_eq!(t.get("UNKNOWN", "PUB"), Some(1));
        assert_eq!(t.get("COPYLEFT", "PUB"), Some(1));
        assert_eq!(t.cell_percent("CLOSED", "INS").unwrap().to_string(), "50.00");
        assert!(t.is_consistent());
        assert_eq!(mention_type_by_license(&[]).grand_total, 0);
    }

    #[test]
    fn year_filter_and_single_record() {
        let a = [
            annotated(Some(2015), Some("PUB"), "SC", None),
            annotated(Some(2016), Some("NAM"), "SN", None),
            annotated(None, Some("URL"), "SP", None),
        ];
        let d = mention_type_distribution(&a, Some(2016));
        assert_eq!(d.total, 1);
        assert_eq!(d.percent("NAM").unwrap().to_string(), "100.0");
        assert_eq!(mention_type_distribution(&a, None).total, 3);
    }

    #[test]
    fn baseline_self_comparison_is_zero() {
        let b = howison2015();
        assert_eq!(b.total, 282);
        let d = compare_to_baseline(&b, &b).unwrap();
        assert!(d.rows.iter().all(|r| r.delta == Some(Percent::from_scaled(0, 1))));
        let c = cluster_distribution(&b).unwrap();
        assert_eq!(c.percent("OKAY").unwrap().to_string(), "9.9");
        assert_eq!(c.percent("POOR").unwrap().to_string(), "50.7");
        assert!(compare_to_baseline(&c, &b).is_err());
    }

    #[test]
    fn zero_denominators_are_undefined() {
        let s = link_quality_stats(&[]);
        assert_eq!(s.wrong_target.value(), None);
        let e = extraction_and_entity_stats(&[annotated(None, Some("PUB"), "SN", None)]);
        assert_eq!(e.incorrect_extraction.value(), Some(0.0));
        assert_eq!(e.not_software.value(), Some(0.0));
    }
}
