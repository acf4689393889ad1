// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tagset::{LicenseCategory, LinkQuality, MentionQuality, MentionType, RetrievalQuality};
use super::ModelError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SourceDataset {
    #[serde(rename = "CSM")]
    Csm,
    #[serde(rename = "CZI_NC")]
    CziNonCommercial,
    #[serde(rename = "CZI_COMM")]
    CziCommercial,
    #[serde(rename = "CZI_PUB")]
    CziPublishers,
    #[serde(rename = "OTHER")]
    #[default]
    Other,
}

impl SourceDataset {
    pub fn code(self) -> &'static str {
        match self {
            SourceDataset::Csm => "CSM",
            SourceDataset::CziNonCommercial => "CZI_NC",
            SourceDataset::CziCommercial => "CZI_COMM",
            SourceDataset::CziPublishers => "CZI_PUB",
            SourceDataset::Other => "OTHER",
        }
    }
}

impl FromStr for SourceDataset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "CSM" => SourceDataset::Csm,
            "CZI_NC" => SourceDataset::CziNonCommercial,
            "CZI_COMM" => SourceDataset::CziCommercial,
            "CZI_PUB" => SourceDataset::CziPublishers,
            "OTHER" => SourceDataset::Other,
            other => {
                return Err(ModelError::InvalidCode {
                    tagset: "source_dataset",
                    code: other.to_string(),
                })
            }
        })
    }
}

impl fmt::Display for SourceDataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// One software mention together with the bibliographic context it came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionRecord {
    pub mention_id: String,
    pub software_raw: String,
    pub context: Option<String>,
    pub pub_id: String,
    pub pub_title: Option<String>,
    pub pub_year: Option<i32>,
    pub pub_urls: Vec<String>,
    pub source_dataset: SourceDataset,
    pub source_row: u64,
}

impl MentionRecord {
    pub fn key(&self) -> Result<SoftwareKey, ModelError> {
        SoftwareKey::new(&self.software_raw)
    }

    /// Checks the record-level invariants (non-empty name and id, plausible year).
    pub fn check(&self) -> Result<(), ModelError> {
        if self.mention_id.trim().is_empty() {
            return Err(ModelError::InvalidRecord("empty mention_id".into()));
        }
        if self.software_raw.trim().is_empty() {
            return Err(ModelError::InvalidRecord(format!(
                "{}: empty software name",
                self.mention_id
            )));
        }
        if let Some(y) = self.pub_year {
            if !YEAR_RANGE.contains(&y) {
                return Err(ModelError::InvalidRecord(format!(
                    "{}: publication year {y} outside {}..={}",
                    self.mention_id,
                    YEAR_RANGE.start(),
                    YEAR_RANGE.end()
                )));
            }
        }
        Ok(())
    }
}

pub const YEAR_RANGE: std::ops::RangeInclusive<i32> = 1900..=2100;

/// Extracts a four-digit year from a date-like string (`2020-03-01`, `2020`, `03/01/2020`).
pub fn parse_year(s: &str) -> Option<i32> {
    let bytes = s.as_bytes();
    let mut i = 0;
    while i + 4 <= bytes.len() {
        let window = &bytes[i..i + 4];
        let before_ok = i == 0 || !bytes[i - 1].is_ascii_digit();
        let after_ok = i + 4 == bytes.len() || !bytes[i + 4].is_ascii_digit();
        if before_ok && after_ok && window.iter().all(u8::is_ascii_digit) {
            let y: i32 = std::str::from_utf8(window).ok()?.parse().ok()?;
            if YEAR_RANGE.contains(&y) {
                return Some(y);
            }
        }
        i += 1;
    }
    None
}

/// Case-folded, whitespace-normalised software name used for deduplication
/// and as the sampling stratum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SoftwareKey {
    pub key: String,
    pub exemplar: String,
}

impl SoftwareKey {
    pub fn new(exemplar: &str) -> Result<Self, ModelError> {
        Ok(SoftwareKey {
            key: normalize_key(exemplar)?,
            exemplar: exemplar.to_string(),
        })
    }
}

/// Trims, collapses whitespace runs to a single space and lowercases.
pub fn normalize_key(s: &str) -> Result<String, ModelError> {
    let mut out = String::with_capacity(s.len());
    for (i, word) in s.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&word.to_lowercase());
    }
    if out.is_empty() {
        return Err(ModelError::EmptyName);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RepoSource {
    #[serde(rename = "GITHUB")]
    Github,
    #[serde(rename = "PYPI")]
    Pypi,
    #[serde(rename = "CRAN")]
    Cran,
    #[serde(rename = "SCICRUNCH")]
    Scicrunch,
    #[serde(rename = "BIOCONDUCTOR")]
    Bioconductor,
    #[serde(rename = "OTHER")]
    Other,
}

impl RepoSource {
    pub fn code(self) -> &'static str {
        match self {
            RepoSource::Github => "GITHUB",
            RepoSource::Pypi => "PYPI",
            RepoSource::Cran => "CRAN",
            RepoSource::Scicrunch => "SCICRUNCH",
            RepoSource::Bioconductor => "BIOCONDUCTOR",
            RepoSource::Other => "OTHER",
        }
    }

    /// Lenient mapping used on ingest: unknown source names become `Other`.
    pub fn from_loose(s: &str) -> RepoSource {
        match s.trim().to_ascii_lowercase().as_str() {
            "github" => RepoSource::Github,
            "pypi" => RepoSource::Pypi,
            "cran" => RepoSource::Cran,
            "scicrunch" => RepoSource::Scicrunch,
            "bioconductor" => RepoSource::Bioconductor,
            _ => RepoSource::Other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchBasis {
    #[serde(rename = "EXACT_STRING")]
    ExactString,
    #[serde(rename = "OTHER")]
    Other,
}

/// A candidate repository URL attached to a mention by an automatic linker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkedRepoRecord {
    pub mention_id: String,
    pub source: RepoSource,
    pub url: String,
    pub match_basis: Option<MatchBasis>,
}

/// One annotator's coded layers for one mention.
///
/// Codes are kept as strings so that a record read from a sheet or an API
/// payload can be represented before it is validated against the tagsets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub mention_id: String,
    pub annotator_id: String,
    pub retrieval_quality: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mention_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mention_quality: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub found_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_quality: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license_spdx_or_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license_category: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_preprint: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_software_paper: Option<bool>,
    pub confidence: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl AnnotationRecord {
    pub fn retrieval(&self) -> Option<RetrievalQuality> {
        self.retrieval_quality.parse().ok()
    }

    pub fn mention_type(&self) -> Option<MentionType> {
        self.mention_type.as_deref().and_then(|c| c.parse().ok())
    }

    pub fn mention_quality(&self) -> Option<MentionQuality> {
        self.mention_quality.as_deref().and_then(|c| c.parse().ok())
    }

    pub fn license_category(&self) -> Option<LicenseCategory> {
        self.license_category.as_deref().and_then(|c| c.parse().ok())
    }

    pub fn link_quality(&self) -> Option<LinkQuality> {
        self.link_quality.as_deref().and_then(|c| c.parse().ok())
    }
}

/// A mention and every annotation made for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedMention {
    pub mention: MentionRecord,
    pub annotations: Vec<AnnotationRecord>,
}

impl AnnotatedMention {
    pub fn new(
        mention: MentionRecord,
        annotations: Vec<AnnotationRecord>,
    ) -> Result<Self, ModelError> {
        if annotations.is_empty() {
            return Err(ModelError::InvalidRecord(format!(
                "{}: annotated mention without annotations",
                mention.mention_id
            )));
        }
        if let Some(a) = annotations
            .iter()
            .find(|a| a.mention_id != mention.mention_id)
        {
            return Err(ModelError::InvalidRecord(format!(
                "annotation for {} attached to mention {}",
                a.mention_id, mention.mention_id
            )));
        }
        Ok(AnnotatedMention {
            mention,
            annotations,
        })
    }

    /// The annotation analyses read: the named annotator's, or the first one.
    pub fn primary(&self, annotator: Option<&str>) -> Option<&AnnotationRecord> {
        match annotator {
            Some(id) => self.annotations.iter().find(|a| a.annotator_id == id),
            None => self.annotations.first(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_key("MATLAB").unwrap(), normalize_key("Matlab").unwrap());
        assert_eq!(normalize_key(" SPSS  Statistics ").unwrap(), "spss statistics");
        assert_eq!(normalize_key("a\t\nb").unwrap(), "a b");
        assert!(matches!(normalize_key("  \t"), Err(ModelError::EmptyName)));
    }

    #[test]
    fn years() {
        assert_eq!(parse_year("2020-03-01"), Some(2020));
        assert_eq!(parse_year("01/02/2016"), Some(2016));
        assert_eq!(parse_year("12345"), None);
        assert_eq!(parse_year("1850"), None);
        assert_eq!(parse_year(""), None);
    }

    #[test]
    fn record_check_rejects_bad_year() {
        let rec = MentionRecord {
            mention_id: "m".into(),
            software_raw: "R".into(),
            context: None,
            pub_id: "p".into(),
            pub_title: None,
            pub_year: Some(1800),
            pub_urls: vec![],
            source_dataset: SourceDataset::Csm,
            source_row: 0,
        };
        assert!(rec.check().is_err());
    }

    proptest::proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{1,40}") {
            if let Ok(k) = normalize_key(&s) {
                proptest::prop_assert_eq!(normalize_key(&k).unwrap(), k);
            }
        }
    }
}
