// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

pub const RETRIEVAL_QUALITY: &str = "retrieval_quality";
pub const MENTION_TYPE: &str = "mention_type";
pub const MENTION_QUALITY: &str = "mention_quality";
pub const LICENSE_CATEGORY: &str = "license_category";
pub const LINK_QUALITY: &str = "link_quality";

/// One entry of a closed code list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagCode {
    pub code: String,
    pub label: String,
    pub definition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tagset {
    pub name: String,
    pub codes: Vec<TagCode>,
}

impl Tagset {
    /// Builds a tagset, rejecting duplicate codes and duplicate order ranks.
    pub fn new(name: impl Into<String>, codes: Vec<TagCode>) -> Result<Self, ModelError> {
        let name = name.into();
        let mut seen_codes = std::collections::BTreeSet::new();
        let mut seen_orders = std::collections::BTreeSet::new();
        for c in &codes {
            if !seen_codes.insert(c.code.as_str()) {
                return Err(ModelError::InvalidTagset {
                    name,
                    reason: format!("duplicate code {:?}", c.code),
                });
            }
            if let Some(o) = c.order {
                if !seen_orders.insert(o) {
                    return Err(ModelError::InvalidTagset {
                        name,
                        reason: format!("duplicate order {o}"),
                    });
                }
            }
        }
        Ok(Tagset { name, codes })
    }

    pub fn contains(&self, code: &str) -> bool {
        self.get(code).is_some()
    }

    pub fn get(&self, code: &str) -> Option<&TagCode> {
        self.codes.iter().find(|c| c.code == code)
    }

    pub fn code_names(&self) -> impl Iterator<Item = &str> {
        self.codes.iter().map(|c| c.code.as_str())
    }
}

/// Tagsets looked up by name.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TagsetRegistry {
    sets: BTreeMap<String, Tagset>,
}

impl TagsetRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The five closed code lists used by annotation records.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        for set in [
            RetrievalQuality::tagset(),
            MentionType::tagset(),
            MentionQuality::tagset(),
            LicenseCategory::tagset(),
            LinkQuality::tagset(),
        ] {
            reg.insert(set);
        }
        reg
    }

    pub fn insert(&mut self, set: Tagset) -> Option<Tagset> {
        self.sets.insert(set.name.clone(), set)
    }

    pub fn remove(&mut self, name: &str) -> Option<Tagset> {
        self.sets.remove(name)
    }

    pub fn get(&self, name: &str) -> Option<&Tagset> {
        self.sets.get(name)
    }

    pub fn require(&self, name: &str) -> Result<&Tagset, ModelError> {
        self.get(name)
            .ok_or_else(|| ModelError::UnknownTagset(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tagset> {
        self.sets.values()
    }
}

fn entry(code: &str, label: &str, definition: &str, order: Option<u32>) -> TagCode {
    TagCode {
        code: code.to_string(),
        label: label.to_string(),
        definition: definition.to_string(),
        order,
    }
}

macro_rules! code_enum {
    (
        $(#[$meta:meta])*
        $name:ident, $tagset:expr, [ $( $variant:ident => $code:literal ),+ $(,)? ]
    ) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(
                #[serde(rename = $code)]
                $variant,
            )+
        }

        impl $name {
            /// All codes in tagset order.
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const TAGSET: &'static str = $tagset;

            pub fn code(self) -> &'static str {
                match self {
                    $($name::$variant => $code,)+
                }
            }
        }

        impl FromStr for $name {
            type Err = ModelError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($code => Ok($name::$variant),)+
                    other => Err(ModelError::InvalidCode {
                        tagset: $tagset,
                        code: other.to_string(),
                    }),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.code())
            }
        }
    };
}

code_enum!(
    /// Whether the dataset string captures the printed software name completely.
    RetrievalQuality, RETRIEVAL_QUALITY, [Yes => "Y", No => "N"]
);

code_enum!(
    /// How a publication refers to a piece of software, best to worst by rank.
    MentionType, MENTION_TYPE, [
        Pub => "PUB",
        Pro => "PRO",
        Url => "URL",
        Man => "MAN",
        Ins => "INS",
        Nam => "NAM",
        Not => "NOT",
    ]
);

code_enum!(
    /// Whether the mentioning publication gives access to code and metadata.
    MentionQuality, MENTION_QUALITY, [
        Sc => "SC",
        Sp => "SP",
        Sn => "SN",
        Na => "NA",
        Un => "UN",
    ]
);

code_enum!(
    LicenseCategory, LICENSE_CATEGORY, [
        Closed => "CLOSED",
        Academic => "ACADEMIC",
        Permissive => "PERMISSIVE",
        Copyleft => "COPYLEFT",
        Unknown => "UNKNOWN",
        UnknownSaas => "UNKNOWN_SAAS",
    ]
);

code_enum!(
    /// Verdict on the repository links attached to a mention.
    LinkQuality, LINK_QUALITY, [
        Correct => "CORRECT",
        Wrong => "WRONG",
        MultipleConflict => "MULTIPLE_CONFLICT",
        None => "NONE",
    ]
);

impl RetrievalQuality {
    pub fn tagset() -> Tagset {
        Tagset {
            name: RETRIEVAL_QUALITY.into(),
            codes: vec![
                entry(
                    "Y",
                    "Yes",
                    "The extracted string is the full software name exactly as printed in the publication.",
                    None,
                ),
                entry(
                    "N",
                    "No",
                    "The extracted string is truncated, merged with other text or otherwise differs from the printed name.",
                    None,
                ),
            ],
        }
    }
}

impl MentionType {
    /// Quality rank, 1 is best.
    pub fn rank(self) -> u32 {
        match self {
            MentionType::Pro => 1,
            MentionType::Pub => 2,
            MentionType::Man => 3,
            MentionType::Url => 4,
            MentionType::Ins => 5,
            MentionType::Nam => 6,
            MentionType::Not => 7,
        }
    }

    pub fn tagset() -> Tagset {
        let codes = MentionType::ALL
            .iter()
            .map(|t| {
                let (label, definition) = match t {
                    MentionType::Pub => (
                        "Cite to publication",
                        "A reference to a paper or monograph whose main subject is the software itself; review papers comparing tools do not count.",
                    ),
                    MentionType::Pro => (
                        "Cite to project name or website",
                        "A reference-list entry that points at the project or its website rather than at a publication.",
                    ),
                    MentionType::Url => (
                        "URL in text",
                        "A URL for the software given in the running text or in a footnote.",
                    ),
                    MentionType::Man => ("Cite to user manual", "A reference to the software's user manual."),
                    MentionType::Ins => (
                        "Instrument-like",
                        "The name followed by vendor or author and location in parentheses, as for lab equipment.",
                    ),
                    MentionType::Nam => ("In-text name mention only", "The name appears in the text with nothing else."),
                    MentionType::Not => ("Not even name mentioned", "The software is used but not named."),
                };
                entry(t.code(), label, definition, Some(t.rank()))
            })
            .collect();
        Tagset {
            name: MENTION_TYPE.into(),
            codes,
        }
    }
}

impl MentionQuality {
    pub fn tagset() -> Tagset {
        Tagset {
            name: MENTION_QUALITY.into(),
            codes: vec![
                entry(
                    "SC",
                    "Software, code link with metadata",
                    "The paper links straight to a code or package repository page that shows authors, version and license.",
                    None,
                ),
                entry(
                    "SP",
                    "Software, other link",
                    "The paper links to a site that gives access to the code but lacks author, version or license metadata.",
                    None,
                ),
                entry(
                    "SN",
                    "Software, no link",
                    "Software, but the paper itself offers no link to code; use this even when a cited software paper has one.",
                    None,
                ),
                entry(
                    "NA",
                    "Not software",
                    "The entity is not software. Record only this, retrieval quality and confidence.",
                    None,
                ),
                entry(
                    "UN",
                    "Unknown",
                    "Cannot be decided from the paper; needs further investigation.",
                    None,
                ),
            ],
        }
    }
}

impl LicenseCategory {
    /// Category used for totals: SaaS-without-license counts as unknown.
    pub fn rollup(self) -> LicenseCategory {
        match self {
            LicenseCategory::UnknownSaas => LicenseCategory::Unknown,
            other => other,
        }
    }

    /// Row order of license tables.
    pub const ROLLUP: &'static [LicenseCategory] = &[
        LicenseCategory::Closed,
        LicenseCategory::Academic,
        LicenseCategory::Permissive,
        LicenseCategory::Copyleft,
        LicenseCategory::Unknown,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            LicenseCategory::Closed => "Closed",
            LicenseCategory::Academic => "Academic",
            LicenseCategory::Permissive => "Permissive",
            LicenseCategory::Copyleft => "Copyleft",
            LicenseCategory::Unknown => "Unknown",
            LicenseCategory::UnknownSaas => "Unknown (SaaS)",
        }
    }

    pub fn tagset() -> Tagset {
        Tagset {
            name: LICENSE_CATEGORY.into(),
            codes: vec![
                entry("CLOSED", "Closed", "Proprietary, usually commercial software.", None),
                entry(
                    "ACADEMIC",
                    "Academic",
                    "Free of charge for academic or non-commercial use only.",
                    None,
                ),
                entry(
                    "PERMISSIVE",
                    "Permissive",
                    "Open source without reciprocal terms (Apache, Artistic, BSD, MIT, Unlimited).",
                    None,
                ),
                entry(
                    "COPYLEFT",
                    "Copyleft",
                    "Open source with reciprocal terms (GPL, LGPL).",
                    None,
                ),
                entry("UNKNOWN", "Unknown", "No license terms could be located.", None),
                entry(
                    "UNKNOWN_SAAS",
                    "Unknown (SaaS)",
                    "A hosted service with no license for service or code; counted under Unknown.",
                    None,
                ),
            ],
        }
    }
}

impl LinkQuality {
    pub fn tagset() -> Tagset {
        Tagset {
            name: LINK_QUALITY.into(),
            codes: vec![
                entry(
                    "CORRECT",
                    "Correct",
                    "All attached links resolve to the mentioned software.",
                    None,
                ),
                entry(
                    "WRONG",
                    "Wrong",
                    "The attached link (or several copies of one link) points at different software.",
                    None,
                ),
                entry(
                    "MULTIPLE_CONFLICT",
                    "Multiple conflicting",
                    "Links point at more than one distinct piece of software.",
                    None,
                ),
                entry("NONE", "No link", "No link was attached to the mention.", None),
            ],
        }
    }
}
