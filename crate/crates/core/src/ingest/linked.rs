// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeSet, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::header_map::HeaderMap;
use super::{field, Diagnostic, IngestError, RowEvent, RowReader};
use crate::model::{LinkedRepoRecord, MatchBasis, MentionRecord, RepoSource};

/// Default column names of the linked subset (long format, one link per row).
pub fn linked_default_headers() -> HeaderMap {
    HeaderMap::with_defaults(&[
        ("mention_id", "ID"),
        ("source", "source"),
        ("url", "url"),
        ("match_basis", "match_basis"),
    ])
}

/// Reads link rows; rows without id or url come back as diagnostics.
pub fn read_linked<R: Read>(
    reader: R,
    source_name: &str,
    headers: &HeaderMap,
) -> Result<
    impl Iterator<Item = Result<Result<LinkedRepoRecord, Diagnostic>, IngestError>>,
    IngestError,
> {
    let mut rows = RowReader::new(reader, source_name)?;
    let cols = headers.resolve(&rows.headers);
    for required in ["mention_id", "url"] {
        if !cols.has(required) {
            return Err(IngestError::MissingColumn {
                source_name: source_name.to_string(),
                field: required.into(),
                column: headers.column(required).unwrap_or_default().into(),
            });
        }
    }
    let source_name = source_name.to_string();
    Ok(std::iter::from_fn(move || {
        let event = match rows.next_event() {
            Ok(Some(ev)) => ev,
            Ok(None) => return None,
            Err(e) => return Some(Err(e)),
        };
        Some(Ok(match event {
            RowEvent::Bad(d) => Err(d),
            RowEvent::Row(i, fields) => {
                let get = |f: &str| field(&fields, cols.index(f));
                match (get("mention_id"), get("url")) {
                    (Some(id), Some(url)) => Ok(LinkedRepoRecord {
                        mention_id: id.to_string(),
                        source: RepoSource::from_loose(get("source").unwrap_or("")),
                        url: url.to_string(),
                        match_basis: get("match_basis").map(|m| {
                            if m.eq_ignore_ascii_case("exact_string") || m.eq_ignore_ascii_case("exact") {
                                MatchBasis::ExactString
                            } else {
                                MatchBasis::Other
                            }
                        }),
                    }),
                    _ => Err(Diagnostic {
                        source: source_name.clone(),
                        row: i,
                        reason: "link row without mention id or url".into(),
                        offset: None,
                    }),
                }
            }
        }))
    }))
}

/// A mention with the links that reference it, in link-input order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinedMention {
    pub mention: MentionRecord,
    pub links: Vec<LinkedRepoRecord>,
}

/// Comparison form of a link target: lowercased, without trailing slashes
/// or a `.git` suffix.
pub fn link_target(url: &str) -> String {
    let lower = url.trim().to_lowercase();
    let mut t = lower.as_str();
    loop {
        let before = t;
        t = t.trim_end_matches('/');
        t = t.strip_suffix(".git").unwrap_or(t);
        if t == before {
            break;
        }
    }
    t.to_string()
}

impl JoinedMention {
    pub fn distinct_targets(&self) -> usize {
        self.links
            .iter()
            .map(|l| link_target(&l.url))
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Links point at more than one distinct target.
    pub fn is_multi_target(&self) -> bool {
        self.distinct_targets() > 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinReport {
    pub mentions: u64,
    pub links_read: u64,
    pub links_matched: u64,
    pub links_unmatched: u64,
    pub mentions_with_links: u64,
    pub multi_target_mentions: u64,
}

/// Left join of links onto mentions by mention id. Every input mention is
/// kept, in input order.
pub fn merge_linked<I>(mentions: Vec<MentionRecord>, linked: I) -> (Vec<JoinedMention>, JoinReport)
where
    I: IntoIterator<Item = LinkedRepoRecord>,
{
    let index: HashMap<String, usize> = mentions
        .iter()
        .enumerate()
        .map(|(i, m)| (m.mention_id.clone(), i))
        .rev()
        .collect();
    let mut joined: Vec<JoinedMention> = mentions
        .into_iter()
        .map(|mention| JoinedMention {
            mention,
            links: Vec::new(),
        })
        .collect();

    let mut report = JoinReport {
        mentions: joined.len() as u64,
        ..Default::default()
    };
    for link in linked {
        report.links_read += 1;
        match index.get(&link.mention_id) {
            Some(&i) => {
                report.links_matched += 1;
                joined[i].links.push(link);
            }
            None => report.links_unmatched += 1,
        }
    }
    report.mentions_with_links = joined.iter().filter(|j| !j.links.is_empty()).count() as u64;
    report.multi_target_mentions = joined.iter().filter(|j| j.is_multi_target()).count() as u64;
    (joined, report)
}
