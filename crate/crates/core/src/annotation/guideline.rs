// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::model::{AnnotationRecord, MentionQuality, MentionRecord, MentionType};

/// A non-blocking note about a record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Advisory {
    pub id: &'static str,
    pub field: &'static str,
    pub message: String,
}

pub const URL_TYPE_WITHOUT_URL: &str = "url-type-without-url";
pub const SC_WITHOUT_URL: &str = "sc-without-url";
pub const ADJUDICATE: &str = "adjudicate";
pub const URL_NOT_HTTP: &str = "url-not-http";
pub const MENTION_NOT_IN_CONTEXT: &str = "mention-not-in-context";
pub const URL_NOT_IN_CONTEXT: &str = "url-not-in-context";

/// Confidence at or below this flags a record for adjudication.
pub const ADJUDICATION_THRESHOLD: u8 = 2;

/// Guideline checks that cannot be enforced without the publication itself.
pub fn guideline_checks(rec: &AnnotationRecord, mention: &MentionRecord) -> Vec<Advisory> {
    let mut out = Vec::new();
    let url = rec.found_url.as_deref().map(str::trim).filter(|s| !s.is_empty());
    let mut warn = |id, field, message: String| out.push(Advisory { id, field, message });

    if rec.mention_type() == Some(MentionType::Url) && url.is_none() {
        warn(URL_TYPE_WITHOUT_URL, "found_url", "URL-type mention without recorded URL".into());
    }
    if rec.mention_quality() == Some(MentionQuality::Sc) && url.is_none() {
        warn(SC_WITHOUT_URL, "found_url", "specific-and-complete mention without recorded URL".into());
    }
    if let Some(u) = url {
        let lower = u.to_ascii_lowercase();
        if !(lower.starts_with("http://") || lower.starts_with("https://")) {
            warn(URL_NOT_HTTP, "found_url", format!("{u:?} is not an http(s) URL"));
        }
        if let Some(ctx) = &mention.context {
            if !ctx.contains(u) {
                warn(URL_NOT_IN_CONTEXT, "found_url", "URL does not occur in the mention context".into());
            }
        }
    }
    if let Some(ctx) = &mention.context {
        if !mention.software_raw.is_empty() && !ctx.contains(&mention.software_raw) {
            warn(
                MENTION_NOT_IN_CONTEXT,
                "software_raw",
                format!("{:?} does not occur verbatim in the context", mention.software_raw),
            );
        }
    }
    if rec.confidence > 0 && rec.confidence <= ADJUDICATION_THRESHOLD {
        warn(ADJUDICATE, "confidence", format!("confidence {} flags this record for adjudication", rec.confidence));
    }
    out
}
