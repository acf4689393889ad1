// SPDX-License-Identifier: Apache-2.0

//! Column-name mapping between a dataset release and the canonical field
//! names the readers expect.
//!
//! The file format is plain `field = Column Name` lines. Blank lines and
//! lines starting with `#` are ignored. Whitespace around both sides is
//! trimmed; a value may be wrapped in double quotes to keep edge spaces.
//!
//! ```text
//! # CZI raw, 2022 release
//! mention_id = ID
//! software   = software
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeaderMapError {
    #[error("line {line}: expected `field = column`")]
    Syntax { line: usize },
    #[error("line {line}: unknown field {field:?} (known: {known})")]
    UnknownField {
        line: usize,
        field: String,
        known: String,
    },
    #[error("line {line}: field {field:?} mapped twice")]
    Duplicate { line: usize, field: String },
    #[error("line {line}: empty column name for {field:?}")]
    EmptyColumn { line: usize, field: String },
}

/// Canonical field name to source column name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeaderMap {
    map: BTreeMap<String, String>,
}

impl HeaderMap {
    /// Builds a map from `(field, default column)` pairs.
    pub fn with_defaults(fields: &[(&str, &str)]) -> Self {
        HeaderMap {
            map: fields
                .iter()
                .map(|(f, c)| (f.to_string(), c.to_string()))
                .collect(),
        }
    }

    /// Parses a mapping file and overlays it on `defaults`. Only fields present
    /// in `defaults` may be mapped.
    pub fn parse_over(text: &str, defaults: &HeaderMap) -> Result<Self, HeaderMapError> {
        let mut out = defaults.clone();
        let mut seen = std::collections::BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (field, column) = trimmed
                .split_once('=')
                .ok_or(HeaderMapError::Syntax { line })?;
            let field = field.trim();
            let column = unquote(column.trim());
            if field.is_empty() {
                return Err(HeaderMapError::Syntax { line });
            }
            if !defaults.map.contains_key(field) {
                return Err(HeaderMapError::UnknownField {
                    line,
                    field: field.to_string(),
                    known: defaults.map.keys().cloned().collect::<Vec<_>>().join(", "),
                });
            }
            if column.is_empty() {
                return Err(HeaderMapError::EmptyColumn {
                    line,
                    field: field.to_string(),
                });
            }
            if !seen.insert(field.to_string()) {
                return Err(HeaderMapError::Duplicate {
                    line,
                    field: field.to_string(),
                });
            }
            out.map.insert(field.to_string(), column.to_string());
        }
        Ok(out)
    }

    pub fn column(&self, field: &str) -> Option<&str> {
        self.map.get(field).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Resolves each field to its column index in `headers`.
    pub fn resolve(&self, headers: &[String]) -> ResolvedColumns {
        let idx = self
            .map
            .iter()
            .filter_map(|(field, col)| {
                headers
                    .iter()
                    .position(|h| h.trim() == col)
                    .map(|i| (field.clone(), i))
            })
            .collect();
        ResolvedColumns { idx }
    }
}

fn unquote(s: &str) -> &str {
    if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Field name to column index for one concrete header row.
#[derive(Clone, Debug, Default)]
pub struct ResolvedColumns {
    idx: BTreeMap<String, usize>,
}

impl ResolvedColumns {
    pub fn index(&self, field: &str) -> Option<usize> {
        self.idx.get(field).copied()
    }

    pub fn has(&self, field: &str) -> bool {
        self.idx.contains_key(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> HeaderMap {
        HeaderMap::with_defaults(&[("mention_id", "ID"), ("software", "software")])
    }

    #[test]
    fn overlay() {
        let m = HeaderMap::parse_over(
            "# comment\n\nmention_id = mention id\nsoftware=\" name \"\n",
            &defaults(),
        )
        .unwrap();
        assert_eq!(m.column("mention_id"), Some("mention id"));
        assert_eq!(m.column("software"), Some(" name "));
    }

    #[test]
    fn errors() {
        assert_eq!(
            HeaderMap::parse_over("nonsense", &defaults()),
            Err(HeaderMapError::Syntax { line: 1 })
        );
        assert!(matches!(
            HeaderMap::parse_over("x = y", &defaults()),
            Err(HeaderMapError::UnknownField { line: 1, .. })
        ));
        assert!(matches!(
            HeaderMap::parse_over("software = a\nsoftware = b", &defaults()),
            Err(HeaderMapError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            HeaderMap::parse_over("software =   ", &defaults()),
            Err(HeaderMapError::EmptyColumn { .. })
        ));
    }

    #[test]
    fn resolve_by_header_name() {
        let headers = vec!["software".to_string(), "ID".to_string()];
        let r = defaults().resolve(&headers);
        assert_eq!(r.index("mention_id"), Some(1));
        assert_eq!(r.index("software"), Some(0));
    }
}
