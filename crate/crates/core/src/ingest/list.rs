// SPDX-License-Identifier: Apache-2.0

//! Parser for list-literal fields such as `['GraphPad Prism', 'SigmaPlot']`.
//!
//! Grammar (whitespace allowed between tokens):
//!
//! ```text
//! list  := '[' ( item ( ',' item )* ','? )? ']'
//! item  := quoted | bare
//! quoted:= q ( char | '\' any | q q )* q        q is ' or "
//! bare  := run of characters other than , [ ] ' "
//! ```
//!
//! A field that is empty or only whitespace is an empty list. Elements are
//! trimmed and empty elements are dropped; case and interior punctuation are
//! kept as-is.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("list literal: {kind} at byte {offset}")]
pub struct ListParseError {
    pub offset: usize,
    pub kind: ListErrorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListErrorKind {
    MissingOpenBracket,
    UnbalancedBracket,
    UnterminatedQuote,
    UnexpectedCharacter(char),
    TrailingInput,
}

impl fmt::Display for ListErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListErrorKind::MissingOpenBracket => f.write_str("expected '['"),
            ListErrorKind::UnbalancedBracket => f.write_str("unbalanced bracket"),
            ListErrorKind::UnterminatedQuote => f.write_str("unterminated quote"),
            ListErrorKind::UnexpectedCharacter(c) => write!(f, "unexpected {c:?}"),
            ListErrorKind::TrailingInput => f.write_str("input after closing ']'"),
        }
    }
}

/// Trims a mention string. Applying it twice is the same as applying it once.
pub fn clean_mention(s: &str) -> &str {
    s.trim()
}

/// Splits a list-literal field into cleaned mention strings.
pub fn parse_mention_list(raw: &str) -> Result<Vec<String>, ListParseError> {
    let mut p = Parser { src: raw, pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Ok(Vec::new());
    }
    if p.peek() != Some('[') {
        return Err(p.err(ListErrorKind::MissingOpenBracket));
    }
    let open = p.pos;
    p.bump();

    let mut out = Vec::new();
    loop {
        p.skip_ws();
        match p.peek() {
            None => {
                return Err(ListParseError {
                    offset: open,
                    kind: ListErrorKind::UnbalancedBracket,
                })
            }
            Some(']') => {
                p.bump();
                break;
            }
            Some(',') => {
                // empty element, e.g. "[a,,b]" or "[,]"
                p.bump();
                continue;
            }
            Some(_) => {}
        }

        let item = p.item()?;
        let cleaned = clean_mention(&item);
        if !cleaned.is_empty() {
            out.push(cleaned.to_string());
        }

        p.skip_ws();
        match p.peek() {
            Some(',') => {
                p.bump();
            }
            Some(']') => {}
            None => {
                return Err(ListParseError {
                    offset: open,
                    kind: ListErrorKind::UnbalancedBracket,
                })
            }
            Some(c) => return Err(p.err(ListErrorKind::UnexpectedCharacter(c))),
        }
    }

    p.skip_ws();
    if !p.at_end() {
        let kind = if p.peek() == Some(']') {
            ListErrorKind::UnbalancedBracket
        } else {
            ListErrorKind::TrailingInput
        };
        return Err(p.err(kind));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn err(&self, kind: ListErrorKind) -> ListParseError {
        ListParseError {
            offset: self.pos,
            kind,
        }
    }

    fn item(&mut self) -> Result<String, ListParseError> {
        match self.peek() {
            Some(q @ ('\'' | '"')) => self.quoted(q),
            _ => self.bare(),
        }
    }

    fn quoted(&mut self, quote: char) -> Result<String, ListParseError> {
        let start = self.pos;
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(ListParseError {
                        offset: start,
                        kind: ListErrorKind::UnterminatedQuote,
                    })
                }
                Some('\\') => match self.bump() {
                    Some(c) => s.push(c),
                    None => {
                        return Err(ListParseError {
                            offset: start,
                            kind: ListErrorKind::UnterminatedQuote,
                        })
                    }
                },
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        s.push(quote);
                    } else {
                        return Ok(s);
                    }
                }
                Some(c) => s.push(c),
            }
        }
    }

    fn bare(&mut self) -> Result<String, ListParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            match c {
                ',' | ']' => break,
                '[' | '\'' | '"' => return Err(self.err(ListErrorKind::UnexpectedCharacter(c))),
                _ => {
                    self.bump();
                }
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_example() {
        assert_eq!(
            parse_mention_list("['GraphPad Prism', 'SigmaPlot', 'Systat']").unwrap(),
            ["GraphPad Prism", "SigmaPlot", "Systat"]
        );
    }

    #[test]
    fn empty_forms() {
        assert!(parse_mention_list("[]").unwrap().is_empty());
        assert!(parse_mention_list("  [ ] ").unwrap().is_empty());
        assert!(parse_mention_list("").unwrap().is_empty());
        assert!(parse_mention_list("['', '  ']").unwrap().is_empty());
    }

    #[test]
    fn doubled_and_escaped_quotes() {
        assert_eq!(
            parse_mention_list(r#"['it''s tool', "R"]"#).unwrap(),
            ["it's tool", "R"]
        );
        assert_eq!(
            parse_mention_list(r#"['it\'s', "say \"hi\""]"#).unwrap(),
            ["it's", "say \"hi\""]
        );
    }

    #[test]
    fn bare_items_and_trailing_comma() {
        assert_eq!(parse_mention_list("[SPSS, R ,]").unwrap(), ["SPSS", "R"]);
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_mention_list("['a', 'b'").unwrap_err();
        assert_eq!(e.kind, ListErrorKind::UnbalancedBracket);
        assert_eq!(e.offset, 0);

        let e = parse_mention_list("['a', 'b]").unwrap_err();
        assert_eq!(e.kind, ListErrorKind::UnterminatedQuote);
        assert_eq!(e.offset, 6);

        let e = parse_mention_list("'a'").unwrap_err();
        assert_eq!(e.kind, ListErrorKind::MissingOpenBracket);

        let e = parse_mention_list("['a']]").unwrap_err();
        assert_eq!(e.kind, ListErrorKind::UnbalancedBracket);
        assert_eq!(e.offset, 5);

        let e = parse_mention_list("['a' 'b']").unwrap_err();
        assert_eq!(e.kind, ListErrorKind::UnexpectedCharacter('\''));
    }

    proptest::proptest! {
        #[test]
        fn never_panics(s in "\\PC{0,64}") {
            let _ = parse_mention_list(&s);
        }

        #[test]
        fn cleaning_is_idempotent(s in "\\PC{0,32}") {
            let once = clean_mention(&s);
            proptest::prop_assert_eq!(clean_mention(once), once);
        }

        #[test]
        fn quoted_elements_round_trip(items in proptest::collection::vec("[A-Za-z0-9 .+'-]{1,12}", 0..6)) {
            let lit = format!(
                "[{}]",
                items.iter().map(|s| format!("'{}'", s.replace('\'', "\\'"))).collect::<Vec<_>>().join(", ")
            );
            let expected: Vec<String> = items
                .iter()
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            proptest::prop_assert_eq!(parse_mention_list(&lit).unwrap(), expected);
        }
    }
}
