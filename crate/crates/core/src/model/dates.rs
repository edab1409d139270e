//! Collection date spans and the free-text date parser.

use chrono::Datelike;
use serde::{Deserialize, Serialize};

/// Earliest year accepted in a date span.
pub const MIN_YEAR: i32 = 1890;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[serde(deny_unknown_fields)]
pub struct DateSpan {
    pub begin_year: i32,
    pub end_year: i32,
    #[serde(default)]
    pub approximate: bool,
}

impl DateSpan {
    pub fn is_valid(&self, current_year: i32) -> bool {
        MIN_YEAR <= self.begin_year
            && self.begin_year <= self.end_year
            && self.end_year <= current_year
    }

    /// Decade labels ("1930s", "1940s", ...) touched by this span.
    pub fn decades(&self) -> Vec<String> {
        let first = self.begin_year.div_euclid(10) * 10;
        let last = self.end_year.div_euclid(10) * 10;
        (first..=last)
            .step_by(10)
            .map(|d| format!("{d}s"))
            .collect()
    }
}

/// Raw date text that did not match any recognized pattern.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognized date span {0:?}")]
pub struct UnparsedDate(pub String);

pub fn current_year() -> i32 {
    chrono::Utc::now().year()
}

/// Parses "YYYY", "YYYY-YYYY", "YYYYs" and "circa <any of those>".
pub fn parse_date_span(raw: &str) -> Result<DateSpan, UnparsedDate> {
    parse_date_span_at(raw, current_year())
}

/// Like [`parse_date_span`] with an explicit upper year bound. A decade
/// that runs past `current_year` is clipped to it.
pub fn parse_date_span_at(raw: &str, current_year: i32) -> Result<DateSpan, UnparsedDate> {
    let unparsed = || UnparsedDate(raw.to_string());
    let text = raw.trim();
    let (approximate, body) = match strip_circa(text) {
        Some(rest) => (true, rest),
        None => (false, text),
    };

    let (begin, end) = if let Some(decade) = body.strip_suffix('s') {
        let start = year(decade).ok_or_else(unparsed)?;
        if start % 10 != 0 {
            return Err(unparsed());
        }
        (start, (start + 9).min(current_year))
    } else if let Some((a, b)) = body.split_once(['-', '\u{2013}']) {
        (
            year(a.trim()).ok_or_else(unparsed)?,
            year(b.trim()).ok_or_else(unparsed)?,
        )
    } else {
        let y = year(body).ok_or_else(unparsed)?;
        (y, y)
    };

    let span = DateSpan {
        begin_year: begin,
        end_year: end,
        approximate,
    };
    if span.is_valid(current_year) {
        Ok(span)
    } else {
        Err(unparsed())
    }
}

fn strip_circa(text: &str) -> Option<&str> {
    let (head, rest) = text.split_once(char::is_whitespace)?;
    head.eq_ignore_ascii_case("circa").then(|| rest.trim_start())
}

fn year(text: &str) -> Option<i32> {
    if text.len() == 4 && text.bytes().all(|b| b.is_ascii_digit()) {
        text.parse().ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const NOW: i32 = 2026;

    fn span(b: i32, e: i32, approx: bool) -> DateSpan {
        DateSpan {
            begin_year: b,
            end_year: e,
            approximate: approx,
        }
    }

    #[test]
    fn recognized_patterns() {
        assert_eq!(parse_date_span_at("1935-1947", NOW), Ok(span(1935, 1947, false)));
        assert_eq!(parse_date_span_at("circa 1940s", NOW), Ok(span(1940, 1949, true)));
        assert_eq!(parse_date_span_at("1962", NOW), Ok(span(1962, 1962, false)));
        assert_eq!(parse_date_span_at("Circa 1950 - 1955", NOW), Ok(span(1950, 1955, true)));
        assert_eq!(parse_date_span_at("1930\u{2013}1939", NOW), Ok(span(1930, 1939, false)));
    }

    #[test]
    fn rejected_patterns() {
        for raw in ["unknown", "", "circa", "1950-1940", "1885", "2031", "1945s", "19x0", "1940s-1950s"] {
            assert!(parse_date_span_at(raw, NOW).is_err(), "{raw:?}");
        }
        assert_eq!(
            parse_date_span_at("unknown", NOW),
            Err(UnparsedDate("unknown".into()))
        );
    }

    #[test]
    fn open_decade_is_clipped() {
        assert_eq!(parse_date_span_at("2020s", NOW), Ok(span(2020, 2026, false)));
    }

    #[test]
    fn decade_labels() {
        assert_eq!(span(1938, 1952, false).decades(), vec!["1930s", "1940s", "1950s"]);
        assert_eq!(span(1940, 1940, false).decades(), vec!["1940s"]);
    }

    proptest! {
        #[test]
        fn parser_never_returns_invalid_span(raw in "(circa )?[0-9]{3,5}(s|-[0-9]{3,5})?") {
            if let Ok(s) = parse_date_span_at(&raw, NOW) {
                prop_assert!(s.is_valid(NOW));
            }
        }

        #[test]
        fn parser_never_returns_invalid_span_any_text(raw in ".{0,20}") {
            if let Ok(s) = parse_date_span_at(&raw, NOW) {
                prop_assert!(s.is_valid(NOW));
            }
        }
    }
}
