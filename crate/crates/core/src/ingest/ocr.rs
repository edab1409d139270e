//! Conservative OCR post-correction for scanned reference guides.
//!
//! Two repairs only:
//! - in words made of digits plus the look-alikes `l`, `O` and `S`, the
//!   look-alikes become `1`, `0` and `5` ("l935" -> "1935", "l94Os" ->
//!   "1940s");
//! - a line that starts with a word one edit away from a known guide label
//!   followed by `:` gets the label spelled correctly ("Ho1dings:").
//!
//! Everything else passes through untouched and every change is logged.

use serde::{Deserialize, Serialize};

use super::guide::GUIDE_LABELS;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    /// Byte offset into the input text.
    pub offset: usize,
    pub before: String,
    pub after: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Cleanup {
    pub cleaned: String,
    pub corrections: Vec<Correction>,
}

fn digit_for(c: char) -> Option<char> {
    match c {
        'l' => Some('1'),
        'O' => Some('0'),
        'S' => Some('5'),
        _ => None,
    }
}

/// Longest label plus slack for one inserted character.
const MAX_LABEL_CHARS: usize = 12;

pub fn ocr_cleanup(text: &str) -> Cleanup {
    let mut corrections = Vec::new();
    let mut line_start = 0;
    for line in text.split_inclusive('\n') {
        let skip = label_repair(line, line_start, &mut corrections);
        numeric_repair(line, line_start, skip, &mut corrections);
        line_start += line.len();
    }

    let mut cleaned = String::with_capacity(text.len());
    let mut cursor = 0;
    for c in &corrections {
        cleaned.push_str(&text[cursor..c.offset]);
        cleaned.push_str(&c.after);
        cursor = c.offset + c.before.len();
    }
    cleaned.push_str(&text[cursor..]);
    Cleanup { cleaned, corrections }
}

/// Repairs a misspelled label at the start of `line`. Returns the byte length
/// of the line prefix (through the colon) that numeric repair must skip.
fn label_repair(line: &str, line_offset: usize, corrections: &mut Vec<Correction>) -> usize {
    let indent = line.len() - line.trim_start().len();
    let Some(colon) = line.find(':') else {
        return 0;
    };
    if colon < indent {
        return 0;
    }
    let candidate = line[indent..colon].trim_end();
    if candidate.is_empty() || candidate.chars().count() > MAX_LABEL_CHARS {
        return 0;
    }
    if GUIDE_LABELS.iter().any(|(label, _)| *label == candidate) {
        return colon + 1;
    }
    let mut near = GUIDE_LABELS
        .iter()
        .map(|(label, _)| *label)
        .filter(|label| strsim::levenshtein(label, candidate) == 1);
    match (near.next(), near.next()) {
        (Some(label), None) => {
            corrections.push(Correction {
                offset: line_offset + indent,
                before: candidate.to_string(),
                after: label.to_string(),
            });
            colon + 1
        }
        _ => 0,
    }
}

fn numeric_repair(line: &str, line_offset: usize, skip: usize, corrections: &mut Vec<Correction>) {
    let mut word_start: Option<usize> = None;
    let bytes_end = line.len();
    let mut chars = line[skip..].char_indices().map(|(i, c)| (i + skip, c)).peekable();
    loop {
        let next = chars.next();
        match next {
            Some((i, c)) if c.is_alphanumeric() => {
                word_start.get_or_insert(i);
            }
            _ => {
                if let Some(start) = word_start.take() {
                    let end = next.map_or(bytes_end, |(i, _)| i);
                    fix_word(&line[start..end], line_offset + start, corrections);
                }
                if next.is_none() {
                    break;
                }
            }
        }
    }
}

fn fix_word(word: &str, offset: usize, corrections: &mut Vec<Correction>) {
    // a decade's trailing "s" is not part of the number
    let core = match word.strip_suffix('s') {
        Some(core) if !core.is_empty() => core,
        _ => word,
    };
    let mut has_digit = false;
    let mut has_lookalike = false;
    for c in core.chars() {
        if c.is_ascii_digit() {
            has_digit = true;
        } else if digit_for(c).is_some() {
            has_lookalike = true;
        } else {
            return;
        }
    }
    if has_digit && has_lookalike {
        let after: String = core.chars().map(|c| digit_for(c).unwrap_or(c)).collect();
        corrections.push(Correction {
            offset,
            before: core.to_string(),
            after,
        });
    }
}
