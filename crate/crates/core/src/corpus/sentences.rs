use std::ops::Range;

use super::Token;

/// Case-folded abbreviations whose trailing period does not end a sentence.
pub const ABBREVIATIONS: &[&str] = &[
    "m", "mm", "mme", "mmes", "mlle", "mlles", "me", "mgr", "dr", "pr", "st", "ste", "cf", "p",
    "vol", "chap", "éd", "av", "bd", "fig",
];

fn is_terminal(tok: &Token) -> bool {
    !tok.surface.is_empty() && tok.surface.chars().all(|c| matches!(c, '.' | '!' | '?' | '…'))
}

fn is_closing(tok: &Token) -> bool {
    tok.surface.chars().count() == 1
        && matches!(
            tok.surface.chars().next(),
            Some('»' | '"' | '”' | '’' | '\'' | ')' | ']')
        )
}

/// A period glued to a known abbreviation, as in "M. Cal".
fn is_abbreviation_dot(tokens: &[Token], i: usize) -> bool {
    if tokens[i].surface != "." || i == 0 {
        return false;
    }
    let prev = &tokens[i - 1];
    prev.char_span.end == tokens[i].char_span.start
        && ABBREVIATIONS.contains(&prev.lower.as_str())
}

/// Partitions `tokens` into sentence ranges ending after terminal punctuation
/// and any closing quotes that follow it.
pub fn split_sentences(tokens: &[Token]) -> Vec<Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < tokens.len() {
        if is_terminal(&tokens[i]) && !is_abbreviation_dot(tokens, i) {
            let mut end = i + 1;
            while end < tokens.len() && (is_terminal(&tokens[end]) || is_closing(&tokens[end])) {
                end += 1;
            }
            ranges.push(start..end);
            start = end;
            i = end;
        } else {
            i += 1;
        }
    }
    if start < tokens.len() {
        ranges.push(start..tokens.len());
    }
    ranges
}
