use std::ops::Range;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use super::Stoplist;

/// Elided clitics split off the following word. Longer prefixes come first.
pub const ELISION_PREFIXES: &[&str] = &[
    "jusqu'", "lorsqu'", "puisqu'", "qu'", "l'", "d'", "j'", "n'", "s'", "t'", "c'", "m'",
];

const FLAG_ALPHA: u8 = 1;
const FLAG_STOPWORD: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Case-folded surface with typographic apostrophes mapped to `'`.
    pub lower: String,
    pub is_alpha: bool,
    pub is_stopword: bool,
    /// Byte offsets into the cleaned text.
    pub char_span: Range<usize>,
}

impl Token {
    fn new(surface: &str, start: usize, stoplist: &Stoplist) -> Self {
        let lower = fold(surface);
        let is_alpha = is_word(surface);
        Token {
            is_stopword: stoplist.contains(&lower),
            surface: surface.to_owned(),
            lower,
            is_alpha,
            char_span: start..start + surface.len(),
        }
    }

    fn flags(&self) -> u8 {
        (self.is_alpha as u8 * FLAG_ALPHA) | (self.is_stopword as u8 * FLAG_STOPWORD)
    }
}

// Serialized compactly as `[surface, start, end, flags]`.
impl Serialize for Token {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.surface, self.char_span.start, self.char_span.end, self.flags()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (surface, start, end, flags) = <(String, usize, usize, u8)>::deserialize(d)?;
        if end <= start || end - start != surface.len() {
            return Err(de::Error::custom("token span does not match surface length"));
        }
        Ok(Token {
            lower: fold(&surface),
            surface,
            is_alpha: flags & FLAG_ALPHA != 0,
            is_stopword: flags & FLAG_STOPWORD != 0,
            char_span: start..end,
        })
    }
}

/// Lowercases and maps U+2019 to U+0027 so both apostrophes compare equal.
pub fn fold(s: &str) -> String {
    s.to_lowercase().replace('\u{2019}', "'")
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Letters and combining marks, with apostrophes or hyphens allowed after
/// the first letter.
fn is_word(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphabetic() || is_mark(c) || is_apostrophe(c) || c == '-')
}

fn is_mark(c: char) -> bool {
    matches!(c, '\u{0300}'..='\u{036f}' | '\u{1ab0}'..='\u{1aff}' | '\u{1dc0}'..='\u{1dff}' | '\u{20d0}'..='\u{20ff}' | '\u{fe20}'..='\u{fe2f}')
}

/// Length in bytes of a leading elided clitic, if `word` has one followed by
/// at least one more character.
fn elision_len(word: &str) -> Option<usize> {
    ELISION_PREFIXES.iter().find_map(|prefix| {
        let stem = &prefix[..prefix.len() - 1];
        let head = word.get(..stem.len())?;
        if !head.eq_ignore_ascii_case(stem) {
            return None;
        }
        let c = word[stem.len()..].chars().next()?;
        let end = stem.len() + c.len_utf8();
        (is_apostrophe(c) && end < word.len()).then_some(end)
    })
}

/// Splits cleaned text into word, clitic and punctuation tokens using Unicode
/// word boundaries. Whitespace is never part of a token.
pub fn tokenize(cleaned: &str, stoplist: &Stoplist) -> Vec<Token> {
    let mut tokens = Vec::new();
    for (offset, segment) in cleaned.split_word_bound_indices() {
        // A boundary segment can mix whitespace with attached marks; keep only
        // the non-whitespace runs so spans never cover whitespace.
        let mut run_start = None;
        for (i, c) in segment.char_indices().chain(std::iter::once((segment.len(), ' '))) {
            match (c.is_whitespace(), run_start) {
                (false, None) => run_start = Some(i),
                (true, Some(s)) => {
                    push_word(&mut tokens, &segment[s..i], offset + s, stoplist);
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    tokens
}

fn push_word(tokens: &mut Vec<Token>, mut word: &str, mut start: usize, stoplist: &Stoplist) {
    while let Some(n) = elision_len(word) {
        tokens.push(Token::new(&word[..n], start, stoplist));
        word = &word[n..];
        start += n;
    }
    tokens.push(Token::new(word, start, stoplist));
}
