//! Ingestion of extracted play text: cleaning, French-aware tokenization,
//! sentence splitting and stage-minute segmentation.

mod clean;
mod segment;
mod sentences;
mod tokenize;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use clean::{clean_text, Cleaner, CleaningRules, SpeakerLabelPolicy};
pub use segment::{segment_token_slice, segment_tokens, Segment, SegmentationConfig, DEFAULT_WINDOW};
pub use sentences::{split_sentences, ABBREVIATIONS};
pub use tokenize::{fold, tokenize, Token, ELISION_PREFIXES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("input is not valid UTF-8 (first invalid byte at offset {offset})")]
    InvalidUtf8 { offset: usize },
    #[error("document title must not be empty")]
    EmptyTitle,
    #[error("malformed drop pattern `{pattern}`: {message}")]
    BadPattern { pattern: String, message: String },
    #[error("segmentation window must be at least 1 word")]
    ZeroWindow,
}

/// A play as extracted from its source, before cleaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    title: String,
    raw_text: String,
    source_path: PathBuf,
    language_tag: String,
}

impl RawDocument {
    pub fn new(
        title: impl Into<String>,
        raw_text: impl Into<String>,
        source_path: impl Into<PathBuf>,
    ) -> Result<Self, CorpusError> {
        let title = title.into();
        if title.trim().is_empty() {
            return Err(CorpusError::EmptyTitle);
        }
        Ok(Self {
            title,
            raw_text: raw_text.into(),
            source_path: source_path.into(),
            language_tag: "fr".to_owned(),
        })
    }

    /// Decodes `bytes` as UTF-8, reporting the offset of the first bad byte.
    pub fn from_bytes(
        title: impl Into<String>,
        bytes: Vec<u8>,
        source_path: impl Into<PathBuf>,
    ) -> Result<Self, CorpusError> {
        let text = String::from_utf8(bytes).map_err(|e| CorpusError::InvalidUtf8 {
            offset: e.utf8_error().valid_up_to(),
        })?;
        Self::new(title, text, source_path)
    }

    pub fn with_language(mut self, tag: impl Into<String>) -> Self {
        self.language_tag = tag.into();
        self
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }

    pub fn source_path(&self) -> &Path {
        &self.source_path
    }

    pub fn language_tag(&self) -> &str {
        &self.language_tag
    }

    pub fn info(&self) -> DocumentInfo {
        DocumentInfo {
            title: self.title.clone(),
            source_path: self.source_path.clone(),
            language_tag: self.language_tag.clone(),
        }
    }
}

/// Provenance carried by a tokenized play (the raw text itself is not kept).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentInfo {
    pub title: String,
    pub source_path: PathBuf,
    pub language_tag: String,
}

/// Set of case-folded function words excluded from frequency tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist(BTreeSet<String>);

const FRENCH_STOPWORDS: &str = include_str!("../../data/stopwords_fr.txt");

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Bundled French function-word list.
    pub fn french() -> Self {
        Self::parse(FRENCH_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(fold)
            .collect()
    }

    pub fn contains(&self, lower: &str) -> bool {
        self.0.contains(lower)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for Stoplist {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

/// A cleaned, tokenized play with sentence boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedPlay {
    pub document: DocumentInfo,
    pub cleaned_text: String,
    pub tokens: Vec<Token>,
    /// Half-open token index ranges, serialized as `[start, end]` pairs.
    #[serde(with = "range_pairs")]
    pub sentences: Vec<std::ops::Range<usize>>,
}

impl TokenizedPlay {
    /// Cleans, tokenizes and sentence-splits a document.
    pub fn build(doc: &RawDocument, cleaner: &Cleaner, stoplist: &Stoplist) -> Self {
        let cleaned_text = cleaner.clean(doc.raw_text());
        Self::from_cleaned(doc.info(), cleaned_text, stoplist)
    }

    pub fn from_cleaned(document: DocumentInfo, cleaned_text: String, stoplist: &Stoplist) -> Self {
        let tokens = tokenize(&cleaned_text, stoplist);
        let sentences = split_sentences(&tokens);
        Self {
            document,
            cleaned_text,
            tokens,
            sentences,
        }
    }

    pub fn title(&self) -> &str {
        &self.document.title
    }

    pub fn text_of(&self, tokens: std::ops::Range<usize>) -> &str {
        if tokens.is_empty() {
            return "";
        }
        let start = self.tokens[tokens.start].char_span.start;
        let end = self.tokens[tokens.end - 1].char_span.end;
        &self.cleaned_text[start..end]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tokenized play is always serializable")
    }

    pub fn from_json(json: &str) -> serde_json::Result<Self> {
        serde_json::from_str(json)
    }
}

mod range_pairs {
    use std::ops::Range;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ranges: &[Range<usize>], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[usize; 2]> = ranges.iter().map(|r| [r.start, r.end]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Range<usize>>, D::Error> {
        let pairs = Vec::<[usize; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[a, b]| a..b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_utf8_reports_offset() {
        let err = RawDocument::from_bytes("t", vec![b'a', b'b', 0xff, b'c'], "x.txt").unwrap_err();
        assert_eq!(err, CorpusError::InvalidUtf8 { offset: 2 });
    }

    #[test]
    fn empty_title_rejected() {
        assert_eq!(
            RawDocument::new("  ", "text", "x.txt").unwrap_err(),
            CorpusError::EmptyTitle
        );
    }

    #[test]
    fn bundled_stoplist_is_folded() {
        let s = Stoplist::french();
        assert!(s.contains("de"));
        assert!(s.contains("l'"));
        assert!(!s.contains("homme"));
    }

    #[test]
    fn tokenized_play_json_round_trip() {
        let doc = RawDocument::new("Essai", "LE CLIENT.\nJe marche. L'homme parle", "e.txt").unwrap();
        let play = TokenizedPlay::build(&doc, &CleaningRules::default().compile().unwrap(), &Stoplist::french());
        let json = play.to_json();
        assert!(json.contains(r#"["Je",0,2,3]"#), "{json}");
        assert_eq!(TokenizedPlay::from_json(&json).unwrap(), play);
    }
}
