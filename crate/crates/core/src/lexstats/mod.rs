//! Vocabulary richness, ranked word frequencies and word-cloud layout.

mod wordcloud;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Stoplist, Token};

pub use wordcloud::{
    wordcloud_layout, BoundingBox, Canvas, CloudItem, WordCloudSpec, MAX_FONT_SIZE, MIN_FONT_SIZE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LexError {
    #[error("empty scope: no admissible tokens")]
    EmptyScope,
    #[error("top_n must be at least 1")]
    InvalidTopN,
    #[error("frequency table is empty")]
    EmptyTable,
    #[error("canvas dimensions must be positive, got {width}x{height}")]
    BadCanvas { width: f64, height: f64 },
    #[error("canvas exhausted: `{term}` does not fit")]
    CanvasExhausted { term: String },
}

/// Which tokens count toward the type-token ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingPolicy {
    #[default]
    AlphaAll,
    AlphaNonstop,
}

impl CountingPolicy {
    pub fn admits(self, tok: &Token) -> bool {
        match self {
            CountingPolicy::AlphaAll => tok.is_alpha,
            CountingPolicy::AlphaNonstop => tok.is_alpha && !tok.is_stopword,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    pub play: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<usize>,
}

impl Scope {
    pub fn play(title: impl Into<String>) -> Self {
        Self {
            play: title.into(),
            segment: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexicalSummary {
    pub token_count: usize,
    pub type_count: usize,
    pub ttr: f64,
    pub scope: Scope,
}

/// Distinct folded forms over total admitted tokens.
pub fn type_token_ratio(
    tokens: &[Token],
    policy: CountingPolicy,
    scope: Scope,
) -> Result<LexicalSummary, LexError> {
    let mut types = HashSet::new();
    let mut token_count = 0usize;
    for tok in tokens.iter().filter(|t| policy.admits(t)) {
        token_count += 1;
        types.insert(tok.lower.as_str());
    }
    if token_count == 0 {
        return Err(LexError::EmptyScope);
    }
    Ok(LexicalSummary {
        token_count,
        type_count: types.len(),
        ttr: types.len() as f64 / token_count as f64,
        scope,
    })
}

/// Ranked term counts, sorted by count descending then term ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub entries: Vec<(String, u64)>,
    /// Sum of the listed counts.
    pub total: u64,
    /// Admissible tokens before truncation.
    pub token_count: u64,
}

impl FrequencyTable {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(t, _)| t.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["term", "count"]).expect("in-memory write");
        for (term, count) in &self.entries {
            w.write_record([term.as_str(), &count.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }
}

/// Counts alphabetic non-stopword tokens by folded form and keeps the `top_n`
/// most frequent.
pub fn word_frequencies(
    tokens: &[Token],
    stoplist: &Stoplist,
    top_n: usize,
) -> Result<FrequencyTable, LexError> {
    if top_n == 0 {
        return Err(LexError::InvalidTopN);
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    let mut token_count = 0;
    for tok in tokens {
        if tok.is_alpha && !stoplist.contains(&tok.lower) {
            *counts.entry(tok.lower.as_str()).or_default() += 1;
            token_count += 1;
        }
    }
    let mut entries: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(t, c)| (t.to_owned(), c))
        .collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(top_n);
    Ok(FrequencyTable {
        total: entries.iter().map(|(_, c)| c).sum(),
        entries,
        token_count,
    })
}
