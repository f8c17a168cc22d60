use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Token, TokenizedPlay};

/// Words per stage minute.
pub const DEFAULT_WINDOW: usize = 150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct SegmentationConfig {
    window: usize,
    include_partial_tail: bool,
}

#[derive(Deserialize)]
struct RawConfig {
    window: usize,
    include_partial_tail: bool,
}

impl TryFrom<RawConfig> for SegmentationConfig {
    type Error = CorpusError;

    fn try_from(raw: RawConfig) -> Result<Self, Self::Error> {
        Self::new(raw.window, raw.include_partial_tail)
    }
}

impl SegmentationConfig {
    pub fn new(window: usize, include_partial_tail: bool) -> Result<Self, CorpusError> {
        if window == 0 {
            return Err(CorpusError::ZeroWindow);
        }
        Ok(Self {
            window,
            include_partial_tail,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn include_partial_tail(&self) -> bool {
        self.include_partial_tail
    }
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            include_partial_tail: true,
        }
    }
}

/// A stage-minute window of `window` alphabetic words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub index: usize,
    pub token_range: Range<usize>,
    pub word_count: usize,
    pub is_partial: bool,
}

/// Cuts the play's tokens into consecutive windows of `cfg.window` words.
pub fn segment_tokens(play: &TokenizedPlay, cfg: &SegmentationConfig) -> Vec<Segment> {
    segment_token_slice(&play.tokens, cfg)
}

/// Segmentation over a bare token slice.
///
/// A window closes just before the first word that would overflow it, so
/// punctuation stays with the word it follows. Tokens before the first word
/// open the first window.
pub fn segment_token_slice(tokens: &[Token], cfg: &SegmentationConfig) -> Vec<Segment> {
    let mut segments = Vec::new();
    let mut start = 0;
    let mut words = 0;
    for (i, tok) in tokens.iter().enumerate() {
        if !tok.is_alpha {
            continue;
        }
        if words == cfg.window {
            segments.push(Segment {
                index: segments.len(),
                token_range: start..i,
                word_count: words,
                is_partial: false,
            });
            start = i;
            words = 0;
        }
        words += 1;
    }
    if start < tokens.len() {
        let is_partial = words < cfg.window;
        if !is_partial || cfg.include_partial_tail {
            segments.push(Segment {
                index: segments.len(),
                token_range: start..tokens.len(),
                word_count: words,
                is_partial,
            });
        }
    }
    segments
}
