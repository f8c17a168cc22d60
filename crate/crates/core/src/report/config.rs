use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::affect::{
    AffectError, EmotionLexicon, Granularity, LexiconEmotionScorer, LexiconSentimentScorer,
    SentimentLexicon,
};
use crate::corpus::{
    Cleaner, CleaningRules, CorpusError, SegmentationConfig, SpeakerLabelPolicy, Stoplist,
    DEFAULT_WINDOW,
};
use crate::lexstats::CountingPolicy;

const DEFAULT_SENTIMENT_LEXICON: &str = include_str!("../../data/sentiment_fr.csv");
const DEFAULT_EMOTION_LEXICON: &str = include_str!("../../data/emotion_fr.csv");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Lexicon(#[from] AffectError),
    #[error("top_n must be at least 1")]
    ZeroTopN,
}

/// Analysis settings as stored in a JSON config file. Missing keys take
/// their defaults; relative paths are resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub dehyphenate_linebreaks: bool,
    pub strip_control_chars: bool,
    pub collapse_whitespace: bool,
    pub drop_patterns: Vec<String>,
    pub speaker_label_policy: SpeakerLabelPolicy,
    /// Replaces the bundled French stoplist when set.
    pub stoplist_path: Option<PathBuf>,
    pub window: usize,
    pub include_partial_tail: bool,
    pub top_n: usize,
    pub counting_policy: CountingPolicy,
    pub sentiment_lexicon_path: Option<PathBuf>,
    pub emotion_lexicon_path: Option<PathBuf>,
    pub granularity: Granularity,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let rules = CleaningRules::default();
        Self {
            dehyphenate_linebreaks: rules.dehyphenate_linebreaks,
            strip_control_chars: rules.strip_control_chars,
            collapse_whitespace: rules.collapse_whitespace,
            drop_patterns: rules.drop_patterns,
            speaker_label_policy: rules.speaker_label_policy,
            stoplist_path: None,
            window: DEFAULT_WINDOW,
            include_partial_tail: true,
            top_n: 10,
            counting_policy: CountingPolicy::default(),
            sentiment_lexicon_path: None,
            emotion_lexicon_path: None,
            granularity: Granularity::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        let mut cfg: AnalysisConfig = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in [
            &mut cfg.stoplist_path,
            &mut cfg.sentiment_lexicon_path,
            &mut cfg.emotion_lexicon_path,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn cleaning_rules(&self) -> CleaningRules {
        CleaningRules {
            dehyphenate_linebreaks: self.dehyphenate_linebreaks,
            strip_control_chars: self.strip_control_chars,
            collapse_whitespace: self.collapse_whitespace,
            drop_patterns: self.drop_patterns.clone(),
            speaker_label_policy: self.speaker_label_policy,
        }
    }

    /// Validates the config and loads the resources it points to.
    pub fn resolve(&self) -> Result<Settings, ConfigError> {
        let rules = self.cleaning_rules();
        let cleaner = rules.compile()?;
        let stoplist = match &self.stoplist_path {
            Some(p) => Stoplist::parse(&std::fs::read_to_string(p).map_err(|e| ConfigError::Read {
                path: p.clone(),
                message: e.to_string(),
            })?),
            None => Stoplist::french(),
        };
        if self.top_n == 0 {
            return Err(ConfigError::ZeroTopN);
        }
        Ok(Settings {
            cleaner,
            stoplist,
            segmentation: SegmentationConfig::new(self.window, self.include_partial_tail)?,
            top_n: self.top_n,
            counting_policy: self.counting_policy,
        })
    }

    /// Lexicon scorers from the configured files, or the bundled lexicons.
    pub fn lexicon_scorers(&self) -> Result<(LexiconSentimentScorer, LexiconEmotionScorer), ConfigError> {
        let sentiment = match &self.sentiment_lexicon_path {
            Some(p) => SentimentLexicon::load(p)?,
            None => SentimentLexicon::parse(DEFAULT_SENTIMENT_LEXICON, "<bundled sentiment_fr.csv>")?,
        };
        let emotion = match &self.emotion_lexicon_path {
            Some(p) => EmotionLexicon::load(p)?,
            None => EmotionLexicon::parse(DEFAULT_EMOTION_LEXICON, "<bundled emotion_fr.csv>")?,
        };
        Ok((
            LexiconSentimentScorer::new(sentiment).with_granularity(self.granularity),
            LexiconEmotionScorer::new(emotion).with_granularity(self.granularity),
        ))
    }
}

/// Validated, ready-to-use analysis settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub cleaner: Cleaner,
    pub stoplist: Stoplist,
    pub segmentation: SegmentationConfig,
    pub top_n: usize,
    pub counting_policy: CountingPolicy,
}

impl Settings {
    pub fn defaults() -> Self {
        AnalysisConfig::default()
            .resolve()
            .expect("default config is valid")
    }
}
