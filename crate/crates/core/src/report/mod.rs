//! End-to-end play analysis, result caching, cross-play comparison and
//! rendering to JSON, CSV and SVG.

mod canonical;
mod compare;
mod config;
mod render;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::affect::{
    build_arc_with, emotion_percentages, tension_metrics, AffectArc, AffectError, ArcScorers,
    EmotionScores, TensionMetrics,
};
use crate::corpus::{segment_tokens, CorpusError, RawDocument, TokenizedPlay};
use crate::exec::Execution;
use crate::lexstats::{
    type_token_ratio, word_frequencies, CountingPolicy, FrequencyTable, LexError, LexicalSummary,
    Scope,
};

pub use canonical::{fmt_f64, to_canonical_json};
pub use compare::{compare_plays, CompareError, ComparativeReport, PlayRanking};
pub use config::{AnalysisConfig, ConfigError, Settings};
pub use render::{
    arc_svg, emotions_svg, render, wordcloud_svg, OutputFormat, RenderError, RenderOptions,
};

/// Directory beside the outputs that holds cached reports.
pub const CACHE_DIR: &str = ".dramaturg-cache";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Read,
    Clean,
    Tokenize,
    Segment,
    Lexical,
    Score,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Read => "read",
            Stage::Clean => "clean",
            Stage::Tokenize => "tokenize",
            Stage::Segment => "segment",
            Stage::Lexical => "lexical",
            Stage::Score => "score",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, Error)]
pub enum StageFailure {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("empty scope: no words to analyze")]
    EmptyScope,
    #[error(transparent)]
    Lexical(#[from] LexError),
    #[error(transparent)]
    Affect(#[from] AffectError),
    #[error("{0}")]
    Serialize(String),
}

#[derive(Debug, Error)]
#[error("{stage} stage failed for {input}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    pub input: String,
    #[source]
    pub source: StageFailure,
}

impl PipelineError {
    /// Whether the failure came from a sentiment/emotion scorer.
    pub fn is_scorer_failure(&self) -> bool {
        matches!(self.source, StageFailure::Affect(AffectError::Scorer { .. }))
    }
}

/// Settings echoed into every report; compared before reports are combined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub window: usize,
    pub include_partial_tail: bool,
    pub top_n: usize,
    pub counting_policy: CountingPolicy,
    pub sentiment_scorer: Option<String>,
    pub emotion_scorer: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexicalSection {
    pub summary: LexicalSummary,
    pub frequencies: FrequencyTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayReport {
    pub title: String,
    pub settings: ReportSettings,
    pub segment_word_counts: Vec<usize>,
    pub lexical: LexicalSection,
    pub arc: AffectArc,
    /// Absent when no segment carried emotional signal.
    pub percentages: Option<EmotionScores>,
    /// Absent when the arc has fewer than three sentiment points.
    pub tension: Option<TensionMetrics>,
    pub config_fingerprint: String,
}

impl PlayReport {
    pub fn to_json(&self) -> String {
        to_canonical_json(self).expect("report serializes")
    }

    pub fn from_json(json: &str) -> serde_json::Result<Self> {
        serde_json::from_str(json)
    }

    pub fn load(path: &Path) -> Result<Self, RenderError> {
        let text = std::fs::read_to_string(path).map_err(|e| RenderError::Io {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        Self::from_json(&text).map_err(|e| RenderError::Parse {
            path: path.to_owned(),
            message: e.to_string(),
        })
    }

    /// Rounds every float through the canonical serialization so fresh and
    /// cached reports are indistinguishable.
    fn normalized(self) -> Self {
        Self::from_json(&self.to_json()).expect("canonical report parses")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

/// Runs the full pipeline for plays with one set of settings and scorers.
pub struct Analyzer<'a> {
    settings: Settings,
    scorers: ArcScorers<'a>,
    exec: Execution,
    cache_dir: Option<PathBuf>,
}

impl<'a> Analyzer<'a> {
    pub fn new(settings: Settings, scorers: ArcScorers<'a>) -> Self {
        Self {
            settings,
            scorers,
            exec: Execution::default(),
            cache_dir: None,
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    fn report_settings(&self) -> ReportSettings {
        ReportSettings {
            window: self.settings.segmentation.window(),
            include_partial_tail: self.settings.segmentation.include_partial_tail(),
            top_n: self.settings.top_n,
            counting_policy: self.settings.counting_policy,
            sentiment_scorer: self.scorers.sentiment.map(|s| s.identity()),
            emotion_scorer: self.scorers.emotion.map(|s| s.identity()),
        }
    }

    /// Hash of everything that can change a report for this input.
    pub fn fingerprint(&self, title: &str, text: &[u8]) -> String {
        let s = &self.settings;
        let stoplist: Vec<&str> = s.stoplist.iter().collect();
        let material = serde_json::json!({
            "tool": env!("CARGO_PKG_VERSION"),
            "title": title,
            "input_sha256": hex::encode(Sha256::digest(text)),
            "cleaning": s.cleaner.rules(),
            "stoplist": stoplist,
            "segmentation": s.segmentation,
            "report": self.report_settings(),
        });
        hex::encode(Sha256::digest(material.to_string().as_bytes()))
    }

    /// Analyzes the play in `path`, titled after the file stem.
    pub fn analyze_file(&self, path: &Path) -> Result<(PlayReport, CacheStatus), PipelineError> {
        let title = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "untitled".into());
        let bytes = std::fs::read(path).map_err(|e| PipelineError {
            stage: Stage::Read,
            input: path.display().to_string(),
            source: e.into(),
        })?;
        self.analyze_bytes(&title, bytes, path)
    }

    pub fn analyze_bytes(
        &self,
        title: &str,
        bytes: Vec<u8>,
        source_path: &Path,
    ) -> Result<(PlayReport, CacheStatus), PipelineError> {
        let input = source_path.display().to_string();
        let fail = |stage: Stage| {
            let input = input.clone();
            move |e: StageFailure| PipelineError { stage, input, source: e }
        };
        let fingerprint = self.fingerprint(title, &bytes);
        let cache_file = self
            .cache_dir
            .as_ref()
            .map(|d| d.join(format!("{fingerprint}.json")));
        if let Some(cached) = cache_file.as_ref().and_then(|f| std::fs::read_to_string(f).ok()) {
            if let Ok(report) = PlayReport::from_json(&cached) {
                if report.config_fingerprint == fingerprint {
                    return Ok((report, CacheStatus::Hit));
                }
            }
        }

        let doc = RawDocument::from_bytes(title, bytes, source_path)
            .map_err(|e| fail(Stage::Read)(e.into()))?;
        let cleaned = self.settings.cleaner.clean(doc.raw_text());
        let play = TokenizedPlay::from_cleaned(doc.info(), cleaned, &self.settings.stoplist);
        let segments = segment_tokens(&play, &self.settings.segmentation);
        if segments.iter().all(|s| s.word_count == 0) {
            return Err(fail(Stage::Segment)(StageFailure::EmptyScope));
        }

        let summary = type_token_ratio(&play.tokens, self.settings.counting_policy, Scope::play(title))
            .map_err(|e| fail(Stage::Lexical)(e.into()))?;
        let frequencies = word_frequencies(&play.tokens, &self.settings.stoplist, self.settings.top_n)
            .map_err(|e| fail(Stage::Lexical)(e.into()))?;

        let arc = build_arc_with(
            &play,
            &segments,
            self.settings.segmentation.window(),
            self.scorers,
            self.exec,
        )
        .map_err(|e| fail(Stage::Score)(e.into()))?;
        let percentages = match emotion_percentages(&arc) {
            Ok(p) => Some(p),
            Err(AffectError::NoEmotionalSignal) => None,
            Err(e) => return Err(fail(Stage::Score)(e.into())),
        };
        let tension = match tension_metrics(&arc) {
            Ok(t) => Some(t),
            Err(AffectError::ArcTooShort { .. }) => None,
            Err(e) => return Err(fail(Stage::Score)(e.into())),
        };

        let report = PlayReport {
            title: title.to_owned(),
            settings: self.report_settings(),
            segment_word_counts: segments.iter().map(|s| s.word_count).collect(),
            lexical: LexicalSection { summary, frequencies },
            arc,
            percentages,
            tension,
            config_fingerprint: fingerprint,
        }
        .normalized();

        if let Some(file) = cache_file {
            let write = std::fs::create_dir_all(file.parent().expect("cache file has a parent"))
                .and_then(|_| std::fs::write(&file, report.to_json()));
            write.map_err(|e| fail(Stage::Report)(e.into()))?;
            return Ok((report, CacheStatus::Miss));
        }
        Ok((report, CacheStatus::Disabled))
    }

    /// Analyzes several plays, one worker per play, returning results in
    /// input order.
    pub fn analyze_many(
        &self,
        paths: &[PathBuf],
    ) -> Vec<Result<(PlayReport, CacheStatus), PipelineError>> {
        self.exec.map(paths, |p| self.analyze_file(p))
    }
}

/// One-shot analysis of a file with resolved settings and scorers.
pub fn analyze_play(
    path: &Path,
    settings: Settings,
    scorers: ArcScorers<'_>,
) -> Result<PlayReport, PipelineError> {
    Analyzer::new(settings, scorers).analyze_file(path).map(|(r, _)| r)
}
