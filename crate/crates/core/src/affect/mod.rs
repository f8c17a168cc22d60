//! Sentiment and emotion scoring per stage minute, arc assembly and the
//! summary metrics derived from arcs.

mod arc;
mod lexicon;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use arc::{build_arc, build_arc_with, segment_units, ArcScorers};
pub use lexicon::{EmotionLexicon, LexiconEmotionScorer, LexiconSentimentScorer, SentimentLexicon};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoreError {
    #[error("scorer unavailable: {0}")]
    Unavailable(String),
    #[error("scorer timed out: {0}")]
    Timeout(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("model error: {0}")]
    Model(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AffectError {
    #[error("empty scope: segment has no text to score")]
    EmptyScope,
    #[error("scorer failed{}: {source}", segment.map(|i| format!(" on segment {i}")).unwrap_or_default())]
    Scorer {
        segment: Option<usize>,
        source: ScoreError,
    },
    #[error("score {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("emotion distribution has no mass")]
    Degenerate,
    #[error("no emotional signal in any arc point")]
    NoEmotionalSignal,
    #[error("arc too short: {points} sentiment points, need at least 3")]
    ArcTooShort { points: usize },
    #[error("at least one scorer is required to build an arc")]
    NoScorer,
    #[error("lexicon {source_name}: {message}")]
    Lexicon { source_name: String, message: String },
}

impl AffectError {
    fn at_segment(self, index: usize) -> Self {
        match self {
            AffectError::Scorer { source, .. } => AffectError::Scorer {
                segment: Some(index),
                source,
            },
            other => other,
        }
    }
}

impl From<ScoreError> for AffectError {
    fn from(source: ScoreError) -> Self {
        AffectError::Scorer {
            segment: None,
            source,
        }
    }
}

/// The fixed emotion vocabulary, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Sadness,
    Joy,
    Love,
    Anger,
    Fear,
    Surprise,
}

impl Emotion {
    pub const ALL: [Emotion; 6] = [
        Emotion::Sadness,
        Emotion::Joy,
        Emotion::Love,
        Emotion::Anger,
        Emotion::Fear,
        Emotion::Surprise,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Emotion::Sadness => "sadness",
            Emotion::Joy => "joy",
            Emotion::Love => "love",
            Emotion::Anger => "anger",
            Emotion::Fear => "fear",
            Emotion::Surprise => "surprise",
        }
    }

    pub fn from_label(label: &str) -> Option<Emotion> {
        Emotion::ALL.into_iter().find(|e| e.label() == label)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Positive-class probability: 0 is maximally negative, 0.5 neutral.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Valence(f64);

impl Valence {
    pub const NEUTRAL: Valence = Valence(0.5);

    pub fn new(value: f64) -> Result<Self, AffectError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Valence(value))
        } else {
            Err(AffectError::OutOfRange(value))
        }
    }

    /// Maps a signed polarity in [-1, 1] onto [0, 1].
    pub fn from_polarity(p: f64) -> Result<Self, AffectError> {
        Valence::new((p + 1.0) / 2.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Valence {
    type Error = AffectError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Valence::new(v)
    }
}

impl From<Valence> for f64 {
    fn from(v: Valence) -> f64 {
        v.0
    }
}

/// One value per emotion label, serialized as a label-keyed map.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmotionScores(pub [f64; 6]);

impl EmotionScores {
    pub fn get(&self, e: Emotion) -> f64 {
        self.0[e.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Emotion, f64)> + '_ {
        Emotion::ALL.into_iter().map(|e| (e, self.0[e.index()]))
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Label with the highest score; ties go to the earlier label.
    pub fn argmax(&self) -> Emotion {
        let mut best = Emotion::ALL[0];
        for e in Emotion::ALL {
            if self.get(e) > self.get(best) {
                best = e;
            }
        }
        best
    }
}

impl Serialize for EmotionScores {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(6))?;
        for (e, v) in self.iter() {
            map.serialize_entry(e.label(), &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for EmotionScores {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = std::collections::BTreeMap::<String, f64>::deserialize(d)?;
        EmotionScores::from_labels(&map).map_err(serde::de::Error::custom)
    }
}

impl EmotionScores {
    /// Builds scores from a label map that must name all six labels.
    pub fn from_labels(
        map: &std::collections::BTreeMap<String, f64>,
    ) -> Result<Self, ScoreError> {
        let mut out = [0.0; 6];
        for e in Emotion::ALL {
            out[e.index()] = *map
                .get(e.label())
                .ok_or_else(|| ScoreError::Protocol(format!("missing emotion label `{e}`")))?;
        }
        Ok(EmotionScores(out))
    }
}

/// Normalized distribution over the six labels for one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionProfile {
    pub scores: EmotionScores,
    pub no_signal: bool,
}

impl EmotionProfile {
    pub fn no_signal() -> Self {
        EmotionProfile {
            scores: EmotionScores([1.0 / 6.0; 6]),
            no_signal: true,
        }
    }

    /// Normalizes raw hit counts; zero hits give a uniform no-signal profile.
    pub fn from_hits(hits: [u64; 6]) -> Self {
        let total: u64 = hits.iter().sum();
        if total == 0 {
            return EmotionProfile::no_signal();
        }
        EmotionProfile {
            scores: EmotionScores(hits.map(|h| h as f64 / total as f64)),
            no_signal: false,
        }
    }

    /// Rescales a non-negative distribution to sum to one.
    pub fn from_distribution(raw: [f64; 6]) -> Result<Self, AffectError> {
        if raw.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(AffectError::Degenerate);
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(AffectError::Degenerate);
        }
        Ok(EmotionProfile {
            scores: EmotionScores(raw.map(|v| v / total)),
            no_signal: false,
        })
    }
}

/// What an emotion scorer reports for a segment's units.
#[derive(Debug, Clone, PartialEq)]
pub enum EmotionEvidence {
    /// Lexicon hits pooled over all units.
    Hits([u64; 6]),
    /// One model distribution per unit.
    Distributions(Vec<[f64; 6]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    LexiconSentiment,
    LexiconEmotion,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    #[default]
    Sentence,
    Segment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScorerDescriptor {
    pub kind: ScorerKind,
    /// Lexicon path or external endpoint.
    pub resource: String,
    pub granularity: Granularity,
}

/// Scores text units for sentiment. `None` marks a unit without signal.
pub trait SentimentScorer: Send + Sync {
    fn descriptor(&self) -> ScorerDescriptor;
    /// Stable identity of the scorer and its resources, for fingerprinting.
    fn identity(&self) -> String;
    fn score_units(&self, units: &[&str]) -> Result<Vec<Option<f64>>, ScoreError>;
}

pub trait EmotionScorer: Send + Sync {
    fn descriptor(&self) -> ScorerDescriptor;
    fn identity(&self) -> String;
    fn score_units(&self, units: &[&str]) -> Result<EmotionEvidence, ScoreError>;
}

fn prepare_units<'a>(units: &[&'a str], granularity: Granularity) -> Result<Vec<std::borrow::Cow<'a, str>>, AffectError> {
    let kept: Vec<&str> = units.iter().copied().filter(|u| !u.trim().is_empty()).collect();
    if kept.is_empty() {
        return Err(AffectError::EmptyScope);
    }
    Ok(match granularity {
        Granularity::Sentence => kept.into_iter().map(Into::into).collect(),
        Granularity::Segment => vec![kept.join(" ").into()],
    })
}

/// Unweighted mean over the units that carried signal; neutral when none did.
pub fn mean_unit_valence(unit_scores: &[Option<f64>]) -> Result<Valence, AffectError> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in unit_scores.iter().flatten() {
        Valence::new(*v)?;
        sum += v;
        n += 1;
    }
    if n == 0 {
        return Ok(Valence::NEUTRAL);
    }
    // Clamp guards against the mean drifting a ulp past the unit interval.
    Valence::new((sum / n as f64).clamp(0.0, 1.0))
}

/// Averages unit distributions (each renormalized first) and renormalizes.
pub fn mean_unit_distribution(units: &[[f64; 6]]) -> Result<EmotionProfile, AffectError> {
    if units.is_empty() {
        return Err(AffectError::EmptyScope);
    }
    let mut acc = [0.0; 6];
    for raw in units {
        let p = EmotionProfile::from_distribution(*raw)?;
        for (a, v) in acc.iter_mut().zip(p.scores.0) {
            *a += v;
        }
    }
    EmotionProfile::from_distribution(acc.map(|v| v / units.len() as f64))
}

/// Scores every unit and averages the results into one valence.
pub fn score_segment_sentiment(
    units: &[&str],
    scorer: &dyn SentimentScorer,
) -> Result<Valence, AffectError> {
    let units = prepare_units(units, scorer.descriptor().granularity)?;
    let refs: Vec<&str> = units.iter().map(|u| u.as_ref()).collect();
    let scores = scorer.score_units(&refs)?;
    if scores.len() != refs.len() {
        return Err(ScoreError::Protocol(format!(
            "expected {} unit scores, got {}",
            refs.len(),
            scores.len()
        ))
        .into());
    }
    mean_unit_valence(&scores)
}

pub fn score_segment_emotions(
    units: &[&str],
    scorer: &dyn EmotionScorer,
) -> Result<EmotionProfile, AffectError> {
    let units = prepare_units(units, scorer.descriptor().granularity)?;
    let refs: Vec<&str> = units.iter().map(|u| u.as_ref()).collect();
    match scorer.score_units(&refs)? {
        EmotionEvidence::Hits(hits) => Ok(EmotionProfile::from_hits(hits)),
        EmotionEvidence::Distributions(d) => mean_unit_distribution(&d),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcPoint {
    pub segment_index: usize,
    pub valence: Option<Valence>,
    pub emotions: Option<EmotionProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffectArc {
    pub play: String,
    pub window: usize,
    pub points: Vec<ArcPoint>,
}

impl AffectArc {
    /// CSV with one row per point; absent values are empty fields.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["segment", "valence"];
        header.extend(Emotion::ALL.iter().map(|e| e.label()));
        header.push("no_signal");
        w.write_record(&header).expect("in-memory write");
        for p in &self.points {
            let mut row = vec![
                p.segment_index.to_string(),
                p.valence.map(|v| format!("{:.6}", v.value())).unwrap_or_default(),
            ];
            match &p.emotions {
                Some(prof) => {
                    row.extend(prof.scores.0.iter().map(|v| format!("{v:.6}")));
                    row.push(prof.no_signal.to_string());
                }
                None => row.extend(std::iter::repeat_n(String::new(), 7)),
            }
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }
}

/// Share of total emotion mass per label, in percent.
///
/// Points flagged `no_signal` are left out. Each label's column is summed in
/// sorted order so the result does not depend on point order.
pub fn emotion_percentages(arc: &AffectArc) -> Result<EmotionScores, AffectError> {
    let profiles: Vec<&EmotionProfile> = arc
        .points
        .iter()
        .filter_map(|p| p.emotions.as_ref())
        .filter(|p| !p.no_signal)
        .collect();
    if profiles.is_empty() {
        return Err(AffectError::NoEmotionalSignal);
    }
    let mut mass = [0.0; 6];
    for e in Emotion::ALL {
        let mut column: Vec<f64> = profiles.iter().map(|p| p.scores.get(e)).collect();
        column.sort_by(f64::total_cmp);
        mass[e.index()] = column.iter().sum();
    }
    let mut sorted = mass;
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total <= 0.0 {
        return Err(AffectError::NoEmotionalSignal);
    }
    Ok(EmotionScores(mass.map(|m| 100.0 * m / total)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensionMetrics {
    /// Mean negativity (1 - valence) over the last third minus the rest.
    pub final_third_delta: f64,
    /// Segment index of the lowest valence, earliest on ties.
    pub peak_negativity_index: usize,
    pub mean_valence: f64,
}

pub fn tension_metrics(arc: &AffectArc) -> Result<TensionMetrics, AffectError> {
    let series: Vec<(usize, f64)> = arc
        .points
        .iter()
        .filter_map(|p| p.valence.map(|v| (p.segment_index, v.value())))
        .collect();
    let n = series.len();
    if n < 3 {
        return Err(AffectError::ArcTooShort { points: n });
    }
    let tail = n.div_ceil(3);
    let negativity = |s: &[(usize, f64)]| s.iter().map(|(_, v)| 1.0 - v).sum::<f64>() / s.len() as f64;
    let (head, last) = series.split_at(n - tail);
    let mut peak = series[0];
    for &(i, v) in &series[1..] {
        if v < peak.1 {
            peak = (i, v);
        }
    }
    Ok(TensionMetrics {
        final_third_delta: negativity(last) - negativity(head),
        peak_negativity_index: peak.0,
        mean_valence: series.iter().map(|(_, v)| v).sum::<f64>() / n as f64,
    })
}
