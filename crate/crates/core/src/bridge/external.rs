use std::sync::Mutex;

use super::{open_scorer, BridgeConfig, BridgeError, ItemError, ScorePayload, ScorerHandle, Task};
use crate::affect::{
    EmotionEvidence, EmotionScorer, Granularity, ScoreError, ScorerDescriptor, ScorerKind,
    SentimentScorer,
};

/// Sentiment and emotion scoring served by an external process.
pub struct ExternalScorer {
    handle: Mutex<ScorerHandle>,
    granularity: Granularity,
}

impl ExternalScorer {
    pub fn open(endpoint: &str, config: BridgeConfig) -> Result<Self, BridgeError> {
        Ok(Self::new(open_scorer(endpoint, config)?))
    }

    pub fn new(handle: ScorerHandle) -> Self {
        Self {
            handle: Mutex::new(handle),
            granularity: Granularity::Sentence,
        }
    }

    pub fn with_granularity(mut self, granularity: Granularity) -> Self {
        self.granularity = granularity;
        self
    }

    pub fn supports(&self, task: Task) -> bool {
        self.lock().supports(task)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, ScorerHandle> {
        self.handle.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn descriptor_inner(&self) -> ScorerDescriptor {
        ScorerDescriptor {
            kind: ScorerKind::External,
            resource: self.lock().endpoint().to_owned(),
            granularity: self.granularity,
        }
    }

    fn identity_inner(&self) -> String {
        let h = self.lock();
        format!("external:{:?}:{}:{}", self.granularity, h.endpoint(), h.model_name())
    }

    fn run(&self, task: Task, units: &[&str]) -> Result<Vec<ScorePayload>, ScoreError> {
        let mut handle = self.lock();
        let requests: Vec<_> = units.iter().map(|u| handle.request(task, *u)).collect();
        let items = handle.score_batch(&requests).map_err(|e| match e {
            BridgeError::Timeout { .. } => ScoreError::Timeout(e.to_string()),
            other => ScoreError::Unavailable(other.to_string()),
        })?;
        items
            .into_iter()
            .map(|item| {
                item.result.map_err(|e| match e {
                    ItemError::Model(m) => ScoreError::Model(m),
                    other => ScoreError::Protocol(format!("request {}: {other}", item.id)),
                })
            })
            .collect()
    }
}

impl SentimentScorer for ExternalScorer {
    fn descriptor(&self) -> ScorerDescriptor {
        self.descriptor_inner()
    }

    fn identity(&self) -> String {
        self.identity_inner()
    }

    fn score_units(&self, units: &[&str]) -> Result<Vec<Option<f64>>, ScoreError> {
        self.run(Task::Sentiment, units)?
            .into_iter()
            .map(|p| match p {
                ScorePayload::Valence(v) => Ok(Some(v)),
                ScorePayload::Scores(_) => Err(ScoreError::Protocol("expected a valence".into())),
            })
            .collect()
    }
}

impl EmotionScorer for ExternalScorer {
    fn descriptor(&self) -> ScorerDescriptor {
        self.descriptor_inner()
    }

    fn identity(&self) -> String {
        self.identity_inner()
    }

    fn score_units(&self, units: &[&str]) -> Result<EmotionEvidence, ScoreError> {
        self.run(Task::Emotion, units)?
            .into_iter()
            .map(|p| match p {
                ScorePayload::Scores(s) => Ok(s.0),
                ScorePayload::Valence(_) => Err(ScoreError::Protocol("expected emotion scores".into())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(EmotionEvidence::Distributions)
    }
}
