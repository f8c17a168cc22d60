use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::PlayReport;
use crate::affect::Emotion;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompareError {
    #[error("comparison needs at least 2 reports, got {0}")]
    TooFewReports(usize),
    #[error("reports are incompatible; differing keys: {}", keys.join(", "))]
    Incompatible { keys: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayRanking {
    pub title: String,
    pub config_fingerprint: String,
    pub ttr: f64,
    pub dominant_emotion: Option<Emotion>,
    pub final_third_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparativeReport {
    pub plays: Vec<PlayRanking>,
    /// Titles by type-token ratio, highest first.
    pub ttr_ranking: Vec<String>,
    pub dominant_emotion: BTreeMap<String, Option<Emotion>>,
    /// Terms present in every play's frequency table, alphabetically.
    pub shared_top_terms: Vec<String>,
    /// Titles by final-third tension delta, highest first; plays without
    /// tension metrics come last.
    pub tension_ranking: Vec<String>,
}

fn incompatible_keys(reports: &[&PlayReport]) -> Vec<String> {
    let first = &reports[0].settings;
    let mut keys = BTreeSet::new();
    for r in &reports[1..] {
        let s = &r.settings;
        if s.window != first.window {
            keys.insert("window");
        }
        if s.include_partial_tail != first.include_partial_tail {
            keys.insert("include_partial_tail");
        }
        if s.counting_policy != first.counting_policy {
            keys.insert("counting_policy");
        }
        if s.sentiment_scorer != first.sentiment_scorer {
            keys.insert("sentiment_scorer");
        }
        if s.emotion_scorer != first.emotion_scorer {
            keys.insert("emotion_scorer");
        }
    }
    keys.into_iter().map(str::to_owned).collect()
}

/// Ranks already-computed reports against each other. Ties are broken by
/// title ascending.
pub fn compare_plays(reports: &[&PlayReport]) -> Result<ComparativeReport, CompareError> {
    if reports.len() < 2 {
        return Err(CompareError::TooFewReports(reports.len()));
    }
    let keys = incompatible_keys(reports);
    if !keys.is_empty() {
        return Err(CompareError::Incompatible { keys });
    }

    let plays: Vec<PlayRanking> = reports
        .iter()
        .map(|r| PlayRanking {
            title: r.title.clone(),
            config_fingerprint: r.config_fingerprint.clone(),
            ttr: r.lexical.summary.ttr,
            dominant_emotion: r.percentages.map(|p| p.argmax()),
            final_third_delta: r.tension.map(|t| t.final_third_delta),
        })
        .collect();

    let mut by_ttr: Vec<&PlayRanking> = plays.iter().collect();
    by_ttr.sort_by(|a, b| b.ttr.total_cmp(&a.ttr).then_with(|| a.title.cmp(&b.title)));

    let mut by_tension: Vec<&PlayRanking> = plays.iter().collect();
    by_tension.sort_by(|a, b| match (a.final_third_delta, b.final_third_delta) {
        (Some(x), Some(y)) => y.total_cmp(&x).then_with(|| a.title.cmp(&b.title)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.title.cmp(&b.title),
    });

    let mut shared: BTreeSet<&str> = reports[0].lexical.frequencies.terms().collect();
    for r in &reports[1..] {
        let terms: BTreeSet<&str> = r.lexical.frequencies.terms().collect();
        shared = shared.intersection(&terms).copied().collect();
    }

    Ok(ComparativeReport {
        ttr_ranking: by_ttr.iter().map(|p| p.title.clone()).collect(),
        tension_ranking: by_tension.iter().map(|p| p.title.clone()).collect(),
        dominant_emotion: plays
            .iter()
            .map(|p| (p.title.clone(), p.dominant_emotion))
            .collect(),
        shared_top_terms: shared.into_iter().map(str::to_owned).collect(),
        plays,
    })
}
