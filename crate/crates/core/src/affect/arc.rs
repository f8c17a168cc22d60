use std::ops::Range;

use super::{
    score_segment_emotions, score_segment_sentiment, AffectArc, AffectError, ArcPoint,
    EmotionScorer, SentimentScorer,
};
use crate::corpus::{Segment, TokenizedPlay};
use crate::exec::Execution;

#[derive(Clone, Copy, Default)]
pub struct ArcScorers<'a> {
    pub sentiment: Option<&'a dyn SentimentScorer>,
    pub emotion: Option<&'a dyn EmotionScorer>,
}

/// Sentence token ranges scored for each segment.
///
/// A sentence belongs to the segment holding its first token. A segment that
/// starts no sentence (it lies inside one long sentence) is scored on its own
/// token span instead.
pub fn segment_units(play: &TokenizedPlay, segments: &[Segment]) -> Vec<Vec<Range<usize>>> {
    let mut units: Vec<Vec<Range<usize>>> = vec![Vec::new(); segments.len()];
    for sentence in &play.sentences {
        let owner = segments.partition_point(|s| s.token_range.end <= sentence.start);
        if let Some(seg) = segments.get(owner) {
            if seg.token_range.contains(&sentence.start) {
                units[owner].push(sentence.clone());
            }
        }
    }
    for (seg, u) in segments.iter().zip(units.iter_mut()) {
        if u.is_empty() && !seg.token_range.is_empty() {
            u.push(seg.token_range.clone());
        }
    }
    units
}

pub fn build_arc(
    play: &TokenizedPlay,
    segments: &[Segment],
    window: usize,
    scorers: ArcScorers<'_>,
) -> Result<AffectArc, AffectError> {
    build_arc_with(play, segments, window, scorers, Execution::default())
}

/// Scores every segment and assembles the arc in segment order. The first
/// failing segment (by index) determines the error.
pub fn build_arc_with(
    play: &TokenizedPlay,
    segments: &[Segment],
    window: usize,
    scorers: ArcScorers<'_>,
    exec: Execution,
) -> Result<AffectArc, AffectError> {
    if scorers.sentiment.is_none() && scorers.emotion.is_none() {
        return Err(AffectError::NoScorer);
    }
    let units = segment_units(play, segments);
    let work: Vec<(usize, &Vec<Range<usize>>)> = units.iter().enumerate().collect();
    let results = exec.map(&work, |&(i, ranges)| {
        let texts: Vec<&str> = ranges.iter().map(|r| play.text_of(r.clone())).collect();
        let valence = scorers
            .sentiment
            .map(|s| score_segment_sentiment(&texts, s))
            .transpose()
            .map_err(|e| e.at_segment(i))?;
        let emotions = scorers
            .emotion
            .map(|s| score_segment_emotions(&texts, s))
            .transpose()
            .map_err(|e| e.at_segment(i))?;
        Ok(ArcPoint {
            segment_index: i,
            valence,
            emotions,
        })
    });
    let points = results.into_iter().collect::<Result<Vec<_>, AffectError>>()?;
    Ok(AffectArc {
        play: play.title().to_owned(),
        window,
        points,
    })
}
