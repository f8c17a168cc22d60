use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{
    AffectError, Emotion, EmotionEvidence, EmotionScorer, Granularity, ScoreError, ScorerDescriptor,
    ScorerKind, SentimentScorer,
};
use crate::corpus::{fold, tokenize, Stoplist};

fn lexicon_error(source: &str, message: impl Into<String>) -> AffectError {
    AffectError::Lexicon {
        source_name: source.to_owned(),
        message: message.into(),
    }
}

fn read_file(path: &Path) -> Result<String, AffectError> {
    std::fs::read_to_string(path).map_err(|e| lexicon_error(&path.display().to_string(), e.to_string()))
}

fn records(csv_text: &str, source: &str, columns: [&str; 2]) -> Result<Vec<csv::StringRecord>, AffectError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| lexicon_error(source, e.to_string()))?
        .clone();
    if header.len() < 2 || header[0] != *columns[0] || header[1] != *columns[1] {
        return Err(lexicon_error(
            source,
            format!("expected header `{},{}`", columns[0], columns[1]),
        ));
    }
    reader
        .records()
        .map(|r| r.map_err(|e| lexicon_error(source, e.to_string())))
        .collect()
}

fn alpha_words(unit: &str) -> impl Iterator<Item = String> {
    tokenize(unit, &Stoplist::empty())
        .into_iter()
        .filter(|t| t.is_alpha)
        .map(|t| t.lower)
}

/// Term polarities in [-1, 1], loaded from `term,polarity` CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentLexicon {
    source: String,
    terms: HashMap<String, f64>,
    digest: String,
}

impl SentimentLexicon {
    pub fn parse(csv_text: &str, source: &str) -> Result<Self, AffectError> {
        let mut sorted = BTreeMap::new();
        for (line, rec) in records(csv_text, source, ["term", "polarity"])?.iter().enumerate() {
            let term = fold(rec.get(0).unwrap_or_default());
            let raw = rec.get(1).unwrap_or_default();
            let polarity: f64 = raw
                .parse()
                .ok()
                .filter(|p: &f64| (-1.0..=1.0).contains(p))
                .ok_or_else(|| {
                    lexicon_error(source, format!("row {}: polarity `{raw}` not in [-1, 1]", line + 2))
                })?;
            if term.is_empty() {
                return Err(lexicon_error(source, format!("row {}: empty term", line + 2)));
            }
            sorted.insert(term, polarity);
        }
        let mut hasher = Sha256::new();
        for (t, p) in &sorted {
            hasher.update(format!("{t}\t{p}\n"));
        }
        Ok(Self {
            source: source.to_owned(),
            digest: hex::encode(hasher.finalize()),
            terms: sorted.into_iter().collect(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, AffectError> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self, AffectError> {
        let mut csv = String::from("term,polarity\n");
        for (t, p) in pairs {
            csv.push_str(&format!("{t},{p}\n"));
        }
        Self::parse(&csv, "<inline>")
    }

    pub fn polarity(&self, term: &str) -> Option<f64> {
        self.terms.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }
}

/// Emotion associations loaded from `term,emotion` CSV. A term may carry
/// several emotions (one row each). An optional third column in NRC style
/// marks rows with `0` as non-associations, which are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionLexicon {
    source: String,
    terms: HashMap<String, [bool; 6]>,
    digest: String,
}

impl EmotionLexicon {
    pub fn parse(csv_text: &str, source: &str) -> Result<Self, AffectError> {
        let mut sorted: BTreeMap<String, [bool; 6]> = BTreeMap::new();
        for (line, rec) in records(csv_text, source, ["term", "emotion"])?.iter().enumerate() {
            if rec.get(2).is_some_and(|flag| flag == "0") {
                continue;
            }
            let term = fold(rec.get(0).unwrap_or_default());
            let label = rec.get(1).unwrap_or_default();
            let emotion = Emotion::from_label(&label.to_lowercase()).ok_or_else(|| {
                lexicon_error(source, format!("row {}: unknown emotion `{label}`", line + 2))
            })?;
            if term.is_empty() {
                return Err(lexicon_error(source, format!("row {}: empty term", line + 2)));
            }
            sorted.entry(term).or_default()[emotion.index()] = true;
        }
        let mut hasher = Sha256::new();
        for (t, flags) in &sorted {
            hasher.update(format!("{t}\t{flags:?}\n"));
        }
        Ok(Self {
            source: source.to_owned(),
            digest: hex::encode(hasher.finalize()),
            terms: sorted.into_iter().collect(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, AffectError> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Emotion)>) -> Result<Self, AffectError> {
        let mut csv = String::from("term,emotion\n");
        for (t, e) in pairs {
            csv.push_str(&format!("{t},{e}\n"));
        }
        Self::parse(&csv, "<inline>")
    }

    pub fn emotions(&self, term: &str) -> impl Iterator<Item = Emotion> + '_ {
        let flags = self.terms.get(term).copied().unwrap_or_default();
        Emotion::ALL.into_iter().filter(move |e| flags[e.index()])
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }
}

/// Valence of a unit is `(p + 1) / 2` where `p` is the mean polarity of the
/// lexicon terms it contains.
#[derive(Debug, Clone)]
pub struct LexiconSentimentScorer {
    lexicon: SentimentLexicon,
    granularity: Granularity,
}

impl LexiconSentimentScorer {
    pub fn new(lexicon: SentimentLexicon) -> Self {
        Self {
            lexicon,
            granularity: Granularity::Sentence,
        }
    }

    pub fn with_granularity(mut self, granularity: Granularity) -> Self {
        self.granularity = granularity;
        self
    }

    pub fn score_unit(&self, unit: &str) -> Option<f64> {
        let mut sum = 0.0;
        let mut hits = 0usize;
        for w in alpha_words(unit) {
            if let Some(p) = self.lexicon.polarity(&w) {
                sum += p;
                hits += 1;
            }
        }
        (hits > 0).then(|| ((sum / hits as f64) + 1.0) / 2.0)
    }
}

impl SentimentScorer for LexiconSentimentScorer {
    fn descriptor(&self) -> ScorerDescriptor {
        ScorerDescriptor {
            kind: ScorerKind::LexiconSentiment,
            resource: self.lexicon.source.clone(),
            granularity: self.granularity,
        }
    }

    fn identity(&self) -> String {
        format!("lexicon-sentiment:{:?}:{}", self.granularity, self.lexicon.digest)
    }

    fn score_units(&self, units: &[&str]) -> Result<Vec<Option<f64>>, ScoreError> {
        Ok(units.iter().map(|u| self.score_unit(u)).collect())
    }
}

/// Counts emotion-associated term hits across a segment's units.
#[derive(Debug, Clone)]
pub struct LexiconEmotionScorer {
    lexicon: EmotionLexicon,
    granularity: Granularity,
}

impl LexiconEmotionScorer {
    pub fn new(lexicon: EmotionLexicon) -> Self {
        Self {
            lexicon,
            granularity: Granularity::Sentence,
        }
    }

    pub fn with_granularity(mut self, granularity: Granularity) -> Self {
        self.granularity = granularity;
        self
    }

    pub fn hits(&self, units: &[&str]) -> [u64; 6] {
        let mut hits = [0u64; 6];
        for unit in units {
            for w in alpha_words(unit) {
                for e in self.lexicon.emotions(&w) {
                    hits[e.index()] += 1;
                }
            }
        }
        hits
    }
}

impl EmotionScorer for LexiconEmotionScorer {
    fn descriptor(&self) -> ScorerDescriptor {
        ScorerDescriptor {
            kind: ScorerKind::LexiconEmotion,
            resource: self.lexicon.source.clone(),
            granularity: self.granularity,
        }
    }

    fn identity(&self) -> String {
        format!("lexicon-emotion:{:?}:{}", self.granularity, self.lexicon.digest)
    }

    fn score_units(&self, units: &[&str]) -> Result<EmotionEvidence, ScoreError> {
        Ok(EmotionEvidence::Hits(self.hits(units)))
    }
}
