use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{CorpusError, RawDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeakerLabelPolicy {
    Keep,
    #[default]
    Drop,
}

/// Text normalization applied to OCR output before tokenization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningRules {
    pub dehyphenate_linebreaks: bool,
    pub strip_control_chars: bool,
    pub collapse_whitespace: bool,
    /// Regular expressions matched line by line. Matches are deleted, and a
    /// line left blank by a deletion is removed entirely.
    pub drop_patterns: Vec<String>,
    pub speaker_label_policy: SpeakerLabelPolicy,
}

impl Default for CleaningRules {
    fn default() -> Self {
        Self {
            dehyphenate_linebreaks: true,
            strip_control_chars: true,
            collapse_whitespace: true,
            drop_patterns: Vec::new(),
            speaker_label_policy: SpeakerLabelPolicy::Drop,
        }
    }
}

impl CleaningRules {
    /// Rules that only normalize line endings.
    pub fn none() -> Self {
        Self {
            dehyphenate_linebreaks: false,
            strip_control_chars: false,
            collapse_whitespace: false,
            drop_patterns: Vec::new(),
            speaker_label_policy: SpeakerLabelPolicy::Keep,
        }
    }

    pub fn compile(&self) -> Result<Cleaner, CorpusError> {
        let drop = self
            .drop_patterns
            .iter()
            .map(|p| {
                Regex::new(p).map_err(|e| CorpusError::BadPattern {
                    pattern: p.clone(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Cleaner {
            rules: self.clone(),
            drop,
        })
    }
}

/// Compiled form of [`CleaningRules`].
#[derive(Debug, Clone)]
pub struct Cleaner {
    rules: CleaningRules,
    drop: Vec<Regex>,
}

static LINEBREAK_HYPHEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(\p{L})-[ \t]*\n[ \t]*(\p{L})").unwrap());

// An all-capitals name of at least two letters, e.g. "LE DEALER" or "MONSIEUR".
const LABEL: &str = r"\p{Lu}[\p{Lu}\p{M}'’ \-]*\p{Lu}";

static LABEL_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"^\s*{LABEL}\s*[.:]?\s*$")).unwrap());
static LABEL_PREFIX: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"^\s*{LABEL}\s*[.:]\s*(?:[—–]\s*)?")).unwrap());

impl Cleaner {
    pub fn rules(&self) -> &CleaningRules {
        &self.rules
    }

    /// Applies every rule until the text stops changing, which makes cleaning
    /// idempotent even when one rule exposes new work for another.
    pub fn clean(&self, raw: &str) -> String {
        let mut text = normalize_newlines(raw);
        loop {
            let next = self.pass(&text);
            if next == text {
                return next;
            }
            text = next;
        }
    }

    fn pass(&self, input: &str) -> String {
        let mut text = if self.rules.strip_control_chars {
            input
                .chars()
                .map(|c| if c.is_control() && c != '\n' { ' ' } else { c })
                .collect()
        } else {
            input.to_owned()
        };
        if !self.drop.is_empty() {
            text = self.drop_lines(&text);
        }
        if self.rules.speaker_label_policy == SpeakerLabelPolicy::Drop {
            text = drop_speaker_labels(&text);
        }
        if self.rules.dehyphenate_linebreaks {
            text = LINEBREAK_HYPHEN.replace_all(&text, "$1$2").into_owned();
        }
        if self.rules.collapse_whitespace {
            text = collapse_whitespace(&text);
        }
        text
    }

    fn drop_lines(&self, text: &str) -> String {
        let mut out = Vec::new();
        for line in text.split('\n') {
            let mut current = line.to_owned();
            let mut touched = false;
            for re in &self.drop {
                loop {
                    let next = re.replace_all(&current, "");
                    if next == current {
                        break;
                    }
                    current = next.into_owned();
                    touched = true;
                }
            }
            if touched && current.trim().is_empty() {
                continue;
            }
            out.push(current);
        }
        out.join("\n")
    }
}

/// Convenience wrapper compiling `rules` and cleaning `doc`.
pub fn clean_text(doc: &RawDocument, rules: &CleaningRules) -> Result<String, CorpusError> {
    Ok(rules.compile()?.clean(doc.raw_text()))
}

fn normalize_newlines(s: &str) -> String {
    s.replace("\r\n", "\n").replace('\r', "\n")
}

fn drop_speaker_labels(text: &str) -> String {
    let mut out = Vec::new();
    for line in text.split('\n') {
        if LABEL_LINE.is_match(line) {
            continue;
        }
        match LABEL_PREFIX.find(line) {
            Some(m) => out.push(&line[m.end()..]),
            None => out.push(line),
        }
    }
    out.join("\n")
}

/// Runs of horizontal whitespace become one space, lines are trimmed, blank
/// line runs shrink to a single paragraph break, and the text is trimmed.
fn collapse_whitespace(text: &str) -> String {
    let mut lines: Vec<String> = Vec::new();
    let mut blank_pending = false;
    for line in text.split('\n') {
        let squeezed = line.split_whitespace().collect::<Vec<_>>().join(" ");
        if squeezed.is_empty() {
            blank_pending = !lines.is_empty();
            continue;
        }
        if blank_pending {
            lines.push(String::new());
            blank_pending = false;
        }
        lines.push(squeezed);
    }
    lines.join("\n")
}
