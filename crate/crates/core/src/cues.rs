//! Lexical cues shared by the labeling functions and edge orientation.

use std::collections::HashSet;
use std::path::Path;

const DEFAULT_TEMPORAL_CUES: &str = include_str!("../data/temporal_cues.txt");

pub const TEMPORAL_PREPOSITIONS: &[&str] = &["on", "in", "at", "during", "since", "until", "before", "after"];
pub const LOCATIVE_PREPOSITIONS: &[&str] = &["in", "at", "near", "from", "to", "outside", "inside"];
pub const CAUSAL_MARKERS: &[&[&str]] = &[
    &["in", "order", "to"],
    &["due", "to"],
    &["because"],
    &["since"],
    &["as"],
    &["to"],
    &["after"],
];

/// Temporal cue words, loaded from a plain-text list (one lowercase cue per
/// line, `#` starts a comment).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalLexicon {
    cues: HashSet<String>,
}

impl Default for TemporalLexicon {
    fn default() -> Self {
        TemporalLexicon::parse(DEFAULT_TEMPORAL_CUES)
    }
}

impl TemporalLexicon {
    pub fn parse(text: &str) -> Self {
        let cues = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
        TemporalLexicon { cues }
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn len(&self) -> usize {
        self.cues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cues.is_empty()
    }

    /// A lexicon hit or a four-digit year between 1000 and 2999.
    pub fn is_cue(&self, token: &str) -> bool {
        let lower = token.to_lowercase();
        let trimmed = lower.trim_matches(|c: char| !c.is_alphanumeric());
        self.cues.contains(trimmed) || is_year(trimmed)
    }

    /// Same as [`is_cue`](Self::is_cue) but ignores verbs and modals, so
    /// "may" as a modal is not read as the month.
    pub fn is_tagged_cue(&self, token: &str, tag: &str) -> bool {
        !(tag.starts_with("VB") || tag == "MD") && self.is_cue(token)
    }

    pub fn any_cue<'a>(&self, tokens: impl IntoIterator<Item = &'a str>) -> bool {
        tokens.into_iter().any(|t| self.is_cue(t))
    }
}

fn is_year(token: &str) -> bool {
    token.len() == 4 && token.bytes().all(|b| b.is_ascii_digit()) && matches!(token.as_bytes()[0], b'1' | b'2')
}

/// True when `tokens` (lowercased) begins with the multi-word `marker`.
pub fn starts_with_words(tokens: &[String], marker: &[&str]) -> bool {
    tokens.len() >= marker.len() && tokens.iter().zip(marker).all(|(t, m)| t == m)
}

pub fn starts_with_causal_marker(tokens: &[String]) -> bool {
    CAUSAL_MARKERS.iter().any(|m| starts_with_words(tokens, m))
}
