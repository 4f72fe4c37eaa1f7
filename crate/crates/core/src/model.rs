//! Domain types: token addressing, constituents, relations, triples,
//! documents and annotation sets.
//!
//! Everything here is immutable once constructed. Constructors enforce the
//! invariants, and deserialization goes through the same constructors.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize_phrase;
use crate::tree::{extract_constituents, ParseTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("invalid span [{start}, {end}) in sentence {sent_index}")]
    InvalidSpan {
        sent_index: usize,
        start: usize,
        end: usize,
    },
    #[error("{0} text is empty after normalization")]
    EmptyPhrase(&'static str),
    #[error("source and target spans overlap")]
    OverlappingSpans,
    #[error("coreference cluster has no mentions")]
    EmptyCluster,
    #[error("document {doc_id}: {message}")]
    InvalidDocument { doc_id: String, message: String },
    #[error("title marked redundant but triple {index} uses a span from sentence 0")]
    TitleSpanWhileRedundant { index: usize },
}

/// One token of a document; sentence 0 is the title.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub sent_index: usize,
    pub tok_index: usize,
}

/// Half-open token range `[start, end)` within one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct Span {
    pub sent_index: usize,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(sent_index: usize, start: usize, end: usize) -> Result<Self, ModelError> {
        if start >= end {
            return Err(ModelError::InvalidSpan { sent_index, start, end });
        }
        Ok(Span { sent_index, start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.sent_index == other.sent_index && self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.sent_index == other.sent_index && self.start <= other.start && other.end <= self.end
    }

    /// Document order: sentence, then start, then end.
    pub fn doc_order(&self, other: &Span) -> Ordering {
        (self.sent_index, self.start, self.end).cmp(&(other.sent_index, other.start, other.end))
    }
}

impl TryFrom<[usize; 3]> for Span {
    type Error = ModelError;

    fn try_from(v: [usize; 3]) -> Result<Self, Self::Error> {
        Span::new(v[0], v[1], v[2])
    }
}

impl From<Span> for [usize; 3] {
    fn from(s: Span) -> Self {
        [s.sent_index, s.start, s.end]
    }
}

fn any_overlap(a: &[Span], b: &[Span]) -> bool {
    a.iter().any(|x| b.iter().any(|y| x.overlaps(y)))
}

/// A phrase of a parse tree, addressed by span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constituent {
    pub span: Span,
    pub label: String,
    pub node_id: usize,
    pub text: String,
}

impl Constituent {
    /// The label without function tags or indices (`NP-SBJ-1` -> `NP`).
    pub fn base_label(&self) -> &str {
        base_label(&self.label)
    }
}

pub fn base_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    label.split(['-', '=']).next().unwrap_or(label)
}

/// The closed relation set, in the order used by dataset statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RelationLabel {
    Who,
    What,
    WhatHappens,
    WhatHappened,
    WhatWillHappen,
    Where,
    When,
    Why,
}

impl RelationLabel {
    pub const ALL: [RelationLabel; 8] = [
        RelationLabel::Who,
        RelationLabel::What,
        RelationLabel::WhatHappens,
        RelationLabel::WhatHappened,
        RelationLabel::WhatWillHappen,
        RelationLabel::Where,
        RelationLabel::When,
        RelationLabel::Why,
    ];

    /// Canonical record spelling, e.g. `what_happened`.
    pub fn as_str(&self) -> &'static str {
        match self {
            RelationLabel::Who => "who",
            RelationLabel::What => "what",
            RelationLabel::WhatHappens => "what_happens",
            RelationLabel::WhatHappened => "what_happened",
            RelationLabel::WhatWillHappen => "what_will_happen",
            RelationLabel::Where => "where",
            RelationLabel::When => "when",
            RelationLabel::Why => "why",
        }
    }

    /// Human-readable form used on graph edges, e.g. `what happened`.
    pub fn display_name(&self) -> &'static str {
        match self {
            RelationLabel::WhatHappens => "what happens",
            RelationLabel::WhatHappened => "what happened",
            RelationLabel::WhatWillHappen => "what will happen",
            other => other.as_str(),
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationLabel {
    type Err = ModelError;

    /// Accepts the canonical lowercase name, its uppercase form
    /// (`WHAT_HAPPENED`) and the spaced display form (`what happened`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationLabel::ALL
            .into_iter()
            .find(|r| s == r.as_str() || s == r.display_name() || s == r.as_str().to_ascii_uppercase())
            .ok_or_else(|| ModelError::UnknownRelation(s.to_string()))
    }
}

impl TryFrom<String> for RelationLabel {
    type Error = ModelError;

    /// Record files accept only the canonical spelling.
    fn try_from(s: String) -> Result<Self, Self::Error> {
        RelationLabel::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or(ModelError::UnknownRelation(s))
    }
}

impl From<RelationLabel> for String {
    fn from(r: RelationLabel) -> Self {
        r.as_str().to_string()
    }
}

/// `(source, relation, target)`. Texts are authoritative for scoring; spans
/// record provenance and may be empty for typed-in data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TripleRecord", into = "TripleRecord")]
pub struct SummaryTriple {
    source_text: String,
    relation: RelationLabel,
    target_text: String,
    source_spans: Vec<Span>,
    target_spans: Vec<Span>,
}

/// Normalized identity of a triple; two triples are "the same triple" iff
/// their keys are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripleKey {
    pub source: String,
    pub relation: RelationLabel,
    pub target: String,
}

impl SummaryTriple {
    pub fn new(
        source_text: impl Into<String>,
        relation: RelationLabel,
        target_text: impl Into<String>,
        source_spans: Vec<Span>,
        target_spans: Vec<Span>,
    ) -> Result<Self, ModelError> {
        let source_text = source_text.into();
        let target_text = target_text.into();
        if normalize_phrase(&source_text).is_empty() {
            return Err(ModelError::EmptyPhrase("source"));
        }
        if normalize_phrase(&target_text).is_empty() {
            return Err(ModelError::EmptyPhrase("target"));
        }
        if any_overlap(&source_spans, &target_spans) {
            return Err(ModelError::OverlappingSpans);
        }
        Ok(SummaryTriple {
            source_text,
            relation,
            target_text,
            source_spans,
            target_spans,
        })
    }

    /// A triple without provenance spans.
    pub fn from_text(
        source_text: impl Into<String>,
        relation: RelationLabel,
        target_text: impl Into<String>,
    ) -> Result<Self, ModelError> {
        Self::new(source_text, relation, target_text, Vec::new(), Vec::new())
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    pub fn relation(&self) -> RelationLabel {
        self.relation
    }

    pub fn target_text(&self) -> &str {
        &self.target_text
    }

    pub fn source_spans(&self) -> &[Span] {
        &self.source_spans
    }

    pub fn target_spans(&self) -> &[Span] {
        &self.target_spans
    }

    pub fn has_spans(&self) -> bool {
        !self.source_spans.is_empty() && !self.target_spans.is_empty()
    }

    pub fn key(&self) -> TripleKey {
        TripleKey {
            source: normalize_phrase(&self.source_text),
            relation: self.relation,
            target: normalize_phrase(&self.target_text),
        }
    }

    /// Source and target exchanged, relation kept.
    pub fn swapped(&self) -> SummaryTriple {
        SummaryTriple {
            source_text: self.target_text.clone(),
            relation: self.relation,
            target_text: self.source_text.clone(),
            source_spans: self.target_spans.clone(),
            target_spans: self.source_spans.clone(),
        }
    }

    pub fn with_source(
        &self,
        source_text: impl Into<String>,
        source_spans: Vec<Span>,
    ) -> Result<SummaryTriple, ModelError> {
        SummaryTriple::new(
            source_text,
            self.relation,
            self.target_text.clone(),
            source_spans,
            self.target_spans.clone(),
        )
    }

    pub fn spans(&self) -> impl Iterator<Item = &Span> {
        self.source_spans.iter().chain(self.target_spans.iter())
    }
}

/// Wire form of a triple, shared by every line-record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleRecord {
    pub source: String,
    pub relation: RelationLabel,
    pub target: String,
    #[serde(default)]
    pub source_spans: Vec<Span>,
    #[serde(default)]
    pub target_spans: Vec<Span>,
}

impl TryFrom<TripleRecord> for SummaryTriple {
    type Error = ModelError;

    fn try_from(r: TripleRecord) -> Result<Self, Self::Error> {
        SummaryTriple::new(r.source, r.relation, r.target, r.source_spans, r.target_spans)
    }
}

impl From<SummaryTriple> for TripleRecord {
    fn from(t: SummaryTriple) -> Self {
        TripleRecord {
            source: t.source_text,
            relation: t.relation,
            target: t.target_text,
            source_spans: t.source_spans,
            target_spans: t.target_spans,
        }
    }
}

/// Mentions of one entity in document order; the first is the representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Span>", into = "Vec<Span>")]
pub struct CorefCluster {
    mentions: Vec<Span>,
}

impl CorefCluster {
    pub fn new(mut mentions: Vec<Span>) -> Result<Self, ModelError> {
        if mentions.is_empty() {
            return Err(ModelError::EmptyCluster);
        }
        mentions.sort_by(|a, b| a.doc_order(b));
        mentions.dedup();
        Ok(CorefCluster { mentions })
    }

    pub fn mentions(&self) -> &[Span] {
        &self.mentions
    }

    pub fn representative(&self) -> Span {
        self.mentions[0]
    }
}

impl TryFrom<Vec<Span>> for CorefCluster {
    type Error = ModelError;

    fn try_from(v: Vec<Span>) -> Result<Self, Self::Error> {
        CorefCluster::new(v)
    }
}

impl From<CorefCluster> for Vec<Span> {
    fn from(c: CorefCluster) -> Self {
        c.mentions
    }
}

/// A title plus highlight sentences with one parse per sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractDoc {
    doc_id: String,
    sentences: Vec<Vec<String>>,
    trees: Vec<ParseTree>,
    coref: Vec<CorefCluster>,
}

impl AbstractDoc {
    /// Checks that trees and sentences line up token for token and that
    /// every coreference mention is in bounds.
    pub fn new(
        doc_id: impl Into<String>,
        sentences: Vec<Vec<String>>,
        trees: Vec<ParseTree>,
        coref: Vec<CorefCluster>,
    ) -> Result<Self, ModelError> {
        let doc_id = doc_id.into();
        let invalid = |message: String| ModelError::InvalidDocument {
            doc_id: doc_id.clone(),
            message,
        };
        if sentences.len() != trees.len() {
            return Err(invalid(format!(
                "{} sentences but {} parses",
                sentences.len(),
                trees.len()
            )));
        }
        for (i, (sent, tree)) in sentences.iter().zip(&trees).enumerate() {
            if sent.iter().any(|t| t.is_empty()) {
                return Err(invalid(format!("sentence {i} has an empty token")));
            }
            let leaves = tree.leaves();
            if leaves.len() != sent.len() {
                return Err(invalid(format!(
                    "sentence {i} has {} tokens but its parse has {} leaves",
                    sent.len(),
                    leaves.len()
                )));
            }
            if let Some(j) = leaves.iter().zip(sent).position(|(l, t)| l != t) {
                return Err(invalid(format!(
                    "sentence {i} token {j} is {:?} but the parse has {:?}",
                    sent[j], leaves[j]
                )));
            }
        }
        for cluster in &coref {
            for m in cluster.mentions() {
                let len = sentences.get(m.sent_index).map(Vec::len);
                if len.is_none_or(|len| m.end > len) {
                    return Err(invalid(format!(
                        "coreference mention {:?} out of bounds",
                        <[usize; 3]>::from(*m)
                    )));
                }
            }
        }
        Ok(AbstractDoc {
            doc_id,
            sentences,
            trees,
            coref,
        })
    }

    /// Builds a document from parses alone, taking tokens from the leaves.
    pub fn from_trees(
        doc_id: impl Into<String>,
        trees: Vec<ParseTree>,
        coref: Vec<CorefCluster>,
    ) -> Result<Self, ModelError> {
        let sentences = trees
            .iter()
            .map(|t| t.leaves().into_iter().map(str::to_string).collect())
            .collect();
        Self::new(doc_id, sentences, trees, coref)
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    pub fn trees(&self) -> &[ParseTree] {
        &self.trees
    }

    pub fn coref(&self) -> &[CorefCluster] {
        &self.coref
    }

    pub fn tokens(&self) -> impl Iterator<Item = Token> + '_ {
        self.sentences.iter().enumerate().flat_map(|(s, toks)| {
            toks.iter().enumerate().map(move |(i, t)| Token {
                text: t.clone(),
                sent_index: s,
                tok_index: i,
            })
        })
    }

    pub fn span_in_bounds(&self, span: &Span) -> bool {
        self.sentences
            .get(span.sent_index)
            .is_some_and(|s| span.start < span.end && span.end <= s.len())
    }

    /// Space-joined tokens of `span`; `None` when out of bounds.
    pub fn span_text(&self, span: &Span) -> Option<String> {
        if !self.span_in_bounds(span) {
            return None;
        }
        Some(self.sentences[span.sent_index][span.start..span.end].join(" "))
    }

    /// Space-joined text of several spans, in the given order.
    pub fn spans_text(&self, spans: &[Span]) -> Option<String> {
        let parts: Option<Vec<String>> = spans.iter().map(|s| self.span_text(s)).collect();
        parts.map(|p| p.join(" "))
    }

    /// Constituents of every sentence, sentence by sentence in preorder.
    pub fn constituents(&self) -> Vec<Vec<Constituent>> {
        self.trees
            .iter()
            .enumerate()
            .map(|(i, t)| extract_constituents(t, i))
            .collect()
    }
}

/// One annotator's triples for one document plus quality-control flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSet {
    doc_id: String,
    annotator_id: String,
    triples: Vec<SummaryTriple>,
    flags: QcFlags,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QcFlags {
    #[serde(default)]
    pub flag_issue: bool,
    #[serde(default)]
    pub flag_title_redundant: bool,
    #[serde(default)]
    pub flag_uncertain: bool,
}

impl AnnotationSet {
    pub fn new(
        doc_id: impl Into<String>,
        annotator_id: impl Into<String>,
        triples: Vec<SummaryTriple>,
        flags: QcFlags,
    ) -> Result<Self, ModelError> {
        if flags.flag_title_redundant {
            if let Some(index) = triples.iter().position(|t| t.spans().any(|s| s.sent_index == 0)) {
                return Err(ModelError::TitleSpanWhileRedundant { index });
            }
        }
        Ok(AnnotationSet {
            doc_id: doc_id.into(),
            annotator_id: annotator_id.into(),
            triples,
            flags,
        })
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn annotator_id(&self) -> &str {
        &self.annotator_id
    }

    pub fn triples(&self) -> &[SummaryTriple] {
        &self.triples
    }

    pub fn flags(&self) -> QcFlags {
        self.flags
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_bracketed;
    use proptest::prelude::*;

    #[test]
    fn relation_parsing_is_closed() {
        for r in RelationLabel::ALL {
            assert_eq!(r.as_str().parse::<RelationLabel>().unwrap(), r);
            assert_eq!(r.display_name().parse::<RelationLabel>().unwrap(), r);
        }
        assert_eq!(
            "WHAT_WILL_HAPPEN".parse::<RelationLabel>().unwrap(),
            RelationLabel::WhatWillHappen
        );
        assert!("how".parse::<RelationLabel>().is_err());
        assert!("What".parse::<RelationLabel>().is_err());
        assert!("".parse::<RelationLabel>().is_err());
    }

    #[test]
    fn relation_serde_uses_canonical_names() {
        let json = serde_json::to_string(&RelationLabel::WhatHappened).unwrap();
        assert_eq!(json, "\"what_happened\"");
        assert!(serde_json::from_str::<RelationLabel>("\"whom\"").is_err());
        assert!(serde_json::from_str::<RelationLabel>("\"what happened\"").is_err());
        assert!(serde_json::from_str::<RelationLabel>("\"WHO\"").is_err());
    }

    #[test]
    fn triple_invariants() {
        assert!(matches!(
            SummaryTriple::from_text(" , ", RelationLabel::What, "x"),
            Err(ModelError::EmptyPhrase("source"))
        ));
        let s = Span::new(1, 0, 3).unwrap();
        let t = Span::new(1, 2, 4).unwrap();
        assert!(matches!(
            SummaryTriple::new("a b c", RelationLabel::What, "c d", vec![s], vec![t]),
            Err(ModelError::OverlappingSpans)
        ));
        let t = Span::new(1, 3, 4).unwrap();
        assert!(SummaryTriple::new("a b c", RelationLabel::What, "d", vec![s], vec![t]).is_ok());
    }

    #[test]
    fn triple_key_normalizes() {
        let a = SummaryTriple::from_text("In  Dordrecht ,", RelationLabel::Where, "The Ark").unwrap();
        let b = SummaryTriple::from_text("in dordrecht", RelationLabel::Where, "the ark .").unwrap();
        assert_eq!(a.key(), b.key());
    }

    #[test]
    fn span_rejects_empty() {
        assert!(Span::new(0, 2, 2).is_err());
        assert!(serde_json::from_str::<Span>("[0,3,1]").is_err());
        assert_eq!(
            serde_json::from_str::<Span>("[0,1,3]").unwrap(),
            Span::new(0, 1, 3).unwrap()
        );
    }

    #[test]
    fn cluster_sorts_mentions() {
        let c = CorefCluster::new(vec![Span::new(2, 0, 1).unwrap(), Span::new(0, 0, 1).unwrap()]).unwrap();
        assert_eq!(c.representative(), Span::new(0, 0, 1).unwrap());
        assert!(CorefCluster::new(vec![]).is_err());
    }

    #[test]
    fn document_checks_alignment() {
        let tree = parse_bracketed("(S (NP (NNP Laura)) (VP (VBD won)))").unwrap();
        let ok = AbstractDoc::new(
            "d",
            vec![vec!["Laura".into(), "won".into()]],
            vec![tree.clone()],
            vec![],
        );
        assert!(ok.is_ok());
        let bad = AbstractDoc::new("d", vec![vec!["Laura".into()]], vec![tree.clone()], vec![]);
        assert!(bad.is_err());
        let bad = AbstractDoc::new("d", vec![], vec![tree.clone()], vec![]);
        assert!(bad.is_err());
        let cluster = CorefCluster::new(vec![Span::new(0, 1, 3).unwrap()]).unwrap();
        let bad = AbstractDoc::from_trees("d", vec![tree], vec![cluster]);
        assert!(bad.is_err());
    }

    #[test]
    fn base_labels() {
        assert_eq!(base_label("NP-SBJ-1"), "NP");
        assert_eq!(base_label("NP=2"), "NP");
        assert_eq!(base_label("-LRB-"), "-LRB-");
        assert_eq!(base_label("PRP$"), "PRP$");
    }

    fn arb_span() -> impl Strategy<Value = Span> {
        (0usize..4, 0usize..6, 1usize..4).prop_map(|(s, a, w)| Span::new(s, a, a + w).unwrap())
    }

    proptest! {
        #[test]
        fn title_redundant_rejects_sentence_zero(
            spans in prop::collection::vec((arb_span(), arb_span()), 0..5),
            redundant in any::<bool>(),
        ) {
            let triples: Vec<SummaryTriple> = spans
                .iter()
                .filter_map(|(a, b)| {
                    SummaryTriple::new("x", RelationLabel::What, "y", vec![*a], vec![*b]).ok()
                })
                .collect();
            let uses_title = triples.iter().any(|t| t.spans().any(|s| s.sent_index == 0));
            let flags = QcFlags { flag_title_redundant: redundant, ..QcFlags::default() };
            let result = AnnotationSet::new("d", "a", triples, flags);
            prop_assert_eq!(result.is_err(), redundant && uses_title);
        }
    }
}
