//! Final filtering of labeled triples: edge orientation, overlap
//! deduplication and coreference merging, plus the full extraction pipeline.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cues::{starts_with_causal_marker, TemporalLexicon, LOCATIVE_PREPOSITIONS};
use crate::index::DocIndex;
use crate::labeler::{Labeler, LabelerConfig};
use crate::model::{AbstractDoc, CorefCluster, RelationLabel, Span, SummaryTriple};
use crate::text::{normalize_phrase, phrase_tokens};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot orient ({source_text:?}, {relation}, {target_text:?}): neither side carries the relation's cue")]
pub struct OrientationUndecidable {
    pub source_text: String,
    pub relation: RelationLabel,
    pub target_text: String,
    /// The input triple, unchanged.
    pub triple: Box<SummaryTriple>,
}

/// How to decide which side of a triple is the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationRule {
    /// The side with a temporal cue is the target.
    TemporalTarget,
    /// The locative prepositional phrase is the target.
    LocationTarget,
    /// The phrase opening with a causal marker is the target.
    CauseTarget,
    /// The noun-phrase anchor is the source; between two noun phrases the
    /// earlier one is.
    AnchorSource,
    /// Leave as labeled.
    Keep,
}

impl OrientationRule {
    pub fn default_for(relation: RelationLabel) -> Self {
        match relation {
            RelationLabel::When => OrientationRule::TemporalTarget,
            RelationLabel::Where => OrientationRule::LocationTarget,
            RelationLabel::Why => OrientationRule::CauseTarget,
            _ => OrientationRule::AnchorSource,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Orienter {
    lexicon: TemporalLexicon,
    overrides: BTreeMap<RelationLabel, OrientationRule>,
}

struct SideView<'a> {
    tokens: Vec<&'a str>,
    tags: Option<&'a [String]>,
}

impl Orienter {
    pub fn new(lexicon: TemporalLexicon, overrides: BTreeMap<RelationLabel, OrientationRule>) -> Self {
        Orienter { lexicon, overrides }
    }

    pub fn rule(&self, relation: RelationLabel) -> OrientationRule {
        self.overrides
            .get(&relation)
            .copied()
            .unwrap_or_else(|| OrientationRule::default_for(relation))
    }

    fn view<'a>(&self, text: &'a str, spans: &[Span], index: Option<&'a DocIndex>) -> SideView<'a> {
        let tags = match (index, spans) {
            (Some(idx), [span]) => Some(idx.tags(span)).filter(|t| t.len() == span.len()),
            _ => None,
        };
        SideView {
            tokens: text.split_whitespace().collect(),
            tags,
        }
    }

    fn has_cue(&self, rule: OrientationRule, side: &SideView<'_>) -> bool {
        let lower: Vec<String> = side.tokens.iter().map(|t| t.to_lowercase()).collect();
        let temporal = match side.tags {
            Some(tags) if tags.len() == side.tokens.len() => side
                .tokens
                .iter()
                .zip(tags)
                .any(|(tok, tag)| self.lexicon.is_tagged_cue(tok, tag)),
            _ => self.lexicon.any_cue(side.tokens.iter().copied()),
        };
        match rule {
            OrientationRule::TemporalTarget => temporal,
            OrientationRule::LocationTarget => {
                lower
                    .first()
                    .is_some_and(|p| LOCATIVE_PREPOSITIONS.contains(&p.as_str()))
                    && side.tokens[1..]
                        .iter()
                        .any(|t| t.chars().next().is_some_and(char::is_uppercase))
                    && !temporal
            }
            OrientationRule::CauseTarget => starts_with_causal_marker(&lower),
            OrientationRule::AnchorSource | OrientationRule::Keep => false,
        }
    }

    /// Puts the cue-bearing phrase on the target side, swapping when needed.
    /// Anchor-rule relations consult constituent labels through `index`.
    pub fn orient(
        &self,
        triple: &SummaryTriple,
        index: Option<&DocIndex>,
    ) -> Result<SummaryTriple, OrientationUndecidable> {
        let rule = self.rule(triple.relation());
        match rule {
            OrientationRule::Keep => Ok(triple.clone()),
            OrientationRule::AnchorSource => Ok(self.orient_anchor(triple, index)),
            _ => {
                let source = self.view(triple.source_text(), triple.source_spans(), index);
                let target = self.view(triple.target_text(), triple.target_spans(), index);
                if self.has_cue(rule, &target) {
                    Ok(triple.clone())
                } else if self.has_cue(rule, &source) {
                    Ok(triple.swapped())
                } else {
                    Err(OrientationUndecidable {
                        source_text: triple.source_text().to_string(),
                        relation: triple.relation(),
                        target_text: triple.target_text().to_string(),
                        triple: Box::new(triple.clone()),
                    })
                }
            }
        }
    }

    fn orient_anchor(&self, triple: &SummaryTriple, index: Option<&DocIndex>) -> SummaryTriple {
        let (Some(index), [source], [target]) = (index, triple.source_spans(), triple.target_spans()) else {
            return triple.clone();
        };
        let source_label = index.label_of(source);
        let target_label = index.label_of(target);
        let is_np = |l: Option<&str>| l == Some("NP");
        let swap = match (is_np(source_label), is_np(target_label)) {
            (false, true) => source_label.is_some(),
            (true, true) => target.doc_order(source) == Ordering::Less,
            _ => false,
        };
        if swap {
            triple.swapped()
        } else {
            triple.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum SideKey {
    Spans(Vec<Span>),
    Text(String),
}

fn side_key(spans: &[Span], text: &str) -> SideKey {
    if spans.is_empty() {
        SideKey::Text(normalize_phrase(text))
    } else {
        let mut s = spans.to_vec();
        s.sort();
        SideKey::Spans(s)
    }
}

/// Span overlap when both sides carry spans, otherwise one phrase's tokens
/// appearing contiguously in the other's.
fn sides_overlap(a_spans: &[Span], a_text: &str, b_spans: &[Span], b_text: &str) -> bool {
    if !a_spans.is_empty() && !b_spans.is_empty() {
        return a_spans.iter().any(|x| b_spans.iter().any(|y| x.overlaps(y)));
    }
    let words = |text: &str| -> Vec<String> {
        phrase_tokens(text)
            .iter()
            .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_string())
            .filter(|t| !t.is_empty())
            .collect()
    };
    let (a, b) = (words(a_text), words(b_text));
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    !short.is_empty() && long.windows(short.len()).any(|w| w == short.as_slice())
}

#[derive(Clone, Copy)]
enum Side {
    Source,
    Target,
}

fn side_of(t: &SummaryTriple, side: Side) -> (&[Span], &str) {
    match side {
        Side::Source => (t.source_spans(), t.source_text()),
        Side::Target => (t.target_spans(), t.target_text()),
    }
}

/// Longer normalized text first, then earlier span, then lexicographic.
fn preference(a: &SummaryTriple, b: &SummaryTriple, side: Side) -> Ordering {
    let (a_spans, a_text) = side_of(a, side);
    let (b_spans, b_text) = side_of(b, side);
    let (na, nb) = (normalize_phrase(a_text), normalize_phrase(b_text));
    let by_span = match (a_spans.iter().min(), b_spans.iter().min()) {
        (Some(x), Some(y)) => x.doc_order(y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    nb.chars()
        .count()
        .cmp(&na.chars().count())
        .then(by_span)
        .then(na.cmp(&nb))
}

/// Within groups sharing `fixed` side and relation, keeps the most preferred
/// triple among any that overlap on the `varying` side.
fn dedupe_pass(triples: Vec<SummaryTriple>, fixed: Side, varying: Side) -> Vec<SummaryTriple> {
    let mut groups: BTreeMap<(SideKey, RelationLabel), Vec<usize>> = BTreeMap::new();
    for (i, t) in triples.iter().enumerate() {
        let (spans, text) = side_of(t, fixed);
        groups.entry((side_key(spans, text), t.relation())).or_default().push(i);
    }
    let mut keep = vec![false; triples.len()];
    for members in groups.into_values() {
        let mut ranked = members;
        ranked.sort_by(|&x, &y| preference(&triples[x], &triples[y], varying).then(x.cmp(&y)));
        let mut kept: Vec<usize> = Vec::new();
        for i in ranked {
            let (spans, text) = side_of(&triples[i], varying);
            let clashes = kept.iter().any(|&k| {
                let (k_spans, k_text) = side_of(&triples[k], varying);
                sides_overlap(spans, text, k_spans, k_text)
            });
            if !clashes {
                kept.push(i);
                keep[i] = true;
            }
        }
    }
    triples
        .into_iter()
        .zip(keep)
        .filter_map(|(t, k)| k.then_some(t))
        .collect()
}

/// Among triples with the same source and relation whose targets overlap,
/// keeps only the one with the longest target; then the same with roles
/// reversed. Survivors stay in input order.
pub fn dedupe_overlaps(triples: Vec<SummaryTriple>) -> Vec<SummaryTriple> {
    let by_target = dedupe_pass(triples, Side::Source, Side::Target);
    dedupe_pass(by_target, Side::Target, Side::Source)
}

/// Rewrites coreferent sources to the first mention of their entity.
///
/// A source matches a mention when its spans equal it, or, unless `strict`,
/// lie inside it. Exact matches win over containment. Rewrites that would
/// make the source overlap the target are skipped, and triples made
/// identical by rewriting are collapsed.
pub fn merge_coref(
    triples: Vec<SummaryTriple>,
    clusters: &[CorefCluster],
    doc: &AbstractDoc,
    strict: bool,
) -> Vec<SummaryTriple> {
    if clusters.is_empty() {
        return triples;
    }
    let mut out: Vec<SummaryTriple> = Vec::with_capacity(triples.len());
    for t in triples {
        let rewritten = resolve(&t, clusters, strict)
            .and_then(|rep| {
                let text = doc.span_text(&rep)?;
                t.with_source(text, vec![rep]).ok()
            })
            .unwrap_or(t);
        if !out.contains(&rewritten) {
            out.push(rewritten);
        }
    }
    out
}

fn resolve(t: &SummaryTriple, clusters: &[CorefCluster], strict: bool) -> Option<Span> {
    let spans = t.source_spans();
    if spans.is_empty() {
        return None;
    }
    if let [only] = spans {
        if clusters.iter().any(|c| c.representative() == *only) {
            return None;
        }
        if let Some(c) = clusters.iter().find(|c| c.mentions().contains(only)) {
            return Some(c.representative());
        }
    }
    if strict {
        return None;
    }
    clusters
        .iter()
        .filter_map(|c| {
            c.mentions()
                .iter()
                .filter(|m| spans.iter().all(|s| m.contains(s)))
                .min_by_key(|m| m.len())
                .map(|m| (m.len(), c.representative()))
        })
        .min_by_key(|(len, _)| *len)
        .map(|(_, rep)| rep)
}

/// Output of one document's extraction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub triples: Vec<SummaryTriple>,
    pub warnings: Vec<String>,
}

/// Candidates, labeling, then orient, dedupe and coreference merge.
#[derive(Debug, Clone, Default)]
pub struct Pipeline {
    pub labeler: Labeler,
    pub orienter: Orienter,
    pub strict_coref: bool,
}

impl Pipeline {
    pub fn new(labeler: Labeler, orienter: Orienter, strict_coref: bool) -> Self {
        Pipeline {
            labeler,
            orienter,
            strict_coref,
        }
    }

    pub fn extract(&self, doc: &AbstractDoc) -> Extraction {
        let labeled = self.labeler.label_candidates(doc);
        self.filter(labeled, doc)
    }

    /// The filtering tail on its own: orient, dedupe, merge, then dedupe the
    /// merged sources.
    pub fn filter(&self, triples: Vec<SummaryTriple>, doc: &AbstractDoc) -> Extraction {
        let index = DocIndex::new(doc);
        let mut warnings = Vec::new();
        let oriented: Vec<SummaryTriple> = triples
            .iter()
            .map(|t| match self.orienter.orient(t, Some(&index)) {
                Ok(o) => o,
                Err(e) => {
                    warnings.push(format!("{}: {e}", doc.doc_id()));
                    *e.triple
                }
            })
            .collect();
        let deduped = dedupe_overlaps(oriented);
        let merged = merge_coref(deduped, doc.coref(), doc, self.strict_coref);
        // Merging can give two triples the same source with overlapping targets.
        let triples = dedupe_overlaps(merged);
        Extraction { triples, warnings }
    }
}

/// Runs the default pipeline with the given aggregation settings.
pub fn extract_summary_triples(doc: &AbstractDoc, cfg: &LabelerConfig) -> Vec<SummaryTriple> {
    let labeler = Labeler::new(Default::default(), TemporalLexicon::default(), cfg.clone());
    Pipeline::new(labeler, Orienter::default(), false).extract(doc).triples
}
