//! Relation labeling: a registry of labeling functions that vote on each
//! candidate pair, and a weighted-plurality aggregator over their votes.
//!
//! Labeling functions see pairs in canonical (span) orientation. The ones
//! keyed on a cue phrase (time, place, cause) accept the cue on either side;
//! edge direction is fixed afterwards by [`crate::filter::Orienter`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::{generate_candidates, CandidatePair};
use crate::cues::{starts_with_causal_marker, TemporalLexicon, LOCATIVE_PREPOSITIONS, TEMPORAL_PREPOSITIONS};
use crate::index::{DocIndex, NodeInfo};
use crate::model::{base_label, AbstractDoc, AnnotationSet, Constituent, RelationLabel, SummaryTriple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("weight for {0} must be finite and non-negative")]
    BadWeight(String),
    #[error("min_votes must be at least 1")]
    BadMinVotes,
    #[error("tie_break_order must list each of the eight relations exactly once")]
    BadTieBreakOrder,
}

/// Outcome of one labeling function on one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Abstain,
    #[serde(untagged)]
    Label(RelationLabel),
}

impl Verdict {
    pub fn label(&self) -> Option<RelationLabel> {
        match self {
            Verdict::Abstain => None,
            Verdict::Label(r) => Some(*r),
        }
    }
}

impl From<Option<RelationLabel>> for Verdict {
    fn from(r: Option<RelationLabel>) -> Self {
        r.map_or(Verdict::Abstain, Verdict::Label)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Abstain => f.write_str("abstain"),
            Verdict::Label(r) => r.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVote {
    pub lf_name: String,
    pub verdict: Verdict,
}

/// Aggregation settings. Weights missing from `lf_weights` count as 1.0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelerConfig {
    pub lf_weights: BTreeMap<String, f64>,
    pub min_votes: usize,
    pub tie_break_order: Vec<RelationLabel>,
}

impl Default for LabelerConfig {
    fn default() -> Self {
        LabelerConfig {
            lf_weights: BTreeMap::new(),
            min_votes: 1,
            tie_break_order: RelationLabel::ALL.to_vec(),
        }
    }
}

impl LabelerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some((name, _)) = self.lf_weights.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(ConfigError::BadWeight(name.clone()));
        }
        if self.min_votes < 1 {
            return Err(ConfigError::BadMinVotes);
        }
        let mut order = self.tie_break_order.clone();
        order.sort();
        order.dedup();
        if order.len() != 8 || self.tie_break_order.len() != 8 {
            return Err(ConfigError::BadTieBreakOrder);
        }
        Ok(())
    }

    pub fn weight(&self, lf_name: &str) -> f64 {
        self.lf_weights.get(lf_name).copied().unwrap_or(1.0)
    }
}

/// Weighted plurality over non-abstaining votes. Abstains when fewer than
/// `min_votes` functions voted; ties go to the label listed first in
/// `tie_break_order`.
pub fn aggregate_votes(votes: &[LabelVote], cfg: &LabelerConfig) -> Verdict {
    let mut totals = [0.0f64; 8];
    let mut voted = [false; 8];
    let mut count = 0;
    for vote in votes {
        if let Verdict::Label(r) = vote.verdict {
            totals[r.index()] += cfg.weight(&vote.lf_name);
            voted[r.index()] = true;
            count += 1;
        }
    }
    if count == 0 || count < cfg.min_votes {
        return Verdict::Abstain;
    }
    let mut best: Option<RelationLabel> = None;
    for &r in &cfg.tie_break_order {
        if !voted[r.index()] {
            continue;
        }
        match best {
            Some(b) if totals[r.index()] <= totals[b.index()] => {}
            _ => best = Some(r),
        }
    }
    best.into()
}

/// What a labeling function sees: the pair plus the document structure.
pub struct PairContext<'a> {
    pub pair: &'a CandidatePair,
    pub index: &'a DocIndex,
    pub lexicon: &'a TemporalLexicon,
}

impl<'a> PairContext<'a> {
    pub fn a(&self) -> Side<'a> {
        self.side(&self.pair.a)
    }

    pub fn b(&self) -> Side<'a> {
        self.side(&self.pair.b)
    }

    fn side(&self, c: &'a Constituent) -> Side<'a> {
        Side {
            constituent: c,
            index: self.index,
            lexicon: self.lexicon,
        }
    }
}

/// One constituent of a pair with structural helpers.
#[derive(Clone, Copy)]
pub struct Side<'a> {
    pub constituent: &'a Constituent,
    index: &'a DocIndex,
    lexicon: &'a TemporalLexicon,
}

const COPULAS: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "'s", "'re", "'m", "become", "becomes", "became",
    "remain", "remains", "remained", "seem", "seems", "seemed",
];
const RELATIVE_PRONOUNS: &[&str] = &["who", "which", "that"];
const FUTURE_MODALS: &[&str] = &["will", "shall", "'ll"];

impl<'a> Side<'a> {
    pub fn label(&self) -> &'a str {
        base_label(&self.constituent.label)
    }

    pub fn is(&self, label: &str) -> bool {
        self.label() == label
    }

    pub fn tokens(&self) -> &'a [String] {
        self.index.tokens(&self.constituent.span)
    }

    pub fn tags(&self) -> &'a [String] {
        self.index.tags(&self.constituent.span)
    }

    pub fn lower_tokens(&self) -> Vec<String> {
        self.tokens().iter().map(|t| t.to_lowercase()).collect()
    }

    fn node(&self) -> Option<&'a NodeInfo> {
        self.index.node(self.constituent)
    }

    fn parent(&self) -> Option<&'a NodeInfo> {
        self.index.parent(self.constituent)
    }

    /// The opening preposition when the phrase starts with an `IN`/`TO` word.
    pub fn head_preposition(&self) -> Option<String> {
        let tag = self.tags().first()?;
        (tag == "IN" || tag == "TO").then(|| self.tokens()[0].to_lowercase())
    }

    pub fn has_temporal_cue(&self) -> bool {
        self.tokens()
            .iter()
            .zip(self.tags())
            .any(|(tok, tag)| self.lexicon.is_tagged_cue(tok, tag))
    }

    pub fn has_capitalized_proper_noun(&self) -> bool {
        self.tokens()
            .iter()
            .zip(self.tags())
            .any(|(tok, tag)| (tag == "NNP" || tag == "NNPS") && tok.chars().next().is_some_and(char::is_uppercase))
    }

    pub fn has_verb(&self) -> bool {
        self.tags().iter().any(|t| t.starts_with("VB"))
    }

    /// `(token, tag)` for verbs and modals, left to right.
    pub fn verbs(&self) -> Vec<(&'a str, &'a str)> {
        self.tokens()
            .iter()
            .zip(self.tags())
            .filter(|(_, tag)| tag.starts_with("VB") || *tag == "MD")
            .map(|(tok, tag)| (tok.as_str(), tag.as_str()))
            .collect()
    }

    /// The last noun or personal pronoun, taken as the phrase head.
    pub fn head_tag(&self) -> Option<&'a str> {
        self.tags()
            .iter()
            .rev()
            .find(|t| t.starts_with("NN") || *t == "PRP")
            .map(String::as_str)
    }

    /// Whether this is a coordination of like phrases (`X CC X`).
    pub fn is_coordination(&self) -> bool {
        let Some(node) = self.node() else { return false };
        let sentence = &self.index.sentences[self.constituent.span.sent_index];
        let labels: Vec<&str> = node
            .children
            .iter()
            .map(|&c| base_label(&sentence.nodes[c].constituent.label))
            .collect();
        labels.contains(&"CC") && labels.iter().filter(|l| **l == self.label()).count() >= 2
    }

    /// Same sentence and this node's parent covers `other`: the usual shape
    /// of a subject and its predicate, or a noun and its modifier.
    pub fn governs(&self, other: &Side<'_>) -> bool {
        let (me, them) = (self.constituent.span, other.constituent.span);
        me.sent_index == them.sent_index && self.parent().is_some_and(|p| p.constituent.span.contains(&them))
    }

    pub fn is_sibling_of(&self, other: &Side<'_>) -> bool {
        let (Some(x), Some(y)) = (self.node(), other.node()) else {
            return false;
        };
        self.constituent.span.sent_index == other.constituent.span.sent_index
            && x.parent.is_some()
            && x.parent == y.parent
    }

    fn parent_is_coordination(&self) -> bool {
        let Some(parent) = self.parent() else { return false };
        let sentence = &self.index.sentences[self.constituent.span.sent_index];
        parent
            .children
            .iter()
            .any(|&c| base_label(&sentence.nodes[c].constituent.label) == "CC")
    }

    /// Directly follows `other`, possibly after a single comma.
    pub fn follows(&self, other: &Side<'_>) -> bool {
        let (me, them) = (self.constituent.span, other.constituent.span);
        if me.sent_index != them.sent_index {
            return false;
        }
        me.start == them.end
            || (me.start == them.end + 1 && self.index.sentences[me.sent_index].tokens[them.end] == ",")
    }

    fn parent_first_verb_is_copula(&self) -> bool {
        let Some(parent) = self.parent() else { return false };
        if base_label(&parent.constituent.label) != "VP" {
            return false;
        }
        let span = parent.constituent.span;
        self.index
            .tokens(&span)
            .iter()
            .zip(self.index.tags(&span))
            .find(|(_, tag)| tag.starts_with("VB") || *tag == "MD")
            .is_some_and(|(tok, _)| COPULAS.contains(&tok.to_lowercase().as_str()))
    }
}

pub trait LabelingFunction: Send + Sync {
    fn name(&self) -> &str;
    fn apply(&self, ctx: &PairContext<'_>) -> Verdict;
}

/// A labeling function backed by a plain function pointer.
pub struct RuleFn {
    name: &'static str,
    rule: fn(&PairContext<'_>) -> Option<RelationLabel>,
}

impl RuleFn {
    pub const fn new(name: &'static str, rule: fn(&PairContext<'_>) -> Option<RelationLabel>) -> Self {
        RuleFn { name, rule }
    }
}

impl LabelingFunction for RuleFn {
    fn name(&self) -> &str {
        self.name
    }

    fn apply(&self, ctx: &PairContext<'_>) -> Verdict {
        (self.rule)(ctx).into()
    }
}

fn is_when_cue(cue: &Side<'_>) -> bool {
    cue.head_preposition()
        .is_some_and(|p| TEMPORAL_PREPOSITIONS.contains(&p.as_str()))
        && cue.has_temporal_cue()
}

fn is_where_cue(cue: &Side<'_>) -> bool {
    cue.is("PP")
        && cue
            .head_preposition()
            .is_some_and(|p| LOCATIVE_PREPOSITIONS.contains(&p.as_str()))
        && cue.has_capitalized_proper_noun()
        && !cue.has_temporal_cue()
}

fn is_why_cue(cue: &Side<'_>) -> bool {
    starts_with_causal_marker(&cue.lower_tokens()) && cue.has_verb()
}

/// Tries the anchor/cue roles both ways round.
fn either_way(ctx: &PairContext<'_>, holds: impl Fn(&Side<'_>, &Side<'_>) -> bool) -> bool {
    let (a, b) = (ctx.a(), ctx.b());
    holds(&a, &b) || holds(&b, &a)
}

fn lf_when(ctx: &PairContext<'_>) -> Option<RelationLabel> {
    either_way(ctx, |anchor, cue| {
        anchor.is("NP") && anchor.governs(cue) && is_when_cue(cue)
    })
    .then_some(RelationLabel::When)
}

fn lf_where(ctx: &PairContext<'_>) -> Option<RelationLabel> {
    either_way(ctx, |anchor, cue| {
        anchor.is("NP") && anchor.governs(cue) && is_where_cue(cue)
    })
    .then_some(RelationLabel::Where)
}

fn who_holds(ctx: &PairContext<'_>) -> bool {
    let (a, b) = (ctx.a(), ctx.b());
    let proper_or_pronoun = matches!(a.head_tag(), Some("NNP" | "NNPS" | "PRP"));
    let modifier = b.is("NP")
        || (b.is("SBAR")
            && b.lower_tokens()
                .first()
                .is_some_and(|t| RELATIVE_PRONOUNS.contains(&t.as_str())));
    a.is("NP") && proper_or_pronoun && modifier && b.is_sibling_of(&a) && b.follows(&a)
}

fn lf_who(ctx: &PairContext<'_>) -> Option<RelationLabel> {
    who_holds(ctx).then_some(RelationLabel::Who)
}

fn verbal_predicate<'a>(ctx: &PairContext<'a>) -> Option<Vec<(&'a str, &'a str)>> {
    let (a, b) = (ctx.a(), ctx.b());
    (a.is("NP") && b.is("VP") && !b.is_coordination() && a.governs(&b)).then(|| b.verbs())
}

fn is_past(verbs: &[(&str, &str)]) -> bool {
    matches!(verbs, [(_, "VBD"), ..] | [(_, "VBZ" | "VBP"), (_, "VBN"), ..])
}

fn is_future(verbs: &[(&str, &str)], tokens: &[String]) -> bool {
    if verbs
        .iter()
        .any(|(tok, tag)| *tag == "MD" && FUTURE_MODALS.contains(&tok.to_lowercase().as_str()))
    {
        return true;
    }
    let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    lower
        .windows(2)
        .position(|w| w[0] == "going" && w[1] == "to")
        .is_some_and(|at| {
            let after = &tokens[at + 2..];
            after
                .iter()
                .any(|t| verbs.iter().any(|(v, tag)| *tag == "VB" && *v == t.as_str()))
        })
}

fn lf_what_happened(ctx: &PairContext<'_>) -> Option<RelationLabel> {
    let verbs = verbal_predicate(ctx)?;
    is_past(&verbs).then_some(RelationLabel::WhatHappened)
}

fn lf_what_happens(ctx: &PairContext<'_>) -> Option<RelationLabel> {
    let verbs = verbal_predicate(ctx)?;
    let present = matches!(verbs.first(), Some((_, "VBZ" | "VBP" | "VBG")));
    (present && !is_past(&verbs) && !is_future(&verbs, ctx.b().tokens())).then_some(RelationLabel::WhatHappens)
}

fn lf_what_will(ctx: &PairContext<'_>) -> Option<RelationLabel> {
    let verbs = verbal_predicate(ctx)?;
    is_future(&verbs, ctx.b().tokens()).then_some(RelationLabel::WhatWillHappen)
}

fn lf_why(ctx: &PairContext<'_>) -> Option<RelationLabel> {
    either_way(ctx, |anchor, cue| {
        anchor.is("NP") && anchor.governs(cue) && is_why_cue(cue)
    })
    .then_some(RelationLabel::Why)
}

fn lf_what(ctx: &PairContext<'_>) -> Option<RelationLabel> {
    let (a, b) = (ctx.a(), ctx.b());
    if !a.is("NP") || !(b.is("NP") || b.is("ADJP")) {
        return None;
    }
    let attached =
        (b.is_sibling_of(&a) && !b.parent_is_coordination()) || (a.governs(&b) && b.parent_first_verb_is_copula());
    let other_cue = who_holds(ctx) || b.has_temporal_cue();
    (attached && !other_cue).then_some(RelationLabel::What)
}

/// The built-in functions, in registration order.
pub fn default_functions() -> Vec<Arc<dyn LabelingFunction>> {
    let rules = [
        RuleFn::new("lf_when", lf_when),
        RuleFn::new("lf_where", lf_where),
        RuleFn::new("lf_who", lf_who),
        RuleFn::new("lf_what_happened", lf_what_happened),
        RuleFn::new("lf_what_happens", lf_what_happens),
        RuleFn::new("lf_what_will_happen", lf_what_will),
        RuleFn::new("lf_why", lf_why),
        RuleFn::new("lf_what", lf_what),
    ];
    rules
        .into_iter()
        .map(|r| Arc::new(r) as Arc<dyn LabelingFunction>)
        .collect()
}

/// Named labeling functions. Registering a name twice replaces the earlier
/// function in place.
#[derive(Clone)]
pub struct LfRegistry {
    functions: Vec<Arc<dyn LabelingFunction>>,
}

impl Default for LfRegistry {
    fn default() -> Self {
        LfRegistry {
            functions: default_functions(),
        }
    }
}

impl fmt::Debug for LfRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl LfRegistry {
    pub fn empty() -> Self {
        LfRegistry { functions: Vec::new() }
    }

    pub fn register(&mut self, lf: Arc<dyn LabelingFunction>) {
        match self.functions.iter().position(|f| f.name() == lf.name()) {
            Some(i) => self.functions[i] = lf,
            None => self.functions.push(lf),
        }
    }

    pub fn remove(&mut self, name: &str) -> bool {
        let before = self.functions.len();
        self.functions.retain(|f| f.name() != name);
        before != self.functions.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.functions.iter().map(|f| f.name()).collect()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

/// A frozen registry, lexicon and aggregation config.
#[derive(Debug, Clone, Default)]
pub struct Labeler {
    registry: LfRegistry,
    lexicon: TemporalLexicon,
    config: LabelerConfig,
}

impl Labeler {
    pub fn new(registry: LfRegistry, lexicon: TemporalLexicon, config: LabelerConfig) -> Self {
        Labeler {
            registry,
            lexicon,
            config,
        }
    }

    pub fn config(&self) -> &LabelerConfig {
        &self.config
    }

    pub fn lexicon(&self) -> &TemporalLexicon {
        &self.lexicon
    }

    pub fn registry(&self) -> &LfRegistry {
        &self.registry
    }

    /// One vote per registered function.
    pub fn apply_labeling_functions(&self, pair: &CandidatePair, doc: &AbstractDoc) -> Vec<LabelVote> {
        self.votes(pair, &DocIndex::new(doc))
    }

    pub fn votes(&self, pair: &CandidatePair, index: &DocIndex) -> Vec<LabelVote> {
        let ctx = PairContext {
            pair,
            index,
            lexicon: &self.lexicon,
        };
        // Pairs the generator would never emit get no votes at all.
        let degenerate = !crate::candidates::is_pairable(&pair.a)
            || !crate::candidates::is_pairable(&pair.b)
            || index.node(&pair.a).is_none()
            || index.node(&pair.b).is_none();
        self.registry
            .functions
            .iter()
            .map(|f| LabelVote {
                lf_name: f.name().to_string(),
                verdict: if degenerate { Verdict::Abstain } else { f.apply(&ctx) },
            })
            .collect()
    }

    /// Labels one pair; `None` when the aggregate abstains.
    pub fn label_pair(&self, pair: &CandidatePair, index: &DocIndex) -> Option<RelationLabel> {
        aggregate_votes(&self.votes(pair, index), &self.config).label()
    }

    /// One triple per non-abstained candidate, in canonical orientation
    /// with provenance spans.
    pub fn label_candidates(&self, doc: &AbstractDoc) -> Vec<SummaryTriple> {
        let index = DocIndex::new(doc);
        generate_candidates(doc)
            .iter()
            .filter_map(|pair| {
                let relation = self.label_pair(pair, &index)?;
                SummaryTriple::new(
                    pair.a.text.clone(),
                    relation,
                    pair.b.text.clone(),
                    vec![pair.a.span],
                    vec![pair.b.span],
                )
                .ok()
            })
            .collect()
    }

    /// Estimates each function's precision against gold annotations: a vote
    /// counts as correct when some annotator has the pair (either way round)
    /// with that relation. Functions that never vote keep weight 1.0.
    pub fn calibrate_weights(&self, corpus: &[(AbstractDoc, Vec<AnnotationSet>)]) -> BTreeMap<String, f64> {
        let mut hits: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for (doc, golds) in corpus {
            let gold_keys: std::collections::HashSet<_> = golds
                .iter()
                .flat_map(|g| g.triples().iter().map(SummaryTriple::key))
                .collect();
            let index = DocIndex::new(doc);
            for pair in generate_candidates(doc) {
                for vote in self.votes(&pair, &index) {
                    let Verdict::Label(r) = vote.verdict else { continue };
                    let forward = SummaryTriple::from_text(pair.a.text.clone(), r, pair.b.text.clone());
                    let correct =
                        forward.is_ok_and(|t| gold_keys.contains(&t.key()) || gold_keys.contains(&t.swapped().key()));
                    let entry = hits.entry(vote.lf_name).or_default();
                    entry.0 += usize::from(correct);
                    entry.1 += 1;
                }
            }
        }
        self.registry
            .names()
            .into_iter()
            .map(|name| {
                let weight = match hits.get(name) {
                    Some(&(correct, total)) if total > 0 => correct as f64 / total as f64,
                    _ => 1.0,
                };
                (name.to_string(), weight)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_bracketed;

    fn doc(parses: &[&str]) -> AbstractDoc {
        let trees = parses.iter().map(|p| parse_bracketed(p).unwrap()).collect();
        AbstractDoc::from_trees("t", trees, vec![]).unwrap()
    }

    fn pair_for(doc: &AbstractDoc, a: &str, b: &str) -> CandidatePair {
        generate_candidates(doc)
            .into_iter()
            .find(|p| p.a.text == a && p.b.text == b && p.sent_distance == 0)
            .unwrap_or_else(|| panic!("no candidate ({a}, {b})"))
    }

    fn fired(votes: &[LabelVote]) -> Vec<(String, RelationLabel)> {
        votes
            .iter()
            .filter_map(|v| v.verdict.label().map(|r| (v.lf_name.clone(), r)))
            .collect()
    }

    fn vote(name: &str, r: RelationLabel) -> LabelVote {
        LabelVote {
            lf_name: name.into(),
            verdict: Verdict::Label(r),
        }
    }

    const EVENT: &str = "(NP (NP (DT the) (NN event)) (PP (IN on) (NP (NNP June) (CD 7) (, ,) (CD 2012))))";
    const ARK: &str = "(S (NP (NP (DT A) (ADJP (CD £1) (CD million)) (JJ full-scale) (NN replica)) (PP (IN of) (NP (NNP Noah's) (NN ark)))) (VP (VBZ opens) (PP (IN in) (NP (NNP Dordrecht)))) (. .))";

    #[test]
    fn when_fires_alone_on_date_pp() {
        let d = doc(&[EVENT]);
        let labeler = Labeler::default();
        let votes = labeler.apply_labeling_functions(&pair_for(&d, "the event", "on June 7 , 2012"), &d);
        assert_eq!(votes.len(), 8);
        assert_eq!(fired(&votes), vec![("lf_when".to_string(), RelationLabel::When)]);
    }

    #[test]
    fn where_fires_on_ark_example() {
        let d = doc(&[ARK]);
        let labeler = Labeler::default();
        let pair = pair_for(&d, "A £1 million full-scale replica of Noah's ark", "in Dordrecht");
        let votes = labeler.apply_labeling_functions(&pair, &d);
        assert_eq!(fired(&votes), vec![("lf_where".to_string(), RelationLabel::Where)]);
    }

    #[test]
    fn punctuation_pair_abstains() {
        let d = doc(&["(S (NP (NNP Laura)) (, ,) (VP (VBD won)))"]);
        let cs = d.constituents().concat();
        let comma = cs.iter().find(|c| c.text == ",").unwrap().clone();
        let won = cs.iter().find(|c| c.text == "won" && c.label == "VP").unwrap().clone();
        let pair = CandidatePair {
            a: comma,
            b: won,
            sent_distance: 0,
        };
        let votes = Labeler::default().apply_labeling_functions(&pair, &d);
        assert!(votes.iter().all(|v| v.verdict == Verdict::Abstain));
    }

    #[test]
    fn verbal_functions() {
        let d = doc(&[
            "(S (NP (NNP Laura)) (VP (VBD won) (NP (DT a) (JJ golden) (NN medal))))",
            "(S (NP (PRP She)) (VP (VBZ trains) (ADVP (RB hard))))",
            "(S (NP (PRP She)) (VP (MD will) (VP (VB compete) (ADVP (RB again)))))",
            "(S (NP (PRP She)) (VP (VBZ has) (VP (VBN retired))))",
        ]);
        let labeler = Labeler::default();
        let idx = DocIndex::new(&d);
        let label = |a: &str, b: &str| labeler.label_pair(&pair_for(&d, a, b), &idx);
        assert_eq!(label("Laura", "won a golden medal"), Some(RelationLabel::WhatHappened));
        assert_eq!(label("She", "trains hard"), Some(RelationLabel::WhatHappens));
        assert_eq!(label("She", "will compete again"), Some(RelationLabel::WhatWillHappen));
        assert_eq!(label("She", "has retired"), Some(RelationLabel::WhatHappened));
    }

    #[test]
    fn going_to_is_future() {
        let d = doc(&["(S (NP (NNP Bob)) (VP (VBZ is) (VP (VBG going) (S (VP (TO to) (VP (VB resign)))))))"]);
        let labeler = Labeler::default();
        let idx = DocIndex::new(&d);
        let pair = pair_for(&d, "Bob", "is going to resign");
        assert_eq!(labeler.label_pair(&pair, &idx), Some(RelationLabel::WhatWillHappen));
    }

    #[test]
    fn who_and_what() {
        let d = doc(&[
            "(S (NP (NP (NNP Laura)) (, ,) (NP (DT a) (NN triathlete)) (, ,)) (VP (VBD won)))",
            "(S (NP (DT The) (NN race)) (VP (VBD was) (ADJP (JJ tough))))",
            "(S (NP (NP (NNP Bob)) (SBAR (WHNP (WP who)) (S (VP (VBD ran))))) (VP (VBD lost)))",
        ]);
        let labeler = Labeler::default();
        let idx = DocIndex::new(&d);
        let label = |a: &str, b: &str| labeler.label_pair(&pair_for(&d, a, b), &idx);
        assert_eq!(label("Laura", "a triathlete"), Some(RelationLabel::Who));
        assert_eq!(label("The race", "tough"), Some(RelationLabel::What));
        assert_eq!(label("Bob", "who ran"), Some(RelationLabel::Who));
    }

    #[test]
    fn why_cue_either_side() {
        let d = doc(&["(S (NP (PRP They)) (VP (VBD left) (SBAR (IN because) (S (NP (PRP it)) (VP (VBD rained))))))"]);
        let labeler = Labeler::default();
        let idx = DocIndex::new(&d);
        let pair = pair_for(&d, "They", "because it rained");
        assert_eq!(labeler.label_pair(&pair, &idx), Some(RelationLabel::Why));
    }

    #[test]
    fn empty_when_nothing_matches() {
        let d = doc(&["(NP (JJ big) (JJ red) (NN balloons))", "(ADJP (RB very) (JJ nice))"]);
        assert!(Labeler::default().label_candidates(&d).is_empty());
    }

    #[test]
    fn ark_triples() {
        let d = doc(&[ARK]);
        let triples = Labeler::default().label_candidates(&d);
        assert!(triples.iter().any(|t| {
            t.source_text() == "A £1 million full-scale replica of Noah's ark"
                && t.relation() == RelationLabel::Where
                && t.target_text() == "in Dordrecht"
        }));
        for t in &triples {
            assert_eq!(t.source_spans().len(), 1);
            assert!(t.source_spans()[0].doc_order(&t.target_spans()[0]).is_lt());
        }
    }

    #[test]
    fn aggregation() {
        let cfg = LabelerConfig::default();
        assert_eq!(
            aggregate_votes(&[vote("x", RelationLabel::When)], &cfg),
            Verdict::Label(RelationLabel::When)
        );
        assert_eq!(aggregate_votes(&[], &cfg), Verdict::Abstain);
        let tie = [vote("a", RelationLabel::Where), vote("b", RelationLabel::What)];
        assert_eq!(aggregate_votes(&tie, &cfg), Verdict::Label(RelationLabel::What));

        let mut weighted = cfg.clone();
        weighted.lf_weights.insert("a".into(), 2.0);
        assert_eq!(aggregate_votes(&tie, &weighted), Verdict::Label(RelationLabel::Where));

        let mut strict = cfg.clone();
        strict.min_votes = 3;
        assert_eq!(aggregate_votes(&tie, &strict), Verdict::Abstain);

        let abstains = [LabelVote {
            lf_name: "a".into(),
            verdict: Verdict::Abstain,
        }];
        assert_eq!(aggregate_votes(&abstains, &cfg), Verdict::Abstain);
    }

    #[test]
    fn zero_weights_still_pick_a_voted_label() {
        let mut cfg = LabelerConfig::default();
        cfg.lf_weights.insert("a".into(), 0.0);
        let votes = [vote("a", RelationLabel::Why)];
        assert_eq!(aggregate_votes(&votes, &cfg), Verdict::Label(RelationLabel::Why));
    }

    #[test]
    fn config_validation() {
        let mut cfg = LabelerConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.tie_break_order.pop();
        assert_eq!(cfg.validate(), Err(ConfigError::BadTieBreakOrder));
        let mut cfg = LabelerConfig::default();
        cfg.tie_break_order[1] = RelationLabel::Who;
        assert_eq!(cfg.validate(), Err(ConfigError::BadTieBreakOrder));
        let cfg = LabelerConfig {
            min_votes: 0,
            ..Default::default()
        };
        assert_eq!(cfg.validate(), Err(ConfigError::BadMinVotes));
        let mut cfg = LabelerConfig::default();
        cfg.lf_weights.insert("x".into(), -1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn verdict_serde() {
        assert_eq!(serde_json::to_string(&Verdict::Abstain).unwrap(), "\"abstain\"");
        assert_eq!(
            serde_json::to_string(&Verdict::Label(RelationLabel::When)).unwrap(),
            "\"when\""
        );
        let v: Verdict = serde_json::from_str("\"what_happened\"").unwrap();
        assert_eq!(v, Verdict::Label(RelationLabel::WhatHappened));
    }

    #[test]
    fn registry_replaces_by_name() {
        struct AlwaysWhy;
        impl LabelingFunction for AlwaysWhy {
            fn name(&self) -> &str {
                "lf_when"
            }
            fn apply(&self, _: &PairContext<'_>) -> Verdict {
                Verdict::Label(RelationLabel::Why)
            }
        }
        let mut reg = LfRegistry::default();
        reg.register(Arc::new(AlwaysWhy));
        assert_eq!(reg.len(), 8);
        assert_eq!(reg.names()[0], "lf_when");
        let d = doc(&[EVENT]);
        let labeler = Labeler::new(reg, TemporalLexicon::default(), LabelerConfig::default());
        let idx = DocIndex::new(&d);
        let pair = pair_for(&d, "the event", "on June 7 , 2012");
        assert_eq!(labeler.label_pair(&pair, &idx), Some(RelationLabel::Why));
        let mut reg = LfRegistry::default();
        assert!(reg.remove("lf_what"));
        assert!(!reg.remove("lf_what"));
    }

    #[test]
    fn calibration_counts_agreement() {
        use crate::model::QcFlags;
        let d = doc(&[EVENT]);
        let gold = AnnotationSet::new(
            "t",
            "ann",
            vec![SummaryTriple::from_text("the event", RelationLabel::When, "on June 7 , 2012").unwrap()],
            QcFlags::default(),
        )
        .unwrap();
        let weights = Labeler::default().calibrate_weights(&[(d, vec![gold])]);
        assert_eq!(weights.len(), 8);
        assert_eq!(weights["lf_who"], 1.0);
        assert!(weights["lf_when"] > 0.0 && weights["lf_when"] <= 1.0);
    }
}
