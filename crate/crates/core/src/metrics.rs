//! Agreement and evaluation metrics over triple sets.
//!
//! - hard P/R/F1: exact matches of normalized triples, one-to-one.
//! - soft greedy F1: triples aligned greedily by a per-pair lexical score,
//!   summed scores normalized F-style by `(|pred| + |gold|) / 2`.
//! - soft binary P/R/F1: the same greedy alignment, counting any pair with a
//!   positive score as a match.
//! - Jaccard indices over whole triples, sources, targets and relations.
//!
//! Empty-vs-empty comparisons score 1.0; empty-vs-nonempty score 0.0.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AnnotationSet, RelationLabel, SummaryTriple, TripleKey};
use crate::text::phrase_tokens;

/// Largest set size accepted by [`optimal_alignment_score`].
pub const ORACLE_MAX_TRIPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("agreement needs at least two annotation sets, got {0}")]
    SingleAnnotator(usize),
    #[error("annotation sets belong to different documents ({0} and {1})")]
    MixedDocuments(String, String),
    #[error("no gold annotation sets")]
    NoGold,
    #[error("alignment oracle is capped at {ORACLE_MAX_TRIPLES} triples per side, got {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

impl Prf {
    /// P/R/F1 from a one-to-one match count; 0/0 is 0.
    pub fn from_counts(matched: usize, n_pred: usize, n_gold: usize) -> Self {
        let ratio = |n: usize| if n == 0 { 0.0 } else { matched as f64 / n as f64 };
        let (p, r) = (ratio(n_pred), ratio(n_gold));
        Prf {
            p,
            r,
            f1: harmonic(p, r),
        }
    }

    fn swapped(self) -> Self {
        Prf {
            p: self.r,
            r: self.p,
            f1: self.f1,
        }
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jaccard {
    pub triple: f64,
    pub const_a: f64,
    pub const_b: f64,
    pub relations: f64,
}

/// Relative weight of the three components of the per-pair soft score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftWeights {
    pub source: f64,
    pub target: f64,
    pub relation: f64,
}

impl Default for SoftWeights {
    fn default() -> Self {
        SoftWeights {
            source: 1.0,
            target: 1.0,
            relation: 1.0,
        }
    }
}

/// Scores for one comparison, or macro averages over several.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AgreementReport {
    pub hard_p: f64,
    pub hard_r: f64,
    pub hard_f1: f64,
    pub soft_greedy_f1: f64,
    pub soft_binary_p: f64,
    pub soft_binary_r: f64,
    pub soft_binary_f1: f64,
    pub jaccard_triple: f64,
    pub jaccard_const_a: f64,
    pub jaccard_const_b: f64,
    pub jaccard_relations: f64,
}

impl AgreementReport {
    pub const FIELDS: [&'static str; 11] = [
        "hard_p",
        "hard_r",
        "hard_f1",
        "soft_greedy_f1",
        "soft_binary_p",
        "soft_binary_r",
        "soft_binary_f1",
        "jaccard_triple",
        "jaccard_const_a",
        "jaccard_const_b",
        "jaccard_relations",
    ];

    pub fn values(&self) -> [f64; 11] {
        [
            self.hard_p,
            self.hard_r,
            self.hard_f1,
            self.soft_greedy_f1,
            self.soft_binary_p,
            self.soft_binary_r,
            self.soft_binary_f1,
            self.jaccard_triple,
            self.jaccard_const_a,
            self.jaccard_const_b,
            self.jaccard_relations,
        ]
    }

    pub fn from_values(v: [f64; 11]) -> Self {
        AgreementReport {
            hard_p: v[0],
            hard_r: v[1],
            hard_f1: v[2],
            soft_greedy_f1: v[3],
            soft_binary_p: v[4],
            soft_binary_r: v[5],
            soft_binary_f1: v[6],
            jaccard_triple: v[7],
            jaccard_const_a: v[8],
            jaccard_const_b: v[9],
            jaccard_relations: v[10],
        }
    }

    fn assemble(hard: Prf, soft: f64, binary: Prf, jaccard: Jaccard) -> Self {
        AgreementReport {
            hard_p: hard.p,
            hard_r: hard.r,
            hard_f1: hard.f1,
            soft_greedy_f1: soft,
            soft_binary_p: binary.p,
            soft_binary_r: binary.r,
            soft_binary_f1: binary.f1,
            jaccard_triple: jaccard.triple,
            jaccard_const_a: jaccard.const_a,
            jaccard_const_b: jaccard.const_b,
            jaccard_relations: jaccard.relations,
        }
    }
}

/// Field-wise mean and population standard deviation.
pub fn summarize(reports: &[AgreementReport]) -> (AgreementReport, AgreementReport) {
    if reports.is_empty() {
        return (AgreementReport::default(), AgreementReport::default());
    }
    let n = reports.len() as f64;
    let mut mean = [0.0; 11];
    for r in reports {
        for (m, v) in mean.iter_mut().zip(r.values()) {
            *m += v / n;
        }
    }
    let mut var = [0.0; 11];
    for r in reports {
        for ((s, v), m) in var.iter_mut().zip(r.values()).zip(mean) {
            *s += (v - m).powi(2) / n;
        }
    }
    (
        AgreementReport::from_values(mean),
        AgreementReport::from_values(var.map(f64::sqrt)),
    )
}

struct Features {
    source: Vec<String>,
    target: Vec<String>,
    relation: RelationLabel,
}

impl Features {
    fn of(t: &SummaryTriple) -> Self {
        Features {
            source: phrase_tokens(t.source_text()),
            target: phrase_tokens(t.target_text()),
            relation: t.relation(),
        }
    }
}

/// Bag-of-tokens F1; 1.0 for two empty bags.
pub fn token_f1(a: &[String], b: &[String]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in a {
        *counts.entry(t).or_default() += 1;
    }
    let mut common = 0;
    for t in b {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    Prf::from_counts(common, a.len(), b.len()).f1
}

/// Scoring with configurable soft-score weights.
#[derive(Debug, Clone, Copy, Default)]
pub struct Scorer {
    pub weights: SoftWeights,
}

impl Scorer {
    pub fn new(weights: SoftWeights) -> Self {
        Scorer { weights }
    }

    fn score(&self, p: &Features, g: &Features) -> f64 {
        let w = self.weights;
        let total = w.source + w.target + w.relation;
        if total <= 0.0 {
            return 0.0;
        }
        let relation = if p.relation == g.relation { 1.0 } else { 0.0 };
        (w.source * token_f1(&p.source, &g.source) + w.target * token_f1(&p.target, &g.target) + w.relation * relation)
            / total
    }

    /// Weighted mean of source token F1, target token F1 and relation match.
    pub fn pair_score(&self, pred: &SummaryTriple, gold: &SummaryTriple) -> f64 {
        self.score(&Features::of(pred), &Features::of(gold))
    }

    fn score_matrix(&self, pred: &[SummaryTriple], gold: &[SummaryTriple]) -> Vec<Vec<f64>> {
        let gf: Vec<Features> = gold.iter().map(Features::of).collect();
        pred.iter()
            .map(|p| {
                let pf = Features::of(p);
                gf.iter().map(|g| self.score(&pf, g)).collect()
            })
            .collect()
    }

    /// Greedy one-to-one alignment: highest score first, ties by pred index
    /// then gold index. Returns `(pred, gold, score)` for each aligned pair.
    pub fn greedy_alignment(&self, pred: &[SummaryTriple], gold: &[SummaryTriple]) -> Vec<(usize, usize, f64)> {
        greedy(&self.score_matrix(pred, gold))
    }

    pub fn soft_greedy_f1(&self, pred: &[SummaryTriple], gold: &[SummaryTriple]) -> f64 {
        if pred.is_empty() && gold.is_empty() {
            return 1.0;
        }
        let total: f64 = self.greedy_alignment(pred, gold).iter().map(|(_, _, s)| s).sum();
        f_normalize(total, pred.len(), gold.len())
    }

    pub fn soft_binary_prf(&self, pred: &[SummaryTriple], gold: &[SummaryTriple]) -> Prf {
        if pred.is_empty() && gold.is_empty() {
            return Prf {
                p: 1.0,
                r: 1.0,
                f1: 1.0,
            };
        }
        let matched = self
            .greedy_alignment(pred, gold)
            .iter()
            .filter(|(_, _, s)| *s > 0.0)
            .count();
        Prf::from_counts(matched, pred.len(), gold.len())
    }

    /// Best one-to-one alignment by exhaustive search, normalized like
    /// [`Scorer::soft_greedy_f1`].
    pub fn optimal_alignment_score(&self, pred: &[SummaryTriple], gold: &[SummaryTriple]) -> Result<f64, MetricError> {
        let largest = pred.len().max(gold.len());
        if largest > ORACLE_MAX_TRIPLES {
            return Err(MetricError::TooLarge(largest));
        }
        if pred.is_empty() && gold.is_empty() {
            return Ok(1.0);
        }
        let mut matrix = self.score_matrix(pred, gold);
        if pred.len() > gold.len() {
            matrix = transpose(&matrix, gold.len());
        }
        let cols = matrix.first().map_or(0, Vec::len);
        let mut used = vec![false; cols];
        let best = best_assignment(&matrix, 0, &mut used);
        Ok(f_normalize(best, pred.len(), gold.len()))
    }

    pub fn compare(&self, pred: &[SummaryTriple], gold: &[SummaryTriple]) -> AgreementReport {
        AgreementReport::assemble(
            hard_prf(pred, gold),
            self.soft_greedy_f1(pred, gold),
            self.soft_binary_prf(pred, gold),
            jaccard_scores(pred, gold),
        )
    }

    /// Macro average over every unordered annotator pair. Precision and
    /// recall are averaged over both directions of each pair.
    pub fn pairwise_agreement(&self, annotations: &[AnnotationSet]) -> Result<AgreementReport, MetricError> {
        if annotations.len() < 2 {
            return Err(MetricError::SingleAnnotator(annotations.len()));
        }
        let first = annotations[0].doc_id();
        if let Some(other) = annotations.iter().find(|a| a.doc_id() != first) {
            return Err(MetricError::MixedDocuments(
                first.to_string(),
                other.doc_id().to_string(),
            ));
        }
        let mut reports = Vec::new();
        for (i, x) in annotations.iter().enumerate() {
            for y in &annotations[i + 1..] {
                let (x, y) = (x.triples(), y.triples());
                let both_ways = |prf: Prf| {
                    let back = prf.swapped();
                    Prf {
                        p: (prf.p + back.p) / 2.0,
                        r: (prf.r + back.r) / 2.0,
                        f1: prf.f1,
                    }
                };
                reports.push(AgreementReport::assemble(
                    both_ways(hard_prf(x, y)),
                    self.soft_greedy_f1(x, y),
                    both_ways(self.soft_binary_prf(x, y)),
                    jaccard_scores(x, y),
                ));
            }
        }
        Ok(summarize(&reports).0)
    }

    /// Scores `pred` against each gold set and reports every metric family
    /// against the gold set that maximizes that family's headline score.
    pub fn evaluate_against_best(
        &self,
        pred: &[SummaryTriple],
        golds: &[AnnotationSet],
    ) -> Result<AgreementReport, MetricError> {
        if golds.is_empty() {
            return Err(MetricError::NoGold);
        }
        let per_gold: Vec<AgreementReport> = golds.iter().map(|g| self.compare(pred, g.triples())).collect();
        let best_by = |key: &dyn Fn(&AgreementReport) -> Vec<f64>| -> AgreementReport {
            let mut best = per_gold[0];
            for r in &per_gold[1..] {
                if key(r).partial_cmp(&key(&best)) == Some(std::cmp::Ordering::Greater) {
                    best = *r;
                }
            }
            best
        };
        let hard = best_by(&|r| vec![r.hard_f1]);
        let soft = best_by(&|r| vec![r.soft_greedy_f1]);
        let binary = best_by(&|r| vec![r.soft_binary_f1]);
        let jac = best_by(&|r| {
            vec![
                r.jaccard_triple,
                r.jaccard_const_a,
                r.jaccard_const_b,
                r.jaccard_relations,
            ]
        });
        Ok(AgreementReport {
            hard_p: hard.hard_p,
            hard_r: hard.hard_r,
            hard_f1: hard.hard_f1,
            soft_greedy_f1: soft.soft_greedy_f1,
            soft_binary_p: binary.soft_binary_p,
            soft_binary_r: binary.soft_binary_r,
            soft_binary_f1: binary.soft_binary_f1,
            jaccard_triple: jac.jaccard_triple,
            jaccard_const_a: jac.jaccard_const_a,
            jaccard_const_b: jac.jaccard_const_b,
            jaccard_relations: jac.jaccard_relations,
        })
    }
}

/// Per-document reports with their field-wise mean and population std.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorpusReport {
    pub per_doc: std::collections::BTreeMap<String, AgreementReport>,
    pub mean: AgreementReport,
    pub std: AgreementReport,
    /// Documents left out, with the reason.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<(String, String)>,
}

impl CorpusReport {
    pub fn from_docs(per_doc: std::collections::BTreeMap<String, AgreementReport>) -> Self {
        let reports: Vec<AgreementReport> = per_doc.values().copied().collect();
        let (mean, std) = summarize(&reports);
        CorpusReport {
            per_doc,
            mean,
            std,
            skipped: Vec::new(),
        }
    }

    /// One row per document, then `mean` and `std` rows.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["doc_id"];
        header.extend(AgreementReport::FIELDS);
        w.write_record(&header).expect("in-memory write");
        let mut row = |name: &str, r: &AgreementReport| {
            let mut cells = vec![name.to_string()];
            cells.extend(r.values().iter().map(|v| format!("{v:.6}")));
            w.write_record(&cells).expect("in-memory write");
        };
        for (doc, r) in &self.per_doc {
            row(doc, r);
        }
        row("mean", &self.mean);
        row("std", &self.std);
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn f_normalize(total: f64, n_pred: usize, n_gold: usize) -> f64 {
    let denom = n_pred + n_gold;
    if denom == 0 {
        1.0
    } else {
        (2.0 * total / denom as f64).min(1.0)
    }
}

fn greedy(matrix: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let mut cells: Vec<(usize, usize, f64)> = matrix
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &s)| (i, j, s)))
        .collect();
    cells.sort_by(|x, y| y.2.total_cmp(&x.2).then(x.0.cmp(&y.0)).then(x.1.cmp(&y.1)));
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let (mut row_used, mut col_used) = (vec![false; rows], vec![false; cols]);
    let mut out = Vec::new();
    for (i, j, s) in cells {
        if !row_used[i] && !col_used[j] {
            row_used[i] = true;
            col_used[j] = true;
            out.push((i, j, s));
        }
    }
    out
}

fn transpose(m: &[Vec<f64>], cols: usize) -> Vec<Vec<f64>> {
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

/// Rows never outnumber columns here; every row takes a distinct column.
fn best_assignment(m: &[Vec<f64>], row: usize, used: &mut [bool]) -> f64 {
    if row == m.len() {
        return 0.0;
    }
    let mut best = 0.0f64;
    for j in 0..used.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        best = best.max(m[row][j] + best_assignment(m, row + 1, used));
        used[j] = false;
    }
    best
}

fn multiset(triples: &[SummaryTriple]) -> HashMap<TripleKey, usize> {
    let mut counts = HashMap::new();
    for t in triples {
        *counts.entry(t.key()).or_insert(0) += 1;
    }
    counts
}

/// Exact matching on normalized triples. Duplicates match one-to-one.
pub fn hard_prf(pred: &[SummaryTriple], gold: &[SummaryTriple]) -> Prf {
    if pred.is_empty() && gold.is_empty() {
        return Prf {
            p: 1.0,
            r: 1.0,
            f1: 1.0,
        };
    }
    let gold_counts = multiset(gold);
    let matched: usize = multiset(pred)
        .iter()
        .map(|(k, n)| (*n).min(gold_counts.get(k).copied().unwrap_or(0)))
        .sum();
    Prf::from_counts(matched, pred.len(), gold.len())
}

pub fn soft_greedy_f1(pred: &[SummaryTriple], gold: &[SummaryTriple]) -> f64 {
    Scorer::default().soft_greedy_f1(pred, gold)
}

pub fn soft_binary_prf(pred: &[SummaryTriple], gold: &[SummaryTriple]) -> Prf {
    Scorer::default().soft_binary_prf(pred, gold)
}

pub fn optimal_alignment_score(pred: &[SummaryTriple], gold: &[SummaryTriple]) -> Result<f64, MetricError> {
    Scorer::default().optimal_alignment_score(pred, gold)
}

pub fn pairwise_agreement(annotations: &[AnnotationSet]) -> Result<AgreementReport, MetricError> {
    Scorer::default().pairwise_agreement(annotations)
}

pub fn evaluate_against_best(pred: &[SummaryTriple], golds: &[AnnotationSet]) -> Result<AgreementReport, MetricError> {
    Scorer::default().evaluate_against_best(pred, golds)
}

fn jaccard<T: Eq + std::hash::Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        1.0
    } else {
        a.intersection(b).count() as f64 / union as f64
    }
}

/// Jaccard indices over sets of normalized triples, sources, targets and
/// relations.
pub fn jaccard_scores(a: &[SummaryTriple], b: &[SummaryTriple]) -> Jaccard {
    let keys = |ts: &[SummaryTriple]| ts.iter().map(SummaryTriple::key).collect::<Vec<_>>();
    let (ka, kb) = (keys(a), keys(b));
    let set = |ks: &[TripleKey], f: &dyn Fn(&TripleKey) -> String| -> HashSet<String> { ks.iter().map(f).collect() };
    let whole: [HashSet<TripleKey>; 2] = [ka.iter().cloned().collect(), kb.iter().cloned().collect()];
    let rels = |ks: &[TripleKey]| ks.iter().map(|k| k.relation).collect::<HashSet<_>>();
    Jaccard {
        triple: jaccard(&whole[0], &whole[1]),
        const_a: jaccard(&set(&ka, &|k| k.source.clone()), &set(&kb, &|k| k.source.clone())),
        const_b: jaccard(&set(&ka, &|k| k.target.clone()), &set(&kb, &|k| k.target.clone())),
        relations: jaccard(&rels(&ka), &rels(&kb)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::QcFlags;
    use RelationLabel::*;

    fn t(s: &str, r: RelationLabel, g: &str) -> SummaryTriple {
        SummaryTriple::from_text(s, r, g).unwrap()
    }

    fn ann(id: &str, triples: Vec<SummaryTriple>) -> AnnotationSet {
        AnnotationSet::new("d", id, triples, QcFlags::default()).unwrap()
    }

    fn gold4() -> Vec<SummaryTriple> {
        vec![
            t("Laura", WhatHappened, "won a golden medal"),
            t("Laura", WhatHappened, "trained really hard"),
            t("the competition", Where, "in Germany"),
            t("the event", When, "on June 7, 2012"),
        ]
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn hard_identity_and_disjoint() {
        let g = gold4();
        assert_eq!(
            hard_prf(&g, &g),
            Prf {
                p: 1.0,
                r: 1.0,
                f1: 1.0
            }
        );
        let other = vec![t("Bob", Who, "a baker")];
        assert_eq!(
            hard_prf(&other, &g),
            Prf {
                p: 0.0,
                r: 0.0,
                f1: 0.0
            }
        );
        assert_eq!(hard_prf(&[], &g), Prf::default());
        assert_eq!(hard_prf(&g, &[]), Prf::default());
    }

    #[test]
    fn hard_with_one_extra() {
        let g = gold4();
        let mut p = g.clone();
        p.push(t("Bob", Who, "a baker"));
        // Counting oracle: 4 of 5 predictions match, all 4 gold found.
        let matched = p.iter().filter(|x| g.iter().any(|y| x.key() == y.key())).count();
        assert_eq!(matched, 4);
        let prf = hard_prf(&p, &g);
        assert!(close(prf.p, 0.8));
        assert!(close(prf.r, 1.0));
        assert!(close(prf.f1, 8.0 / 9.0));
    }

    #[test]
    fn hard_normalizes_text() {
        let p = vec![t("LAURA ,", WhatHappened, "won  a golden medal .")];
        assert_eq!(hard_prf(&p, &gold4()[..1]).f1, 1.0);
    }

    #[test]
    fn soft_greedy_examples() {
        let g = gold4();
        assert_eq!(soft_greedy_f1(&g, &g), 1.0);
        assert_eq!(soft_greedy_f1(&[], &g), 0.0);
        assert_eq!(soft_greedy_f1(&[], &[]), 1.0);

        let gold = vec![
            t("Laura", WhatHappened, "won a medal"),
            t("the race", Where, "in Berlin"),
        ];
        let pred = vec![t("Laura", WhatHappened, "won a medal"), t("xyz", When, "qqq")];
        // Exhaustive oracle over both permutations.
        let scorer = Scorer::default();
        let perm_a = scorer.pair_score(&pred[0], &gold[0]) + scorer.pair_score(&pred[1], &gold[1]);
        let perm_b = scorer.pair_score(&pred[0], &gold[1]) + scorer.pair_score(&pred[1], &gold[0]);
        let oracle = 2.0 * perm_a.max(perm_b) / 4.0;
        assert_eq!(oracle, 0.5);
        assert_eq!(soft_greedy_f1(&pred, &gold), 0.5);
    }

    #[test]
    fn pair_score_components() {
        let s = Scorer::default();
        let a = t("the ark", Where, "in Dordrecht");
        let b = t("ark", Where, "in Rotterdam");
        // source F1: p=1, r=1/2 -> 2/3; target F1: 1/2; relation: 1.
        let expected = (2.0 / 3.0 + 0.5 + 1.0) / 3.0;
        assert!(close(s.pair_score(&a, &b), expected));
        let rel_only = Scorer::new(SoftWeights {
            source: 0.0,
            target: 0.0,
            relation: 1.0,
        });
        assert_eq!(rel_only.pair_score(&a, &t("x", When, "y")), 0.0);
    }

    #[test]
    fn soft_binary_examples() {
        let g = gold4();
        assert_eq!(
            soft_binary_prf(&g, &g),
            Prf {
                p: 1.0,
                r: 1.0,
                f1: 1.0
            }
        );
        let disjoint = vec![t("xyz", Why, "qqq")];
        let only_when = vec![t("abc", When, "def")];
        assert_eq!(soft_binary_prf(&disjoint, &only_when), Prf::default());
        let pred = vec![t("Laura", Who, "a medal"), t("the competition", When, "Germany")];
        // Counting oracle: both predictions share tokens with distinct gold triples.
        let prf = soft_binary_prf(&pred, &g);
        assert_eq!((prf.p, prf.r), (1.0, 0.5));
    }

    #[test]
    fn jaccard_examples() {
        let g = gold4();
        let ones = Jaccard {
            triple: 1.0,
            const_a: 1.0,
            const_b: 1.0,
            relations: 1.0,
        };
        assert_eq!(jaccard_scores(&g, &g), ones);
        let a = vec![t("x", Who, "y"), t("z", Who, "w")];
        let b = vec![t("x", Why, "y"), t("z", Why, "w")];
        assert_eq!(
            jaccard_scores(&a, &b),
            Jaccard {
                triple: 0.0,
                const_a: 1.0,
                const_b: 1.0,
                relations: 0.0
            }
        );
        assert_eq!(jaccard_scores(&[], &[]), ones);
    }

    #[test]
    fn pairwise_identical_annotators() {
        let sets = vec![ann("a", gold4()), ann("b", gold4()), ann("c", gold4())];
        let r = pairwise_agreement(&sets).unwrap();
        assert!(r.values().iter().all(|v| *v == 1.0), "{r:?}");
        assert_eq!(pairwise_agreement(&sets[..1]), Err(MetricError::SingleAnnotator(1)));
        let other = AnnotationSet::new("e", "z", vec![], QcFlags::default()).unwrap();
        assert!(matches!(
            pairwise_agreement(&[sets[0].clone(), other]),
            Err(MetricError::MixedDocuments(..))
        ));
    }

    #[test]
    fn pairwise_averages_directions() {
        let g = gold4();
        let sets = vec![ann("a", g.clone()), ann("b", g[..2].to_vec())];
        let r = pairwise_agreement(&sets).unwrap();
        // a vs b: p=0.5 r=1; b vs a: p=1 r=0.5.
        assert!(close(r.hard_p, 0.75));
        assert!(close(r.hard_r, 0.75));
        assert!(close(r.hard_f1, 2.0 / 3.0));
    }

    #[test]
    fn best_gold_is_used() {
        let g = gold4();
        let golds = vec![
            ann("a", vec![t("Bob", Who, "a baker")]),
            ann("b", g.clone()),
            ann("c", vec![]),
        ];
        let r = evaluate_against_best(&g, &golds).unwrap();
        assert!(r.values().iter().all(|v| *v == 1.0), "{r:?}");
        assert_eq!(evaluate_against_best(&g, &[]), Err(MetricError::NoGold));
    }

    #[test]
    fn oracle_examples() {
        let g = gold4();
        assert_eq!(optimal_alignment_score(&g, &g).unwrap(), 1.0);
        assert_eq!(optimal_alignment_score(&[], &[]).unwrap(), 1.0);
        let big: Vec<_> = (0..9).map(|i| t(&format!("s{i}"), Who, "x")).collect();
        assert_eq!(optimal_alignment_score(&big, &g), Err(MetricError::TooLarge(9)));
    }

    #[test]
    fn greedy_can_be_suboptimal() {
        // Greedy grabs the 0.9 cell and strands the rest.
        let m = vec![vec![0.9, 0.8], vec![0.7, 0.0]];
        let g: f64 = greedy(&m).iter().map(|c| c.2).sum();
        let mut used = vec![false; 2];
        let o = best_assignment(&m, 0, &mut used);
        assert!(close(g, 0.9));
        assert!(close(o, 1.5));
    }

    #[test]
    fn summarize_mean_and_std() {
        let a = AgreementReport {
            hard_f1: 0.2,
            ..Default::default()
        };
        let b = AgreementReport {
            hard_f1: 0.4,
            ..Default::default()
        };
        let (mean, std) = summarize(&[a, b]);
        assert!(close(mean.hard_f1, 0.3));
        assert!(close(std.hard_f1, 0.1));
        assert_eq!(summarize(&[]).0, AgreementReport::default());
    }

    #[test]
    fn corpus_report_csv() {
        let mut per_doc = std::collections::BTreeMap::new();
        per_doc.insert("d1".to_string(), AgreementReport::from_values([1.0; 11]));
        per_doc.insert("d2".to_string(), AgreementReport::default());
        let r = CorpusReport::from_docs(per_doc);
        assert_eq!(r.mean.hard_f1, 0.5);
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("doc_id,hard_p,"));
        assert!(lines[3].starts_with("mean,0.500000"));
        assert!(lines[4].starts_with("std,0.500000"));
        let back: CorpusReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
