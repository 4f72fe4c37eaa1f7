//! Corpus statistics and relation histograms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{AbstractDoc, AnnotationSet, RelationLabel, SummaryTriple};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CountShare {
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_docs: usize,
    pub n_docs_three_annotations: usize,
    pub n_docs_two_annotations: usize,
    /// Number of documents keyed by how many annotation sets they have.
    pub annotation_count_breakdown: BTreeMap<usize, usize>,
    pub n_annotation_sets: usize,
    pub n_triples: usize,
    /// Mean and population std of triples per annotation set.
    pub avg_triples_per_doc: f64,
    pub std_triples_per_doc: f64,
    pub title_redundant_majority: CountShare,
    pub relation_counts: BTreeMap<RelationLabel, CountShare>,
}

fn percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

/// Strict majority of the document's annotation sets flag the title as redundant.
pub fn title_redundant_by_majority(sets: &[AnnotationSet]) -> bool {
    let yes = sets.iter().filter(|s| s.flags().flag_title_redundant).count();
    2 * yes > sets.len()
}

pub fn compute_stats(corpus: &[(AbstractDoc, Vec<AnnotationSet>)]) -> CorpusStats {
    let mut stats = CorpusStats {
        n_docs: corpus.len(),
        ..Default::default()
    };
    let mut sizes = Vec::new();
    let mut relations: BTreeMap<RelationLabel, usize> = RelationLabel::ALL.iter().map(|&r| (r, 0)).collect();
    let mut redundant = 0;
    for (_, sets) in corpus {
        *stats.annotation_count_breakdown.entry(sets.len()).or_default() += 1;
        if title_redundant_by_majority(sets) {
            redundant += 1;
        }
        for set in sets {
            sizes.push(set.triples().len());
            for t in set.triples() {
                *relations.get_mut(&t.relation()).expect("all labels seeded") += 1;
            }
        }
    }
    stats.n_docs_three_annotations = stats.annotation_count_breakdown.get(&3).copied().unwrap_or(0);
    stats.n_docs_two_annotations = stats.annotation_count_breakdown.get(&2).copied().unwrap_or(0);
    stats.n_annotation_sets = sizes.len();
    stats.n_triples = sizes.iter().sum();
    if !sizes.is_empty() {
        let n = sizes.len() as f64;
        let mean = stats.n_triples as f64 / n;
        let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / n;
        stats.avg_triples_per_doc = mean;
        stats.std_triples_per_doc = var.sqrt();
    }
    stats.title_redundant_majority = CountShare {
        count: redundant,
        percent: percent(redundant, stats.n_docs),
    };
    stats.relation_counts = relations
        .into_iter()
        .map(|(r, c)| {
            (
                r,
                CountShare {
                    count: c,
                    percent: percent(c, stats.n_triples),
                },
            )
        })
        .collect();
    stats
}

/// Relation counts summed over triple sets, optionally as percentages.
pub fn relation_histogram(triple_sets: &[Vec<SummaryTriple>], normalize: bool) -> BTreeMap<RelationLabel, f64> {
    let mut counts: BTreeMap<RelationLabel, f64> = RelationLabel::ALL.iter().map(|&r| (r, 0.0)).collect();
    for set in triple_sets {
        for t in set {
            *counts.get_mut(&t.relation()).expect("all labels seeded") += 1.0;
        }
    }
    let total: f64 = counts.values().sum();
    if normalize && total > 0.0 {
        for v in counts.values_mut() {
            *v *= 100.0 / total;
        }
    }
    counts
}

/// Histogram of human annotations: raw counts divided by the average number
/// of annotation sets per document.
pub fn human_relation_histogram(corpus: &[Vec<AnnotationSet>]) -> BTreeMap<RelationLabel, f64> {
    let sets: Vec<Vec<SummaryTriple>> = corpus.iter().flatten().map(|s| s.triples().to_vec()).collect();
    let mut hist = relation_histogram(&sets, false);
    let docs = corpus.iter().filter(|d| !d.is_empty()).count();
    if docs > 0 {
        let per_doc = sets.len() as f64 / docs as f64;
        for v in hist.values_mut() {
            *v /= per_doc;
        }
    }
    hist
}

/// The label with the largest value; ties go to the earlier label.
pub fn modal_label(hist: &BTreeMap<RelationLabel, f64>) -> Option<RelationLabel> {
    let mut best: Option<(RelationLabel, f64)> = None;
    for r in RelationLabel::ALL {
        let v = hist.get(&r).copied().unwrap_or(0.0);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((r, v));
        }
    }
    best.filter(|(_, v)| *v > 0.0).map(|(r, _)| r)
}

pub fn histogram_csv(columns: &[(String, BTreeMap<RelationLabel, f64>)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["relation".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.clone()));
    w.write_record(&header).expect("in-memory write");
    for r in RelationLabel::ALL {
        let mut row = vec![r.as_str().to_string()];
        row.extend(
            columns
                .iter()
                .map(|(_, h)| format!("{:.4}", h.get(&r).copied().unwrap_or(0.0))),
        );
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

impl CorpusStats {
    /// Plain-text table with one row per statistic.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut row = |name: &str, value: String, pct: String| {
            let _ = writeln!(out, "{name:<28} {value:>14} {pct:>8}");
        };
        row("Statistic", "Value".into(), "%".into());
        row("# Documents", self.n_docs.to_string(), "-".into());
        row(
            "# Three annotations",
            self.n_docs_three_annotations.to_string(),
            "-".into(),
        );
        row("# Two annotations", self.n_docs_two_annotations.to_string(), "-".into());
        for (k, v) in &self.annotation_count_breakdown {
            if *k != 2 && *k != 3 {
                row(&format!("# {k} annotations"), v.to_string(), "-".into());
            }
        }
        row("# Triples", self.n_triples.to_string(), "-".into());
        row(
            "Triples per document",
            format!("{:.2} ± {:.2}", self.avg_triples_per_doc, self.std_triples_per_doc),
            "-".into(),
        );
        row(
            "Title redundant (majority)",
            self.title_redundant_majority.count.to_string(),
            format!("{:.1}", self.title_redundant_majority.percent),
        );
        for (r, c) in &self.relation_counts {
            row(
                &format!("Relation: {}", r.display_name()),
                c.count.to_string(),
                format!("{:.2}", c.percent),
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut put = |k: &str, v: String, p: String| w.write_record([k, &v, &p]).expect("in-memory write");
        put("statistic", "value".into(), "percent".into());
        put("n_docs", self.n_docs.to_string(), String::new());
        put(
            "n_docs_three_annotations",
            self.n_docs_three_annotations.to_string(),
            String::new(),
        );
        put(
            "n_docs_two_annotations",
            self.n_docs_two_annotations.to_string(),
            String::new(),
        );
        for (k, v) in &self.annotation_count_breakdown {
            put(&format!("n_docs_{k}_annotations_exact"), v.to_string(), String::new());
        }
        put("n_annotation_sets", self.n_annotation_sets.to_string(), String::new());
        put("n_triples", self.n_triples.to_string(), String::new());
        put(
            "avg_triples_per_doc",
            format!("{:.4}", self.avg_triples_per_doc),
            String::new(),
        );
        put(
            "std_triples_per_doc",
            format!("{:.4}", self.std_triples_per_doc),
            String::new(),
        );
        put(
            "title_redundant_majority",
            self.title_redundant_majority.count.to_string(),
            format!("{:.4}", self.title_redundant_majority.percent),
        );
        for (r, c) in &self.relation_counts {
            put(
                &format!("relation_{}", r.as_str()),
                c.count.to_string(),
                format!("{:.4}", c.percent),
            );
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Doc ids present on only one side of a corpus/annotation join.
pub fn unmatched_ids<'a>(
    corpus: impl IntoIterator<Item = &'a str>,
    gold: impl IntoIterator<Item = &'a str>,
) -> (Vec<String>, Vec<String>) {
    let c: BTreeSet<&str> = corpus.into_iter().collect();
    let g: BTreeSet<&str> = gold.into_iter().collect();
    (
        c.difference(&g).map(|s| s.to_string()).collect(),
        g.difference(&c).map(|s| s.to_string()).collect(),
    )
}
