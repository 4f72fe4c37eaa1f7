//! The work behind each subcommand, separated from argument parsing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use graphel_core::metrics::CorpusReport;
use graphel_core::records::{latest_sets, read_annotations, read_corpus, read_triple_sets, write_jsonl};
use graphel_core::render::{build_graph, emit_dot, emit_graph_json};
use graphel_core::stats::{histogram_csv, human_relation_histogram, relation_histogram, unmatched_ids};
use graphel_core::{
    AbstractDoc, AgreementReport, AnnotationSet, CorpusStats, Labeler, Pipeline, RelationLabel, Scorer, SummaryTriple,
    TripleSetRecord,
};
use rayon::prelude::*;

use crate::error::CliError;

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub struct ExtractOutcome {
    pub records: Vec<TripleSetRecord>,
    pub warnings: Vec<String>,
}

pub fn extract_corpus(docs: &[AbstractDoc], pipeline: &Pipeline) -> ExtractOutcome {
    let results: Vec<_> = docs
        .par_iter()
        .map(|d| (d.doc_id().to_string(), pipeline.extract(d)))
        .collect();
    let mut outcome = ExtractOutcome {
        records: Vec::with_capacity(results.len()),
        warnings: Vec::new(),
    };
    for (doc_id, ex) in results {
        outcome.warnings.extend(ex.warnings);
        outcome.records.push(TripleSetRecord {
            doc_id,
            triples: ex.triples,
        });
    }
    outcome
}

/// Reads a corpus file, runs the pipeline on every document and writes one
/// triple-set record per document, in corpus order.
pub fn extract(corpus: &Path, pipeline: &Pipeline, out: &Path) -> Result<ExtractOutcome, CliError> {
    let docs = read_corpus(corpus)?;
    let outcome = extract_corpus(&docs, pipeline);
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &outcome.records).map_err(|e| CliError::io(out, e))?;
    write_file(out, &buf)?;
    Ok(outcome)
}

/// Gold annotation sets per document, latest record per annotator.
pub fn load_gold(path: &Path) -> Result<BTreeMap<String, Vec<AnnotationSet>>, CliError> {
    Ok(latest_sets(&read_annotations(path)?))
}

pub fn load_predictions(path: &Path) -> Result<BTreeMap<String, Vec<SummaryTriple>>, CliError> {
    let mut out = BTreeMap::new();
    for r in read_triple_sets(path)? {
        if out.insert(r.doc_id.clone(), r.triples).is_some() {
            return Err(CliError::DuplicateDocId(r.doc_id));
        }
    }
    Ok(out)
}

/// Best-of-gold scores per document. Gold documents without a prediction
/// score zero in every family.
pub fn evaluate_sets(
    pred: &BTreeMap<String, Vec<SummaryTriple>>,
    gold: &BTreeMap<String, Vec<AnnotationSet>>,
    scorer: &Scorer,
) -> Result<CorpusReport, CliError> {
    if let Some(alien) = pred.keys().find(|k| !gold.contains_key(*k)) {
        return Err(CliError::UnknownDocId(alien.clone()));
    }
    let per_doc = gold
        .par_iter()
        .map(|(doc_id, golds)| {
            let report = match pred.get(doc_id) {
                Some(p) => scorer.evaluate_against_best(p, golds)?,
                None => AgreementReport::default(),
            };
            Ok((doc_id.clone(), report))
        })
        .collect::<Result<BTreeMap<_, _>, CliError>>()?;
    Ok(CorpusReport::from_docs(per_doc))
}

/// CSV at `path`, JSON next to it with a `.json` extension.
pub fn write_report(report: &CorpusReport, path: &Path) -> Result<PathBuf, CliError> {
    let json_path = if path.extension().is_some_and(|e| e == "json") {
        path.with_extension("report.json")
    } else {
        path.with_extension("json")
    };
    write_file(path, report.to_csv().as_bytes())?;
    write_file(&json_path, report.to_json().as_bytes())?;
    Ok(json_path)
}

pub fn evaluate(pred: &Path, gold: &Path, report: &Path, scorer: &Scorer) -> Result<CorpusReport, CliError> {
    let r = evaluate_sets(&load_predictions(pred)?, &load_gold(gold)?, scorer)?;
    write_report(&r, report)?;
    Ok(r)
}

/// Pairwise agreement per document with two or more annotators.
pub fn agreement_sets(gold: &BTreeMap<String, Vec<AnnotationSet>>, scorer: &Scorer) -> Result<CorpusReport, CliError> {
    let scored: Vec<(String, Result<AgreementReport, graphel_core::MetricError>)> = gold
        .par_iter()
        .map(|(doc_id, sets)| (doc_id.clone(), scorer.pairwise_agreement(sets)))
        .collect();
    let mut per_doc = BTreeMap::new();
    let mut skipped = Vec::new();
    for (doc_id, r) in scored {
        match r {
            Ok(r) => {
                per_doc.insert(doc_id, r);
            }
            Err(e) => skipped.push((doc_id, e.to_string())),
        }
    }
    if per_doc.is_empty() {
        return Err(CliError::NoPairs);
    }
    let mut report = CorpusReport::from_docs(per_doc);
    report.skipped = skipped;
    Ok(report)
}

pub fn agreement(gold: &Path, report: &Path, scorer: &Scorer) -> Result<CorpusReport, CliError> {
    let r = agreement_sets(&load_gold(gold)?, scorer)?;
    write_report(&r, report)?;
    Ok(r)
}

pub struct StatsOutcome {
    pub stats: CorpusStats,
    pub warnings: Vec<String>,
}

/// Statistics over documents present in both the corpus and the gold file.
pub fn stats(corpus: &Path, gold: &Path) -> Result<StatsOutcome, CliError> {
    let docs = read_corpus(corpus)?;
    let mut gold = load_gold(gold)?;
    let (only_corpus, only_gold) = unmatched_ids(docs.iter().map(|d| d.doc_id()), gold.keys().map(String::as_str));
    let mut warnings: Vec<String> = only_corpus
        .iter()
        .map(|d| format!("doc {d} has no annotations; skipped"))
        .collect();
    warnings.extend(
        only_gold
            .iter()
            .map(|d| format!("doc {d} is annotated but not in the corpus; skipped")),
    );
    let joined: Vec<(AbstractDoc, Vec<AnnotationSet>)> = docs
        .into_iter()
        .filter_map(|d| {
            let sets = gold.remove(d.doc_id())?;
            Some((d, sets))
        })
        .collect();
    Ok(StatsOutcome {
        stats: graphel_core::compute_stats(&joined),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    Graph,
}

pub fn render(triples: &Path, doc_id: &str, format: RenderFormat) -> Result<String, CliError> {
    let sets = load_predictions(triples)?;
    let set = sets
        .get(doc_id)
        .ok_or_else(|| CliError::UnknownDocId(doc_id.to_string()))?;
    let graph = build_graph(set);
    Ok(match format {
        RenderFormat::Dot => emit_dot(&graph),
        RenderFormat::Graph => emit_graph_json(&graph) + "\n",
    })
}

fn column_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Relation histograms as CSV, one column per input. Gold counts are
/// divided by the average number of annotators per document.
pub fn histogram(gold: Option<&Path>, preds: &[PathBuf], normalize: bool) -> Result<String, CliError> {
    let mut columns = Vec::new();
    if let Some(g) = gold {
        let sets: Vec<Vec<AnnotationSet>> = load_gold(g)?.into_values().collect();
        let mut hist = human_relation_histogram(&sets);
        if normalize {
            to_percent(&mut hist);
        }
        columns.push((column_name(g), hist));
    }
    for p in preds {
        let sets: Vec<Vec<SummaryTriple>> = load_predictions(p)?.into_values().collect();
        columns.push((column_name(p), relation_histogram(&sets, normalize)));
    }
    Ok(histogram_csv(&columns))
}

fn to_percent(hist: &mut BTreeMap<RelationLabel, f64>) {
    let total: f64 = hist.values().sum();
    if total > 0.0 {
        hist.values_mut().for_each(|v| *v *= 100.0 / total);
    }
}

/// Per-function precision against gold, as a `[lf_weights]` TOML table.
pub fn calibrate(corpus: &Path, gold: &Path, labeler: &Labeler) -> Result<String, CliError> {
    let docs = read_corpus(corpus)?;
    let mut gold = load_gold(gold)?;
    let joined: Vec<(AbstractDoc, Vec<AnnotationSet>)> = docs
        .into_iter()
        .filter_map(|d| {
            let sets = gold.remove(d.doc_id())?;
            Some((d, sets))
        })
        .collect();
    let weights = labeler.calibrate_weights(&joined);
    let mut table = toml::Table::new();
    table.insert(
        "lf_weights".into(),
        toml::Value::Table(weights.into_iter().map(|(k, v)| (k, toml::Value::Float(v))).collect()),
    );
    Ok(toml::to_string(&table).expect("weights serialize"))
}
