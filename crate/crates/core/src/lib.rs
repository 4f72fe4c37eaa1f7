//! Relation-triple summaries of news abstracts.
//!
//! A summary is a set of `(source, relation, target)` triples over a closed
//! set of eight relations, drawn as a graph where coreferent sources share a
//! node. This crate reads constituency parses, extracts triples with
//! weak-supervision labeling functions, scores triple sets against human
//! annotations, computes corpus statistics and renders summary graphs.

pub mod candidates;
pub mod cues;
pub mod filter;
pub mod index;
pub mod labeler;
pub mod metrics;
pub mod model;
pub mod records;
pub mod render;
pub mod stats;
pub mod text;
pub mod tree;

pub use candidates::{generate_candidates, CandidatePair};
pub use filter::{dedupe_overlaps, extract_summary_triples, merge_coref, Orienter, Pipeline};
pub use labeler::{aggregate_votes, LabelVote, Labeler, LabelerConfig, Verdict};
pub use metrics::{
    evaluate_against_best, hard_prf, jaccard_scores, optimal_alignment_score, pairwise_agreement, soft_binary_prf,
    soft_greedy_f1, AgreementReport, CorpusReport, Jaccard, MetricError, Prf, Scorer, SoftWeights,
};
pub use model::{AbstractDoc, AnnotationSet, Constituent, CorefCluster, QcFlags, RelationLabel, Span, SummaryTriple};
pub use records::{AnnotationRecord, CorpusRecord, RecordError, TripleSetRecord};
pub use render::{build_graph, emit_dot, emit_graph_json, parse_graph_json, SummaryGraph};
pub use stats::{compute_stats, relation_histogram, CorpusStats};
pub use text::{normalize_phrase, phrase_tokens};
pub use tree::{extract_constituents, parse_bracketed, ParseTree};
