//! Line-delimited JSON records: corpus, annotation and triple-set files.
//!
//! Every file holds one JSON object per line. Blank lines are skipped.
//!
//! ```text
//! corpus:       {"doc_id":"d1","sentences":[["Laura","wins"]],"parses":["(S (NP (NNP Laura)) (VP (VBZ wins)))"],"coref":[[[0,0,1],[1,0,1]]]}
//! annotations:  {"doc_id":"d1","annotator_id":"a1","triples":[...],"flag_issue":false,"flag_title_redundant":false,"flag_uncertain":false,"timestamp":"2024-01-01T00:00:00Z"}
//! triple sets:  {"doc_id":"d1","triples":[{"source":"Laura","relation":"what_happens","target":"wins","source_spans":[[0,0,1]],"target_spans":[[0,1,2]]}]}
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AbstractDoc, AnnotationSet, CorefCluster, ModelError, QcFlags, SummaryTriple};
use crate::tree::parse_bracketed;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("reading {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}{}: {message}", doc_id.as_ref().map(|d| format!(" (doc {d})")).unwrap_or_default())]
    MalformedRecord {
        line: usize,
        doc_id: Option<String>,
        message: String,
    },
}

impl RecordError {
    pub fn line(&self) -> Option<usize> {
        match self {
            RecordError::MalformedRecord { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub doc_id: String,
    pub sentences: Vec<Vec<String>>,
    pub parses: Vec<String>,
    #[serde(default)]
    pub coref: Vec<CorefCluster>,
}

impl CorpusRecord {
    pub fn to_doc(&self) -> Result<AbstractDoc, String> {
        if self.parses.len() != self.sentences.len() {
            return Err(format!(
                "{} sentences but {} parse lines",
                self.sentences.len(),
                self.parses.len()
            ));
        }
        let trees = self
            .parses
            .iter()
            .enumerate()
            .map(|(i, p)| parse_bracketed(p).map_err(|e| format!("parse of sentence {i}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        AbstractDoc::new(&self.doc_id, self.sentences.clone(), trees, self.coref.clone()).map_err(|e| e.to_string())
    }

    pub fn from_doc(doc: &AbstractDoc) -> Self {
        CorpusRecord {
            doc_id: doc.doc_id().to_string(),
            sentences: doc.sentences().to_vec(),
            parses: doc.trees().iter().map(|t| t.to_bracketed()).collect(),
            coref: doc.coref().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub doc_id: String,
    pub annotator_id: String,
    pub triples: Vec<SummaryTriple>,
    #[serde(default)]
    pub flag_issue: bool,
    #[serde(default)]
    pub flag_title_redundant: bool,
    #[serde(default)]
    pub flag_uncertain: bool,
    #[serde(default)]
    pub timestamp: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A rejected annotation, pointing at the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("{field}: {message}")]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl AnnotationRecord {
    pub fn flags(&self) -> QcFlags {
        QcFlags {
            flag_issue: self.flag_issue,
            flag_title_redundant: self.flag_title_redundant,
            flag_uncertain: self.flag_uncertain,
        }
    }

    pub fn to_annotation_set(&self) -> Result<AnnotationSet, FieldError> {
        if self.annotator_id.trim().is_empty() {
            return Err(FieldError::new("annotator_id", "must not be empty"));
        }
        AnnotationSet::new(&self.doc_id, &self.annotator_id, self.triples.clone(), self.flags()).map_err(|e| match e {
            ModelError::TitleSpanWhileRedundant { index } => FieldError::new(
                format!("triples[{index}]"),
                "uses a span from sentence 0 while flag_title_redundant is set",
            ),
            other => FieldError::new("triples", other.to_string()),
        })
    }

    /// Full validation against the document the record annotates.
    pub fn validate_for(&self, doc: &AbstractDoc) -> Result<AnnotationSet, FieldError> {
        if self.doc_id != doc.doc_id() {
            return Err(FieldError::new(
                "doc_id",
                format!("{:?} does not match document {:?}", self.doc_id, doc.doc_id()),
            ));
        }
        for (i, t) in self.triples.iter().enumerate() {
            for (side, spans) in [("source_spans", t.source_spans()), ("target_spans", t.target_spans())] {
                if let Some(s) = spans.iter().find(|s| !doc.span_in_bounds(s)) {
                    return Err(FieldError::new(
                        format!("triples[{i}].{side}"),
                        format!("span {:?} is outside the document", <[usize; 3]>::from(*s)),
                    ));
                }
            }
        }
        self.to_annotation_set()
    }

    pub fn from_set(set: &AnnotationSet, timestamp: impl Into<String>) -> Self {
        let flags = set.flags();
        AnnotationRecord {
            doc_id: set.doc_id().to_string(),
            annotator_id: set.annotator_id().to_string(),
            triples: set.triples().to_vec(),
            flag_issue: flags.flag_issue,
            flag_title_redundant: flags.flag_title_redundant,
            flag_uncertain: flags.flag_uncertain,
            timestamp: timestamp.into(),
            note: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSetRecord {
    pub doc_id: String,
    pub triples: Vec<SummaryTriple>,
}

fn open(path: &Path) -> Result<BufReader<File>, RecordError> {
    File::open(path).map(BufReader::new).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => RecordError::FileNotFound(path.to_path_buf()),
        _ => RecordError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })
}

fn peek_doc_id(line: &str) -> Option<String> {
    serde_json::from_str::<serde_json::Value>(line)
        .ok()?
        .get("doc_id")?
        .as_str()
        .map(str::to_string)
}

/// Parses every nonblank line, pairing each value with its 1-based line number.
pub fn parse_jsonl<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<(usize, T)>, RecordError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| RecordError::MalformedRecord {
            line: line_no,
            doc_id: None,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| RecordError::MalformedRecord {
            line: line_no,
            doc_id: peek_doc_id(&line),
            message: e.to_string(),
        })?;
        out.push((line_no, value));
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>, RecordError> {
    let reader = open(path)?;
    parse_jsonl(reader).map_err(|e| match e {
        RecordError::Io { source, .. } => RecordError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn write_jsonl<T: Serialize>(mut out: impl Write, records: &[T]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn parse_corpus(reader: impl BufRead) -> Result<Vec<AbstractDoc>, RecordError> {
    parse_jsonl::<CorpusRecord>(reader)?
        .into_iter()
        .map(|(line, rec)| {
            rec.to_doc().map_err(|message| RecordError::MalformedRecord {
                line,
                doc_id: Some(rec.doc_id.clone()),
                message,
            })
        })
        .collect()
}

pub fn read_corpus(path: &Path) -> Result<Vec<AbstractDoc>, RecordError> {
    parse_corpus(open(path)?)
}

fn check_annotations(records: Vec<(usize, AnnotationRecord)>) -> Result<Vec<AnnotationRecord>, RecordError> {
    records
        .into_iter()
        .map(|(line, rec)| {
            rec.to_annotation_set().map_err(|e| RecordError::MalformedRecord {
                line,
                doc_id: Some(rec.doc_id.clone()),
                message: e.to_string(),
            })?;
            Ok(rec)
        })
        .collect()
}

pub fn read_annotations(path: &Path) -> Result<Vec<AnnotationRecord>, RecordError> {
    check_annotations(read_jsonl(path)?)
}

/// Reads an append-only annotation log. A final line without a trailing
/// newline that fails to parse is an interrupted write and is dropped.
pub fn read_annotation_log(path: &Path) -> Result<Vec<AnnotationRecord>, RecordError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => {
            return Err(RecordError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    let tail = &text[complete.len()..];
    let mut records = parse_jsonl::<AnnotationRecord>(complete.as_bytes())?;
    if !tail.trim().is_empty() {
        if let Ok(rec) = serde_json::from_str::<AnnotationRecord>(tail) {
            records.push((complete.lines().count() + 1, rec));
        } else {
            log::warn!("{}: ignoring partial trailing record", path.display());
        }
    }
    check_annotations(records)
}

pub fn read_triple_sets(path: &Path) -> Result<Vec<TripleSetRecord>, RecordError> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, r)| r).collect())
}

/// Groups annotation records by document, keeping the last record per
/// `(doc_id, annotator_id)`. Annotators are sorted by id.
pub fn latest_sets(records: &[AnnotationRecord]) -> BTreeMap<String, Vec<AnnotationSet>> {
    let mut latest: BTreeMap<(String, String), &AnnotationRecord> = BTreeMap::new();
    for r in records {
        latest.insert((r.doc_id.clone(), r.annotator_id.clone()), r);
    }
    let mut out: BTreeMap<String, Vec<AnnotationSet>> = BTreeMap::new();
    for ((doc, _), r) in latest {
        if let Ok(set) = r.to_annotation_set() {
            out.entry(doc).or_default().push(set);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RelationLabel, Span};

    const CORPUS: &str = r#"{"doc_id":"d1","sentences":[["Laura","wins"],["She","trained"]],"parses":["(S (NP (NNP Laura)) (VP (VBZ wins)))","(S (NP (PRP She)) (VP (VBD trained)))"],"coref":[[[0,0,1],[1,0,1]]]}

{"doc_id":"d2","sentences":[["Rain"]],"parses":["(NP (NN Rain))"]}
"#;

    #[test]
    fn corpus_parses_and_round_trips() {
        let docs = parse_corpus(CORPUS.as_bytes()).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].coref()[0].mentions().len(), 2);
        let rec = CorpusRecord::from_doc(&docs[0]);
        let again = rec.to_doc().unwrap();
        assert_eq!(again, docs[0]);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let bad = CORPUS.replace("(NN Rain))", "(NN Rain)");
        let err = parse_corpus(bad.as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(3));
        assert!(err.to_string().contains("d2"), "{err}");
        let err = parse_jsonl::<CorpusRecord>("{}\n".as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(1));
    }

    fn record(annotator: &str, redundant: bool, sent: usize) -> AnnotationRecord {
        let t = SummaryTriple::new(
            "Laura",
            RelationLabel::WhatHappens,
            "wins",
            vec![Span::new(sent, 0, 1).unwrap()],
            vec![Span::new(sent, 1, 2).unwrap()],
        )
        .unwrap();
        AnnotationRecord {
            doc_id: "d1".into(),
            annotator_id: annotator.into(),
            triples: vec![t],
            flag_issue: false,
            flag_title_redundant: redundant,
            flag_uncertain: false,
            timestamp: "2024-01-01T00:00:00Z".into(),
            note: None,
        }
    }

    #[test]
    fn annotation_validation() {
        let doc = &parse_corpus(CORPUS.as_bytes()).unwrap()[0];
        assert!(record("a", false, 0).validate_for(doc).is_ok());
        let err = record("a", true, 0).validate_for(doc).unwrap_err();
        assert_eq!(err.field, "triples[0]");
        let err = record("a", false, 5).validate_for(doc).unwrap_err();
        assert_eq!(err.field, "triples[0].source_spans");
        let err = record(" ", false, 0).validate_for(doc).unwrap_err();
        assert_eq!(err.field, "annotator_id");
    }

    #[test]
    fn canonical_relation_names_only() {
        let line =
            r#"{"doc_id":"d","annotator_id":"a","triples":[{"source":"x","relation":"what happened","target":"y"}]}"#;
        assert!(parse_jsonl::<AnnotationRecord>(line.as_bytes()).is_err());
        let ok = line.replace("what happened", "what_happened");
        assert_eq!(parse_jsonl::<AnnotationRecord>(ok.as_bytes()).unwrap().len(), 1);
    }

    #[test]
    fn latest_wins_per_annotator() {
        let mut newer = record("a", false, 1);
        newer.triples.clear();
        let sets = latest_sets(&[record("b", false, 1), record("a", false, 1), newer]);
        let d1 = &sets["d1"];
        assert_eq!(d1.len(), 2);
        assert_eq!(d1[0].annotator_id(), "a");
        assert!(d1[0].triples().is_empty());
    }

    #[test]
    fn log_ignores_partial_tail() {
        let dir = std::env::temp_dir().join(format!("graphel-records-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ann.jsonl");
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &[record("a", false, 1)]).unwrap();
        buf.extend_from_slice(br#"{"doc_id":"d1","annot"#);
        std::fs::write(&path, &buf).unwrap();
        let recs = read_annotation_log(&path).unwrap();
        assert_eq!(recs, vec![record("a", false, 1)]);
        assert!(read_annotation_log(&dir.join("missing.jsonl")).unwrap().is_empty());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn missing_file_is_reported() {
        let err = read_corpus(Path::new("/nonexistent/graphel.jsonl")).unwrap_err();
        assert!(matches!(err, RecordError::FileNotFound(_)));
    }
}
