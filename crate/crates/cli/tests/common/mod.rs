#![allow(dead_code)]

use std::path::PathBuf;

use graphel_core::{parse_bracketed, AbstractDoc, CorefCluster, RelationLabel, Span, SummaryTriple};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

const NAMES: &[&str] = &["Laura", "Chelsea", "Apple", "Germany", "Dordrecht", "London", "Florida"];
const NOUNS: &[&str] = &["storm", "medal", "ark", "city", "team", "prices", "bridge", "mayor"];
const ADJS: &[&str] = &["golden", "new", "powerful", "full-scale", "local"];
const DETS: &[&str] = &["the", "a", "The", "A"];
const MONTHS: &[&str] = &["June", "March", "Monday", "Friday", "yesterday"];
const DAYS: &[&str] = &["7", "2012", "1999", "15"];
const PREPS: &[&str] = &["in", "on", "at", "of", "near", "after", "to", "because"];
const PAST: &[&str] = &["won", "hit", "opened", "collapsed", "praised", "found"];
const PRES: &[&str] = &["wins", "opens", "costs", "says"];
const BASE: &[&str] = &["attract", "win", "open", "visit"];
const PRONS: &[&str] = &["She", "It", "They", "he"];

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).expect("nonempty pool")
}

fn np<R: Rng>(rng: &mut R, depth: usize) -> String {
    let choices = if depth < 2 { 7 } else { 6 };
    match rng.random_range(0..choices) {
        0 => format!("(NP (NNP {}))", pick(rng, NAMES)),
        1 => format!("(NP (DT {}) (NN {}))", pick(rng, DETS), pick(rng, NOUNS)),
        2 => format!(
            "(NP (DT {}) (JJ {}) (NN {}))",
            pick(rng, DETS),
            pick(rng, ADJS),
            pick(rng, NOUNS)
        ),
        3 => format!("(NP (NNP {}) (CD {}))", pick(rng, MONTHS), pick(rng, DAYS)),
        4 => format!("(NP (PRP {}))", pick(rng, PRONS)),
        5 => format!("(NP (NN {}) (CC and) (NN {}))", pick(rng, NOUNS), pick(rng, NOUNS)),
        _ => format!("(NP {} {})", np(rng, depth + 1), pp(rng, depth + 1)),
    }
}

fn pp<R: Rng>(rng: &mut R, depth: usize) -> String {
    format!("(PP (IN {}) {})", pick(rng, PREPS), np(rng, depth))
}

fn vp<R: Rng>(rng: &mut R, depth: usize) -> String {
    match rng.random_range(0..6) {
        0 => format!("(VP (VBD {}) {})", pick(rng, PAST), np(rng, depth + 1)),
        1 => format!(
            "(VP (VBD {}) {} {})",
            pick(rng, PAST),
            np(rng, depth + 1),
            pp(rng, depth + 1)
        ),
        2 => format!("(VP (VBZ {}) {})", pick(rng, PRES), pp(rng, depth + 1)),
        3 => format!("(VP (MD will) (VP (VB {}) {}))", pick(rng, BASE), np(rng, depth + 1)),
        4 if depth == 0 => format!(
            "(VP (VBD {}) (SBAR (IN because) {}))",
            pick(rng, PAST),
            sentence(rng, depth + 1)
        ),
        _ => format!("(VP (VBD {}))", pick(rng, PAST)),
    }
}

fn sentence<R: Rng>(rng: &mut R, depth: usize) -> String {
    if depth == 0 && rng.random_bool(0.25) {
        format!("(S {} (, ,) {} {} (. .))", pp(rng, 1), np(rng, 1), vp(rng, 0))
    } else if depth == 0 {
        format!("(S {} {} (. .))", np(rng, 0), vp(rng, 0))
    } else {
        format!("(S {} {})", np(rng, depth), vp(rng, depth))
    }
}

/// A random document of one to four parsed sentences, sometimes with a
/// coreference cluster over noun phrases.
pub fn random_doc<R: Rng>(rng: &mut R, doc_id: &str) -> AbstractDoc {
    let n = rng.random_range(1..=4);
    let trees = (0..n)
        .map(|_| parse_bracketed(&sentence(rng, 0)).expect("generated parse is valid"))
        .collect();
    let bare = AbstractDoc::from_trees(doc_id, trees, vec![]).expect("generated doc is valid");
    let nps: Vec<Span> = bare
        .constituents()
        .into_iter()
        .flatten()
        .filter(|c| c.label == "NP")
        .map(|c| c.span)
        .collect();
    let mut coref = Vec::new();
    if nps.len() >= 2 && rng.random_bool(0.6) {
        let mut mentions: Vec<Span> = Vec::new();
        for _ in 0..rng.random_range(2..=3) {
            let s = *nps.choose(rng).expect("nonempty");
            if mentions.iter().all(|m| !m.overlaps(&s)) {
                mentions.push(s);
            }
        }
        if mentions.len() >= 2 {
            coref.push(CorefCluster::new(mentions).expect("nonempty cluster"));
        }
    }
    AbstractDoc::new(doc_id, bare.sentences().to_vec(), bare.trees().to_vec(), coref).expect("valid coref")
}

const WORDS: &[&str] = &[
    "laura", "won", "medal", "golden", "the", "germany", "in", "june", "storm", "hit", "city", "2012",
];

fn phrase<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(1..=3);
    (0..n).map(|_| pick(rng, WORDS)).collect::<Vec<_>>().join(" ")
}

pub fn random_triple<R: Rng>(rng: &mut R) -> SummaryTriple {
    let r = RelationLabel::ALL[rng.random_range(0..8)];
    SummaryTriple::from_text(phrase(rng), r, phrase(rng)).expect("nonempty phrases")
}

pub fn random_set<R: Rng>(rng: &mut R, max: usize) -> Vec<SummaryTriple> {
    let n = rng.random_range(0..=max);
    (0..n).map(|_| random_triple(rng)).collect()
}
