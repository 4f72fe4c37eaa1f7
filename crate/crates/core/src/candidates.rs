//! Candidate constituent pairs for relation labeling.
//!
//! All constituents of a document are combined pairwise, after dropping
//! single-token `IN`/`DT`/`CC` constituents and constituents made only of
//! special tokens. Overlapping constituents never pair, and paired
//! constituents are at most two sentences apart.

use serde::{Deserialize, Serialize};

use crate::model::{AbstractDoc, Constituent};
use crate::text::is_special_token;

pub const MAX_SENTENCE_DISTANCE: usize = 2;
const DROPPED_SINGLE_TOKEN_TAGS: [&str; 3] = ["IN", "DT", "CC"];

/// Two non-overlapping constituents, `a` before `b` in document order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub a: Constituent,
    pub b: Constituent,
    pub sent_distance: usize,
}

/// Whether a constituent may take part in any pair.
pub fn is_pairable(c: &Constituent) -> bool {
    if c.span.len() == 1 && DROPPED_SINGLE_TOKEN_TAGS.contains(&c.base_label()) {
        return false;
    }
    !c.text.split(' ').all(is_special_token)
}

/// Surviving constituents sorted by span, ties in preorder.
pub fn pairable_constituents(doc: &AbstractDoc) -> Vec<Constituent> {
    let mut out: Vec<Constituent> = doc.constituents().into_iter().flatten().filter(is_pairable).collect();
    out.sort_by(|x, y| x.span.doc_order(&y.span).then(x.node_id.cmp(&y.node_id)));
    out
}

pub fn generate_candidates(doc: &AbstractDoc) -> Vec<CandidatePair> {
    let constituents = pairable_constituents(doc);
    let mut pairs = Vec::new();
    for (i, a) in constituents.iter().enumerate() {
        for b in &constituents[i + 1..] {
            let sent_distance = b.span.sent_index - a.span.sent_index;
            // Sorted by sentence, so nothing further on can be closer.
            if sent_distance > MAX_SENTENCE_DISTANCE {
                break;
            }
            if a.span.overlaps(&b.span) {
                continue;
            }
            pairs.push(CandidatePair {
                a: a.clone(),
                b: b.clone(),
                sent_distance,
            });
        }
    }
    pairs
}
