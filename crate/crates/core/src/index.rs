//! Tree-structure lookups over a document: parents, children, POS tags.

use crate::model::{base_label, AbstractDoc, Constituent, Span};
use crate::tree::{extract_constituents, ParseTree};

#[derive(Debug, Clone)]
pub struct NodeInfo {
    pub constituent: Constituent,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SentenceIndex {
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
    pub nodes: Vec<NodeInfo>,
}

impl SentenceIndex {
    pub fn new(tree: &ParseTree, sent_index: usize) -> Self {
        let constituents = extract_constituents(tree, sent_index);
        let mut nodes: Vec<NodeInfo> = constituents
            .into_iter()
            .map(|c| NodeInfo {
                constituent: c,
                parent: None,
                children: Vec::new(),
            })
            .collect();
        let mut next = 0;
        link(tree, None, &mut next, &mut nodes);
        SentenceIndex {
            tokens: tree.leaves().into_iter().map(str::to_string).collect(),
            tags: tree.pos_tags().into_iter().map(str::to_string).collect(),
            nodes,
        }
    }
}

fn link(tree: &ParseTree, parent: Option<usize>, next: &mut usize, nodes: &mut [NodeInfo]) {
    let me = *next;
    *next += 1;
    nodes[me].parent = parent;
    if let Some(p) = parent {
        nodes[p].children.push(me);
    }
    for child in &tree.children {
        link(child, Some(me), next, nodes);
    }
}

/// Per-sentence structure of a whole document.
#[derive(Debug, Clone)]
pub struct DocIndex {
    pub sentences: Vec<SentenceIndex>,
}

impl DocIndex {
    pub fn new(doc: &AbstractDoc) -> Self {
        DocIndex {
            sentences: doc
                .trees()
                .iter()
                .enumerate()
                .map(|(i, t)| SentenceIndex::new(t, i))
                .collect(),
        }
    }

    pub fn node(&self, c: &Constituent) -> Option<&NodeInfo> {
        self.sentences
            .get(c.span.sent_index)?
            .nodes
            .get(c.node_id)
            .filter(|n| n.constituent.span == c.span)
    }

    pub fn parent(&self, c: &Constituent) -> Option<&NodeInfo> {
        let parent = self.node(c)?.parent?;
        self.sentences[c.span.sent_index].nodes.get(parent)
    }

    pub fn tags(&self, span: &Span) -> &[String] {
        self.sentences
            .get(span.sent_index)
            .and_then(|s| s.tags.get(span.start..span.end))
            .unwrap_or(&[])
    }

    pub fn tokens(&self, span: &Span) -> &[String] {
        self.sentences
            .get(span.sent_index)
            .and_then(|s| s.tokens.get(span.start..span.end))
            .unwrap_or(&[])
    }

    /// Label of the topmost constituent whose span equals `span` exactly.
    pub fn label_of(&self, span: &Span) -> Option<&str> {
        self.sentences
            .get(span.sent_index)?
            .nodes
            .iter()
            .find(|n| n.constituent.span == *span)
            .map(|n| base_label(&n.constituent.label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_bracketed;

    #[test]
    fn links_parents_and_children() {
        let t = parse_bracketed("(S (NP (NNP Laura)) (VP (VBD won) (NP (DT a) (NN medal))))").unwrap();
        let doc = AbstractDoc::from_trees("d", vec![t], vec![]).unwrap();
        let idx = DocIndex::new(&doc);
        let s = &idx.sentences[0];
        assert_eq!(s.nodes[0].children, vec![1, 3]);
        assert_eq!(s.nodes[3].children, vec![4, 5]);
        assert_eq!(s.nodes[5].parent, Some(3));
        assert_eq!(s.tags, vec!["NNP", "VBD", "DT", "NN"]);
        let np = &s.nodes[5].constituent;
        assert_eq!(idx.parent(np).unwrap().constituent.label, "VP");
        assert_eq!(idx.label_of(&Span::new(0, 0, 1).unwrap()), Some("NP"));
        assert_eq!(idx.label_of(&Span::new(0, 1, 2).unwrap()), Some("VBD"));
        assert_eq!(idx.label_of(&Span::new(0, 0, 3).unwrap()), None);
    }
}
