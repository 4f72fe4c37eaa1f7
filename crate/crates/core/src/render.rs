//! Graph view of a triple set: merged source nodes, labeled edges.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{RelationLabel, SummaryTriple};
use crate::text::normalize_phrase;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphNode {
    pub id: usize,
    pub text: String,
    /// Has outgoing edges; drawn bold and underlined.
    pub has_outgoing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub relation: RelationLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SummaryGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("graph json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown relation label {0:?}")]
    UnknownRelation(String),
    #[error("edge {index} refers to missing node {node}")]
    DanglingEdge { index: usize, node: usize },
    #[error("duplicate node id {0}")]
    DuplicateNode(usize),
}

/// Sources sharing normalized text become one node. A target joins a node
/// only when its text is also some triple's source; other targets each get
/// their own node. Nodes are numbered by first appearance.
pub fn build_graph(triples: &[SummaryTriple]) -> SummaryGraph {
    let sources: HashSet<String> = triples.iter().map(|t| normalize_phrase(t.source_text())).collect();
    let mut graph = SummaryGraph::default();
    let mut by_text: HashMap<String, usize> = HashMap::new();
    let mut entity = |graph: &mut SummaryGraph, text: &str| -> usize {
        let key = normalize_phrase(text);
        *by_text.entry(key).or_insert_with(|| push_node(graph, text, true))
    };
    for t in triples {
        let from = entity(&mut graph, t.source_text());
        let to = if sources.contains(&normalize_phrase(t.target_text())) {
            entity(&mut graph, t.target_text())
        } else {
            push_node(&mut graph, t.target_text(), false)
        };
        graph.edges.push(GraphEdge {
            from,
            to,
            relation: t.relation(),
        });
    }
    graph
}

fn push_node(graph: &mut SummaryGraph, text: &str, has_outgoing: bool) -> usize {
    let id = graph.nodes.len();
    graph.nodes.push(GraphNode {
        id,
        text: text.to_string(),
        has_outgoing,
    });
    id
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn html_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

pub fn emit_dot(graph: &SummaryGraph) -> String {
    let mut out = String::from("digraph summary {\n");
    for n in &graph.nodes {
        let label = if n.has_outgoing {
            format!("<<B><U>{}</U></B>>", html_escape(&n.text))
        } else {
            quote(&n.text)
        };
        let _ = writeln!(out, "  n{} [label={label}];", n.id);
    }
    for e in &graph.edges {
        let _ = writeln!(
            out,
            "  n{} -> n{} [label={}];",
            e.from,
            e.to,
            quote(e.relation.display_name())
        );
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireNode {
    pub id: usize,
    pub text: String,
    pub bold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireEdge {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

/// The graph as exchanged with the annotation UI.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WireGraph {
    pub nodes: Vec<WireNode>,
    pub edges: Vec<WireEdge>,
}

impl From<&SummaryGraph> for WireGraph {
    fn from(g: &SummaryGraph) -> Self {
        WireGraph {
            nodes: g
                .nodes
                .iter()
                .map(|n| WireNode {
                    id: n.id,
                    text: n.text.clone(),
                    bold: n.has_outgoing,
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| WireEdge {
                    from: e.from,
                    to: e.to,
                    label: e.relation.display_name().to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<WireGraph> for SummaryGraph {
    type Error = RenderError;

    fn try_from(w: WireGraph) -> Result<Self, Self::Error> {
        let mut ids = HashSet::new();
        for n in &w.nodes {
            if !ids.insert(n.id) {
                return Err(RenderError::DuplicateNode(n.id));
            }
        }
        let mut edges = Vec::with_capacity(w.edges.len());
        for (index, e) in w.edges.into_iter().enumerate() {
            for node in [e.from, e.to] {
                if !ids.contains(&node) {
                    return Err(RenderError::DanglingEdge { index, node });
                }
            }
            let relation = e
                .label
                .parse()
                .map_err(|_| RenderError::UnknownRelation(e.label.clone()))?;
            edges.push(GraphEdge {
                from: e.from,
                to: e.to,
                relation,
            });
        }
        Ok(SummaryGraph {
            nodes: w
                .nodes
                .into_iter()
                .map(|n| GraphNode {
                    id: n.id,
                    text: n.text,
                    has_outgoing: n.bold,
                })
                .collect(),
            edges,
        })
    }
}

pub fn emit_graph_json(graph: &SummaryGraph) -> String {
    serde_json::to_string(&WireGraph::from(graph)).expect("wire graph serializes")
}

pub fn parse_graph_json(s: &str) -> Result<SummaryGraph, RenderError> {
    serde_json::from_str::<WireGraph>(s)?.try_into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use RelationLabel::*;

    fn t(s: &str, r: RelationLabel, g: &str) -> SummaryTriple {
        SummaryTriple::from_text(s, r, g).unwrap()
    }

    #[test]
    fn merges_shared_source() {
        let g = build_graph(&[
            t("Laura", WhatHappened, "trained really hard"),
            t("Laura", WhatHappened, "won a golden medal"),
        ]);
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.edges.len(), 2);
        assert!(g.edges.iter().all(|e| e.from == 0));
        assert!(g.nodes[0].has_outgoing);
        assert!(!g.nodes[1].has_outgoing);
    }

    #[test]
    fn chains_through_shared_node() {
        let triples = [t("the ark", Where, "Dordrecht"), t("Dordrecht", What, "a city")];
        let g = build_graph(&triples);
        // Set arithmetic: sources {ark, dordrecht} plus targets not among them {a city}.
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.edges[0].to, g.edges[1].from);
        assert!(g.nodes[1].has_outgoing);
    }

    #[test]
    fn target_duplicates_stay_apart() {
        let g = build_graph(&[t("a", Who, "x"), t("b", Who, "x")]);
        assert_eq!(g.nodes.len(), 4);
    }

    #[test]
    fn dot_output() {
        assert_eq!(emit_dot(&SummaryGraph::default()), "digraph summary {\n}\n");
        let g = build_graph(&[t("the ark", Where, "in Dordrecht")]);
        let dot = emit_dot(&g);
        assert_eq!(dot.matches("label=\"where\"").count(), 1);
        assert!(dot.contains("<<B><U>the ark</U></B>>"));
        assert_eq!(dot, emit_dot(&g));
        let g = build_graph(&[t("a <b> & \"c\"", WhatHappened, "say \"hi\"")]);
        let dot = emit_dot(&g);
        assert!(dot.contains("a &lt;b&gt; &amp; &quot;c&quot;"));
        assert!(dot.contains(r#""say \"hi\"""#));
        assert!(dot.contains("label=\"what happened\""));
    }

    #[test]
    fn wire_round_trip() {
        assert_eq!(emit_graph_json(&SummaryGraph::default()), r#"{"nodes":[],"edges":[]}"#);
        let g = build_graph(&[t("Laura", WhatHappened, "won"), t("won", When, "in 2012")]);
        let json = emit_graph_json(&g);
        assert_eq!(parse_graph_json(&json).unwrap(), g);
        assert!(json.contains(r#""label":"what happened""#));
        let bad = r#"{"nodes":[{"id":0,"text":"a","bold":true}],"edges":[{"from":0,"to":3,"label":"who"}]}"#;
        assert!(matches!(
            parse_graph_json(bad),
            Err(RenderError::DanglingEdge { node: 3, .. })
        ));
    }
}
