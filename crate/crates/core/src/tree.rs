//! Reader for bracketed (Penn Treebank style) constituency trees.
//!
//! Trees come one per line from an external constituency parser, e.g.
//! `(S (NP (NNP Laura)) (VP (VBD won)))`. Preterminals are represented as
//! childless nodes carrying their token, so `(NNP Laura)` is a single node
//! with label `NNP` and leaf token `Laura`. A PTB-style unlabeled outer
//! bracket, `( (S ...) )`, is unwrapped.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Constituent, Span};

const ESCAPES: [(&str, &str); 6] = [
    ("-LRB-", "("),
    ("-RRB-", ")"),
    ("-LSB-", "["),
    ("-RSB-", "]"),
    ("-LCB-", "{"),
    ("-RCB-", "}"),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("unbalanced brackets at byte {position}")]
    UnbalancedBrackets { position: usize },
    #[error("empty node at byte {position}")]
    EmptyNode { position: usize },
    #[error("trailing input at byte {position}")]
    TrailingInput { position: usize },
    #[error("malformed tree at byte {position}: {message}")]
    Malformed { position: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub leaf_token: Option<String>,
}

impl ParseTree {
    pub fn leaf(label: impl Into<String>, token: impl Into<String>) -> Self {
        ParseTree {
            label: label.into(),
            children: Vec::new(),
            leaf_token: Some(token.into()),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        ParseTree {
            label: label.into(),
            children,
            leaf_token: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Tokens at the leaves, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.leaf_token {
            Some(tok) => out.push(tok),
            None => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Preterminal labels (POS tags), aligned with [`ParseTree::leaves`].
    pub fn pos_tags(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_tags(&mut out);
        out
    }

    fn collect_tags<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.is_leaf() {
            out.push(&self.label);
        } else {
            self.children.iter().for_each(|c| c.collect_tags(out));
        }
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(ParseTree::leaf_count).sum()
        }
    }

    /// Bracketed form with bracket characters in tokens re-escaped.
    pub fn to_bracketed(&self) -> String {
        let mut out = String::new();
        self.write_bracketed(&mut out);
        out
    }

    fn write_bracketed(&self, out: &mut String) {
        out.push('(');
        out.push_str(&self.label);
        match &self.leaf_token {
            Some(tok) => {
                out.push(' ');
                out.push_str(&escape_token(tok));
            }
            None => {
                for child in &self.children {
                    out.push(' ');
                    child.write_bracketed(out);
                }
            }
        }
        out.push(')');
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracketed())
    }
}

fn escape_token(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    for c in token.chars() {
        match ESCAPES.iter().find(|(_, raw)| raw.starts_with(c)) {
            Some((esc, _)) => out.push_str(esc),
            None => out.push(c),
        }
    }
    out
}

fn unescape_token(token: &str) -> String {
    let mut out = token.to_string();
    for (esc, raw) in ESCAPES {
        if out.contains(esc) {
            out = out.replace(esc, raw);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(text: &str) -> Vec<(usize, Lexeme<'_>)> {
    let mut out = Vec::new();
    let mut atom_start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(start) = atom_start.take() {
                out.push((start, Lexeme::Atom(&text[start..i])));
            }
            match c {
                '(' => out.push((i, Lexeme::Open)),
                ')' => out.push((i, Lexeme::Close)),
                _ => {}
            }
        } else if atom_start.is_none() {
            atom_start = Some(i);
        }
    }
    if let Some(start) = atom_start {
        out.push((start, Lexeme::Atom(&text[start..])));
    }
    out
}

struct Parser<'a> {
    lexemes: Vec<(usize, Lexeme<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Lexeme<'a>)> {
        self.lexemes.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map(|(o, _)| *o).unwrap_or(self.end)
    }

    /// Parses one bracketed node; the cursor sits on its opening bracket.
    fn node(&mut self) -> Result<ParseTree, TreeError> {
        let open_at = self.offset();
        self.pos += 1;
        let label = match self.peek() {
            Some((_, Lexeme::Atom(a))) => {
                let a = a.to_string();
                self.pos += 1;
                Some(a)
            }
            Some((_, Lexeme::Close)) => return Err(TreeError::EmptyNode { position: open_at }),
            Some((_, Lexeme::Open)) => None,
            None => return Err(TreeError::UnbalancedBrackets { position: self.end }),
        };

        let mut children = Vec::new();
        let mut token: Option<String> = None;
        loop {
            let at = self.offset();
            match self.peek() {
                None => return Err(TreeError::UnbalancedBrackets { position: self.end }),
                Some((_, Lexeme::Close)) => {
                    self.pos += 1;
                    break;
                }
                Some((_, Lexeme::Open)) => {
                    if token.is_some() {
                        return Err(malformed(at, "subtree after leaf token"));
                    }
                    children.push(self.node()?);
                }
                Some((_, Lexeme::Atom(a))) => {
                    if token.is_some() {
                        return Err(malformed(at, "more than one token under a preterminal"));
                    }
                    if !children.is_empty() {
                        return Err(malformed(at, "token mixed with subtrees"));
                    }
                    token = Some(unescape_token(a));
                    self.pos += 1;
                }
            }
        }

        match (label, token) {
            (Some(label), Some(tok)) => Ok(ParseTree::leaf(label, tok)),
            (Some(label), None) if !children.is_empty() => Ok(ParseTree::node(label, children)),
            (Some(_), None) => Err(TreeError::EmptyNode { position: open_at }),
            // Unlabeled wrapper around a single tree, as written by PTB tools.
            (None, _) if children.len() == 1 => Ok(children.pop().expect("one child")),
            (None, _) => Err(malformed(open_at, "unlabeled node")),
        }
    }
}

fn malformed(position: usize, message: &str) -> TreeError {
    TreeError::Malformed {
        position,
        message: message.to_string(),
    }
}

/// Parses a single bracketed tree.
pub fn parse_bracketed(text: &str) -> Result<ParseTree, TreeError> {
    let mut parser = Parser {
        lexemes: lex(text),
        pos: 0,
        end: text.len(),
    };
    let tree = match parser.peek() {
        Some((_, Lexeme::Open)) => parser.node()?,
        Some((at, Lexeme::Close)) => return Err(TreeError::UnbalancedBrackets { position: *at }),
        Some((at, Lexeme::Atom(_))) => return Err(malformed(*at, "expected '('")),
        None => return Err(malformed(0, "empty input")),
    };
    match parser.peek() {
        None => Ok(tree),
        Some((at, Lexeme::Close)) => Err(TreeError::UnbalancedBrackets { position: *at }),
        Some((at, _)) => Err(TreeError::TrailingInput { position: *at }),
    }
}

/// One constituent per node in preorder, preterminals included.
pub fn extract_constituents(tree: &ParseTree, sent_index: usize) -> Vec<Constituent> {
    let tokens = tree.leaves();
    let mut out = Vec::new();
    let mut next_leaf = 0;
    walk(tree, sent_index, &tokens, &mut next_leaf, &mut out);
    out
}

fn walk(node: &ParseTree, sent_index: usize, tokens: &[&str], next_leaf: &mut usize, out: &mut Vec<Constituent>) {
    let slot = out.len();
    let start = *next_leaf;
    // Reserve the preorder slot, fill in the span once children are walked.
    out.push(Constituent {
        span: Span {
            sent_index,
            start,
            end: start + 1,
        },
        label: node.label.clone(),
        node_id: slot,
        text: String::new(),
    });
    if node.is_leaf() {
        *next_leaf += 1;
    } else {
        for child in &node.children {
            walk(child, sent_index, tokens, next_leaf, out);
        }
    }
    let end = *next_leaf;
    out[slot].span.end = end;
    out[slot].text = tokens[start..end].join(" ");
}
