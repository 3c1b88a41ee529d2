//! AMR graphs, PENMAN notation and the triple view used for scoring.
//!
//! An [`AmrGraph`] is always valid once constructed: variables are unique,
//! the root exists, every node is reachable from the root, and the edge list
//! contains no directed cycle. Edges are kept in depth-first order from the
//! root, with the relative order of a node's outgoing edges preserved, so two
//! graphs compare equal exactly when they serialize to the same PENMAN text.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Relation label on an AMR edge.
///
/// The six annotated labels get their own variants; anything else read from a
/// foreign corpus is kept verbatim in [`EdgeLabel::Other`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    Arg0,
    Arg1,
    Name,
    Time,
    Location,
    Mod,
    Other(String),
}

impl EdgeLabel {
    /// The closed label set, in class-index order.
    pub const CLOSED: [EdgeLabel; 6] = [
        EdgeLabel::Arg0,
        EdgeLabel::Arg1,
        EdgeLabel::Name,
        EdgeLabel::Time,
        EdgeLabel::Location,
        EdgeLabel::Mod,
    ];

    /// Label text without the leading colon.
    pub fn as_str(&self) -> &str {
        match self {
            EdgeLabel::Arg0 => "ARG0",
            EdgeLabel::Arg1 => "ARG1",
            EdgeLabel::Name => "name",
            EdgeLabel::Time => "time",
            EdgeLabel::Location => "location",
            EdgeLabel::Mod => "mod",
            EdgeLabel::Other(s) => s,
        }
    }

    /// Builds a label from role text without the leading colon.
    pub fn from_role(role: &str) -> EdgeLabel {
        match role {
            "ARG0" => EdgeLabel::Arg0,
            "ARG1" => EdgeLabel::Arg1,
            "name" => EdgeLabel::Name,
            "time" => EdgeLabel::Time,
            "location" => EdgeLabel::Location,
            "mod" => EdgeLabel::Mod,
            other => EdgeLabel::Other(other.to_owned()),
        }
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, EdgeLabel::Other(_))
    }

    /// Position in [`EdgeLabel::CLOSED`], if the label belongs to it.
    pub fn class_index(&self) -> Option<usize> {
        EdgeLabel::CLOSED.iter().position(|l| l == self)
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":{}", self.as_str())
    }
}

impl FromStr for EdgeLabel {
    type Err = String;

    /// Accepts both `":ARG0"` and `"ARG0"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let role = s.strip_prefix(':').unwrap_or(s);
        if role.is_empty() || role.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
            return Err(format!("invalid edge label {s:?}"));
        }
        Ok(EdgeLabel::from_role(role))
    }
}

impl Serialize for EdgeLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for EdgeLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmrNode {
    pub variable: String,
    pub concept: String,
}

impl AmrNode {
    pub fn new(variable: impl Into<String>, concept: impl Into<String>) -> Self {
        AmrNode {
            variable: variable.into(),
            concept: concept.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmrEdge {
    pub source: String,
    pub target: String,
    pub label: EdgeLabel,
}

impl AmrEdge {
    pub fn new(source: impl Into<String>, label: EdgeLabel, target: impl Into<String>) -> Self {
        AmrEdge {
            source: source.into(),
            target: target.into(),
            label,
        }
    }
}

/// Violations of the graph invariants.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid variable name {0:?}")]
    InvalidVariable(String),
    #[error("invalid concept {concept:?} on variable {variable}")]
    InvalidConcept { variable: String, concept: String },
    #[error("variable {0} is defined more than once")]
    DuplicateVariable(String),
    #[error("root {0} is not a node of the graph")]
    UnknownRoot(String),
    #[error("edge refers to unknown variable {0}")]
    UnknownVariable(String),
    #[error("self loop on {0}")]
    SelfLoop(String),
    #[error("duplicate edge {label} from {from} to {target}")]
    DuplicateEdge {
        from: String,
        target: String,
        label: EdgeLabel,
    },
    #[error("edges form a directed cycle through {0}")]
    Cycle(String),
    #[error("node {0} is not reachable from the root")]
    Unreachable(String),
}

/// Variables are a letter followed by letters or digits.
pub fn is_valid_variable(v: &str) -> bool {
    let mut chars = v.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() => chars.all(|c| c.is_alphanumeric()),
        _ => false,
    }
}

/// Concepts are non-empty and free of whitespace, parentheses and quotes.
pub fn is_valid_concept(c: &str) -> bool {
    !c.is_empty()
        && !c
            .chars()
            .any(|ch| ch.is_whitespace() || ch == '(' || ch == ')' || ch == '"')
}

/// Rooted, labeled, acyclic graph of concept nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmrGraph {
    root: String,
    nodes: Vec<AmrNode>,
    edges: Vec<AmrEdge>,
}

impl AmrGraph {
    /// Validates the parts and builds a graph in canonical depth-first order.
    pub fn new(
        root: impl Into<String>,
        nodes: Vec<AmrNode>,
        edges: Vec<AmrEdge>,
    ) -> Result<Self, GraphError> {
        let root = root.into();
        let mut index: HashMap<&str, usize> = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if !is_valid_variable(&node.variable) {
                return Err(GraphError::InvalidVariable(node.variable.clone()));
            }
            if !is_valid_concept(&node.concept) {
                return Err(GraphError::InvalidConcept {
                    variable: node.variable.clone(),
                    concept: node.concept.clone(),
                });
            }
            if index.insert(&node.variable, i).is_some() {
                return Err(GraphError::DuplicateVariable(node.variable.clone()));
            }
        }
        let Some(&root_idx) = index.get(root.as_str()) else {
            return Err(GraphError::UnknownRoot(root));
        };

        let mut seen_edges = HashSet::with_capacity(edges.len());
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        let mut targets = Vec::with_capacity(edges.len());
        for (i, edge) in edges.iter().enumerate() {
            let s = *index
                .get(edge.source.as_str())
                .ok_or_else(|| GraphError::UnknownVariable(edge.source.clone()))?;
            let t = *index
                .get(edge.target.as_str())
                .ok_or_else(|| GraphError::UnknownVariable(edge.target.clone()))?;
            if s == t {
                return Err(GraphError::SelfLoop(edge.source.clone()));
            }
            if !seen_edges.insert((s, t, &edge.label)) {
                return Err(GraphError::DuplicateEdge {
                    from: edge.source.clone(),
                    target: edge.target.clone(),
                    label: edge.label.clone(),
                });
            }
            out[s].push(i);
            targets.push(t);
        }

        // Three-colour DFS over every node, so cycles in unreachable parts are
        // reported as cycles rather than as reachability problems.
        let mut colour = vec![0u8; nodes.len()];
        for start in 0..nodes.len() {
            if colour[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            colour[start] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&e) = out[v].get(*next) {
                    *next += 1;
                    let t = targets[e];
                    match colour[t] {
                        0 => {
                            colour[t] = 1;
                            stack.push((t, 0));
                        }
                        1 => return Err(GraphError::Cycle(nodes[t].variable.clone())),
                        _ => {}
                    }
                } else {
                    colour[v] = 2;
                    stack.pop();
                }
            }
        }

        // Canonical order: pre-order walk from the root.
        let mut visited = vec![false; nodes.len()];
        let mut node_order = Vec::with_capacity(nodes.len());
        let mut edge_order = Vec::with_capacity(edges.len());
        let mut stack = vec![(root_idx, 0usize)];
        visited[root_idx] = true;
        node_order.push(root_idx);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&e) = out[v].get(*next) {
                *next += 1;
                edge_order.push(e);
                let t = targets[e];
                if !visited[t] {
                    visited[t] = true;
                    node_order.push(t);
                    stack.push((t, 0));
                }
            } else {
                stack.pop();
            }
        }
        if let Some(i) = visited.iter().position(|v| !v) {
            return Err(GraphError::Unreachable(nodes[i].variable.clone()));
        }

        let nodes = node_order.into_iter().map(|i| nodes[i].clone()).collect();
        let edges = edge_order.into_iter().map(|i| edges[i].clone()).collect();
        Ok(AmrGraph { root, nodes, edges })
    }

    /// A graph with a single node and no edges.
    pub fn single(variable: impl Into<String>, concept: impl Into<String>) -> Result<Self, GraphError> {
        let variable = variable.into();
        AmrGraph::new(variable.clone(), vec![AmrNode::new(variable, concept)], Vec::new())
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    /// Nodes in depth-first discovery order; the root comes first.
    pub fn nodes(&self) -> &[AmrNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[AmrEdge] {
        &self.edges
    }

    pub fn node(&self, variable: &str) -> Option<&AmrNode> {
        self.nodes.iter().find(|n| n.variable == variable)
    }

    pub fn concept(&self, variable: &str) -> Option<&str> {
        self.node(variable).map(|n| n.concept.as_str())
    }

    /// Outgoing edges of `variable` in edge-list order.
    pub fn children<'a>(&'a self, variable: &'a str) -> impl Iterator<Item = &'a AmrEdge> + 'a {
        self.edges.iter().filter(move |e| e.source == variable)
    }

    /// `(source concept, target concept, label)` for every edge.
    pub fn concept_edges(&self) -> Vec<(&str, &str, &EdgeLabel)> {
        let concepts: HashMap<&str, &str> = self
            .nodes
            .iter()
            .map(|n| (n.variable.as_str(), n.concept.as_str()))
            .collect();
        self.edges
            .iter()
            .map(|e| (concepts[e.source.as_str()], concepts[e.target.as_str()], &e.label))
            .collect()
    }

    /// Single-line canonical PENMAN text.
    pub fn to_penman(&self) -> String {
        self.write_penman(None)
    }

    /// Multi-line, indented PENMAN text for display.
    pub fn to_penman_pretty(&self) -> String {
        self.write_penman(Some(4))
    }

    fn write_penman(&self, indent: Option<usize>) -> String {
        let concepts: HashMap<&str, &str> = self
            .nodes
            .iter()
            .map(|n| (n.variable.as_str(), n.concept.as_str()))
            .collect();
        let mut children: HashMap<&str, Vec<&AmrEdge>> = HashMap::new();
        for e in &self.edges {
            children.entry(e.source.as_str()).or_default().push(e);
        }
        let mut out = String::new();
        let mut written = HashSet::new();
        write_node(&self.root, 0, indent, &concepts, &children, &mut written, &mut out);
        out
    }

    /// Decomposes the graph into instance, relation and top triples.
    pub fn triples(&self) -> TripleSet {
        TripleSet {
            instances: self
                .nodes
                .iter()
                .map(|n| InstanceTriple {
                    variable: n.variable.clone(),
                    concept: n.concept.clone(),
                })
                .collect(),
            relations: self
                .edges
                .iter()
                .map(|e| RelationTriple {
                    label: e.label.clone(),
                    source: e.source.clone(),
                    target: e.target.clone(),
                })
                .collect(),
            top: self.root.clone(),
        }
    }
}

fn write_node<'a>(
    var: &'a str,
    depth: usize,
    indent: Option<usize>,
    concepts: &HashMap<&'a str, &'a str>,
    children: &HashMap<&'a str, Vec<&'a AmrEdge>>,
    written: &mut HashSet<&'a str>,
    out: &mut String,
) {
    if !written.insert(var) {
        out.push_str(var);
        return;
    }
    out.push('(');
    out.push_str(var);
    out.push_str(" / ");
    let concept = concepts[var];
    if concept == "/" || concept.starts_with(':') {
        out.push('"');
        out.push_str(concept);
        out.push('"');
    } else {
        out.push_str(concept);
    }
    for edge in children.get(var).map(Vec::as_slice).unwrap_or(&[]) {
        match indent {
            Some(width) => {
                out.push('\n');
                out.extend(std::iter::repeat_n(' ', width * (depth + 1)));
            }
            None => out.push(' '),
        }
        out.push_str(&edge.label.to_string());
        out.push(' ');
        write_node(&edge.target, depth + 1, indent, concepts, children, written, out);
    }
    out.push(')');
}

impl fmt::Display for AmrGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_penman())
    }
}

impl FromStr for AmrGraph {
    type Err = PenmanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_penman(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InstanceTriple {
    pub variable: String,
    pub concept: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationTriple {
    pub label: EdgeLabel,
    pub source: String,
    pub target: String,
}

/// The triple decomposition of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleSet {
    pub instances: Vec<InstanceTriple>,
    pub relations: Vec<RelationTriple>,
    /// Variable named by the single top triple.
    pub top: String,
}

impl TripleSet {
    pub fn len(&self) -> usize {
        self.instances.len() + self.relations.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn to_triples(g: &AmrGraph) -> TripleSet {
    g.triples()
}

pub fn serialize_penman(g: &AmrGraph) -> String {
    g.to_penman()
}

/// Parse failure with a 1-based line/column position.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{column}: {kind}")]
pub struct PenmanError {
    pub line: usize,
    pub column: usize,
    pub kind: PenmanErrorKind,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PenmanErrorKind {
    #[error("unbalanced parentheses: {0}")]
    Unbalanced(&'static str),
    #[error("variable {0} is defined more than once")]
    DuplicateVariable(String),
    #[error("edge label {0:?} is missing its leading colon")]
    MissingColon(String),
    #[error("empty concept")]
    EmptyConcept,
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("{0}")]
    Graph(GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Symbol(String),
    Quoted(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Open => "'('".into(),
            Tok::Close => "')'".into(),
            Tok::Symbol(s) => format!("{s:?}"),
            Tok::Quoted(s) => format!("\"{s}\""),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<(Vec<(Tok, Pos)>, Pos), PenmanError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, column: 1 };
    let advance = |c: char, pos: &mut Pos| {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        match c {
            c if c.is_whitespace() => {
                chars.next();
                advance(c, &mut pos);
            }
            '(' | ')' => {
                chars.next();
                advance(c, &mut pos);
                toks.push((if c == '(' { Tok::Open } else { Tok::Close }, start));
            }
            '"' => {
                chars.next();
                advance(c, &mut pos);
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = chars.next() {
                    advance(c, &mut pos);
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => {
                            if let Some(n) = chars.next() {
                                advance(n, &mut pos);
                                s.push(n);
                            }
                        }
                        _ => s.push(c),
                    }
                }
                if !closed {
                    return Err(PenmanError {
                        line: start.line,
                        column: start.column,
                        kind: PenmanErrorKind::UnterminatedString,
                    });
                }
                toks.push((Tok::Quoted(s), start));
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    advance(c, &mut pos);
                }
                toks.push((Tok::Symbol(s), start));
            }
        }
    }
    Ok((toks, pos))
}

enum Target {
    Node(String),
    Constant(String),
    Reference(String),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
    nodes: Vec<AmrNode>,
    defined: HashSet<String>,
    edges: Vec<(String, EdgeLabel, Target)>,
}

impl Parser {
    fn err(pos: Pos, kind: PenmanErrorKind) -> PenmanError {
        PenmanError {
            line: pos.line,
            column: pos.column,
            kind,
        }
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn peek(&self) -> Option<&(Tok, Pos)> {
        self.toks.get(self.at)
    }

    fn eof(&self) -> PenmanError {
        Parser::err(self.end, PenmanErrorKind::Unbalanced("missing ')'"))
    }

    fn node(&mut self) -> Result<String, PenmanError> {
        match self.next() {
            Some((Tok::Open, _)) => {}
            Some((t, p)) => {
                return Err(Parser::err(
                    p,
                    PenmanErrorKind::Unexpected {
                        expected: "'('",
                        found: t.describe(),
                    },
                ))
            }
            None => return Err(self.eof()),
        }
        let var = match self.next() {
            Some((Tok::Symbol(s), p)) => {
                if !is_valid_variable(&s) {
                    return Err(Parser::err(p, PenmanErrorKind::Graph(GraphError::InvalidVariable(s))));
                }
                if !self.defined.insert(s.clone()) {
                    return Err(Parser::err(p, PenmanErrorKind::DuplicateVariable(s)));
                }
                s
            }
            Some((t, p)) => {
                return Err(Parser::err(
                    p,
                    PenmanErrorKind::Unexpected {
                        expected: "variable",
                        found: t.describe(),
                    },
                ))
            }
            None => return Err(self.eof()),
        };
        match self.next() {
            Some((Tok::Symbol(s), _)) if s == "/" => {}
            Some((t, p)) => {
                return Err(Parser::err(
                    p,
                    PenmanErrorKind::Unexpected {
                        expected: "'/'",
                        found: t.describe(),
                    },
                ))
            }
            None => return Err(self.eof()),
        }
        let concept = match self.next() {
            Some((Tok::Symbol(s), _)) if !s.starts_with(':') => s,
            Some((Tok::Quoted(s), p)) => {
                if s.is_empty() {
                    return Err(Parser::err(p, PenmanErrorKind::EmptyConcept));
                }
                s
            }
            Some((_, p)) => return Err(Parser::err(p, PenmanErrorKind::EmptyConcept)),
            None => return Err(self.eof()),
        };
        self.nodes.push(AmrNode::new(var.clone(), concept));

        loop {
            let (tok, pos) = match self.next() {
                Some(t) => t,
                None => return Err(self.eof()),
            };
            match tok {
                Tok::Close => return Ok(var),
                Tok::Symbol(role) if role.starts_with(':') => {
                    let label: EdgeLabel = role.parse().map_err(|_| {
                        Parser::err(
                            pos,
                            PenmanErrorKind::Unexpected {
                                expected: "edge label",
                                found: format!("{role:?}"),
                            },
                        )
                    })?;
                    let target = match self.peek().cloned() {
                        Some((Tok::Open, _)) => Target::Node(self.node()?),
                        Some((Tok::Quoted(s), _)) => {
                            self.at += 1;
                            Target::Constant(s)
                        }
                        Some((Tok::Symbol(s), _)) if !s.starts_with(':') => {
                            self.at += 1;
                            Target::Reference(s)
                        }
                        Some((t, p)) => {
                            return Err(Parser::err(
                                p,
                                PenmanErrorKind::Unexpected {
                                    expected: "edge target",
                                    found: t.describe(),
                                },
                            ))
                        }
                        None => return Err(self.eof()),
                    };
                    self.edges.push((var.clone(), label, target));
                }
                Tok::Symbol(s) => return Err(Parser::err(pos, PenmanErrorKind::MissingColon(s))),
                t => {
                    return Err(Parser::err(
                        pos,
                        PenmanErrorKind::Unexpected {
                            expected: "edge label or ')'",
                            found: t.describe(),
                        },
                    ))
                }
            }
        }
    }
}

/// Parses one PENMAN expression.
///
/// A bare symbol in target position refers to a variable when one of that
/// name is defined anywhere in the expression; otherwise it is a constant.
/// Constants (bare or quoted) become concept nodes with generated variables.
pub fn parse_penman(text: &str) -> Result<AmrGraph, PenmanError> {
    let (toks, end) = lex(text)?;
    let start = toks
        .first()
        .map(|(_, p)| *p)
        .unwrap_or(Pos { line: 1, column: 1 });
    let mut parser = Parser {
        toks,
        at: 0,
        end,
        nodes: Vec::new(),
        defined: HashSet::new(),
        edges: Vec::new(),
    };
    if parser.peek().is_none() {
        return Err(Parser::err(
            start,
            PenmanErrorKind::Unexpected {
                expected: "'('",
                found: "end of input".into(),
            },
        ));
    }
    let root = parser.node()?;
    if let Some((tok, pos)) = parser.next() {
        let kind = match tok {
            Tok::Close => PenmanErrorKind::Unbalanced("unexpected ')'"),
            t => PenmanErrorKind::Unexpected {
                expected: "end of input",
                found: t.describe(),
            },
        };
        return Err(Parser::err(pos, kind));
    }

    let Parser {
        mut nodes,
        defined,
        edges: raw_edges,
        ..
    } = parser;
    let mut taken = defined.clone();
    let mut counter = 0usize;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (source, label, target) in raw_edges {
        let target = match target {
            Target::Node(v) => v,
            Target::Reference(s) if defined.contains(&s) => s,
            Target::Reference(s) | Target::Constant(s) => {
                let var = loop {
                    counter += 1;
                    let candidate = format!("c{counter}");
                    if taken.insert(candidate.clone()) {
                        break candidate;
                    }
                };
                nodes.push(AmrNode::new(var.clone(), s));
                var
            }
        };
        edges.push(AmrEdge::new(source, label, target));
    }
    AmrGraph::new(root, nodes, edges).map_err(|e| Parser::err(start, PenmanErrorKind::Graph(e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const JAHIT_GOLD: &str = "(j / jahit :ARG0 (i / ibu) :ARG1 (b / baju) :mod (r / rapi))";

    #[test]
    fn parses_gold_block() {
        let g = parse_penman(JAHIT_GOLD).unwrap();
        assert_eq!(g.root(), "j");
        assert_eq!(g.nodes().len(), 4);
        let edges: Vec<_> = g
            .edges()
            .iter()
            .map(|e| (e.label.clone(), e.source.as_str(), e.target.as_str()))
            .collect();
        assert_eq!(
            edges,
            vec![
                (EdgeLabel::Arg0, "j", "i"),
                (EdgeLabel::Arg1, "j", "b"),
                (EdgeLabel::Mod, "j", "r"),
            ]
        );
    }

    #[test]
    fn minimal_graph() {
        let g = parse_penman("(a / anjing)").unwrap();
        assert_eq!(g.nodes().len(), 1);
        assert!(g.edges().is_empty());
        assert_eq!(g.to_penman(), "(a / anjing)");
    }

    #[test]
    fn multiline_and_tight_roles() {
        let g = parse_penman("(a / x\n   :mod(b / y\n      :ARG1 (c / z)))").unwrap();
        assert_eq!(g.to_penman(), "(a / x :mod (b / y :ARG1 (c / z)))");
    }

    #[test]
    fn programmatic_edge_order_is_kept() {
        let g = AmrGraph::new(
            "a",
            vec![AmrNode::new("a", "x"), AmrNode::new("b", "y"), AmrNode::new("c", "z")],
            vec![
                AmrEdge::new("a", EdgeLabel::Mod, "b"),
                AmrEdge::new("a", EdgeLabel::Arg0, "c"),
            ],
        )
        .unwrap();
        assert_eq!(g.to_penman(), "(a / x :mod (b / y) :ARG0 (c / z))");
    }

    #[test]
    fn error_positions() {
        let e = parse_penman("(a / x :mod (b / y)").unwrap_err();
        assert!(matches!(e.kind, PenmanErrorKind::Unbalanced(_)));

        let e = parse_penman("(a / x))").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
        assert!(matches!(e.kind, PenmanErrorKind::Unbalanced(_)));

        let e = parse_penman("(a / x\n :mod (a / y))").unwrap_err();
        assert_eq!((e.line, e.column), (2, 8));
        assert_eq!(e.kind, PenmanErrorKind::DuplicateVariable("a".into()));

        let e = parse_penman("(a / x mod (b / y))").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
        assert_eq!(e.kind, PenmanErrorKind::MissingColon("mod".into()));

        let e = parse_penman("(a / :mod (b / y))").unwrap_err();
        assert_eq!(e.kind, PenmanErrorKind::EmptyConcept);
        let e = parse_penman("(a / )").unwrap_err();
        assert_eq!(e.kind, PenmanErrorKind::EmptyConcept);
    }

    #[test]
    fn reentrancy_is_accepted_but_cycles_are_not() {
        let g = parse_penman("(a / x :ARG0 (b / y) :ARG1 b)").unwrap();
        assert_eq!(g.nodes().len(), 2);
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.to_penman(), "(a / x :ARG0 (b / y) :ARG1 b)");

        let e = parse_penman("(a / x :ARG0 (b / y :ARG1 a))").unwrap_err();
        assert!(matches!(e.kind, PenmanErrorKind::Graph(GraphError::Cycle(_))));
    }

    #[test]
    fn constants_become_nodes() {
        let g = parse_penman("(s / kota :name \"Sabuga\" :mod besar)").unwrap();
        assert_eq!(g.nodes().len(), 3);
        assert_eq!(g.concept("c1"), Some("Sabuga"));
        assert_eq!(g.concept("c2"), Some("besar"));
        let again = parse_penman(&g.to_penman()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn invariants_are_checked() {
        let n = |v: &str, c: &str| AmrNode::new(v, c);
        assert_eq!(
            AmrGraph::new("z", vec![n("a", "x")], vec![]),
            Err(GraphError::UnknownRoot("z".into()))
        );
        assert!(matches!(
            AmrGraph::new("a", vec![n("a", "x"), n("b", "y")], vec![]),
            Err(GraphError::Unreachable(_))
        ));
        assert!(matches!(
            AmrGraph::new("a", vec![n("a", "x")], vec![AmrEdge::new("a", EdgeLabel::Mod, "a")]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            AmrGraph::new("a", vec![n("a", "x y")], vec![]),
            Err(GraphError::InvalidConcept { .. })
        ));
        assert!(matches!(
            AmrGraph::new("a", vec![n("1a", "x")], vec![]),
            Err(GraphError::InvalidVariable(_))
        ));
        let dup = AmrGraph::new(
            "a",
            vec![n("a", "x"), n("b", "y")],
            vec![
                AmrEdge::new("a", EdgeLabel::Mod, "b"),
                AmrEdge::new("a", EdgeLabel::Mod, "b"),
            ],
        );
        assert!(matches!(dup, Err(GraphError::DuplicateEdge { .. })));
    }

    #[test]
    fn triple_counts() {
        let g = parse_penman(JAHIT_GOLD).unwrap();
        let t = g.triples();
        assert_eq!(t.instances.len(), 4);
        assert_eq!(t.relations.len(), 3);
        assert_eq!(t.len(), 8);
        assert_eq!(t.top, "j");

        let t = parse_penman("(a / x)").unwrap().triples();
        assert_eq!(
            t.instances,
            vec![InstanceTriple {
                variable: "a".into(),
                concept: "x".into()
            }]
        );
        assert!(t.relations.is_empty());
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn labels_round_trip() {
        for l in EdgeLabel::CLOSED {
            assert_eq!(l.to_string().parse::<EdgeLabel>().unwrap(), l);
            assert!(l.is_closed());
        }
        assert_eq!(":ARG2".parse::<EdgeLabel>().unwrap(), EdgeLabel::Other("ARG2".into()));
        assert_eq!(EdgeLabel::Mod.class_index(), Some(5));
    }

    #[test]
    fn pretty_output_reparses() {
        let g = parse_penman(JAHIT_GOLD).unwrap();
        let pretty = g.to_penman_pretty();
        assert!(pretty.contains('\n'));
        assert_eq!(parse_penman(&pretty).unwrap(), g);
    }
}
