//! Brute-force enumeration of chain patterns over a small labelled graph.
//!
//! Independent of the engine: walks are enumerated directly from the edge
//! list, then filtered by mode and projected onto the named nodes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub struct Graph {
    /// Node label index per node; node `i` has property `k = i`.
    pub nodes: Vec<usize>,
    /// `(from, to, label)`.
    pub edges: Vec<(usize, usize, usize)>,
}

pub const NODE_LABELS: [&str; 3] = ["A", "B", "C"];
pub const EDGE_LABELS: [&str; 3] = ["E", "F", "G"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    One,
    Optional,
    Star,
    Plus,
    OneTwo,
}

impl Quant {
    fn bounds(self) -> (usize, Option<usize>) {
        match self {
            Quant::One => (1, Some(1)),
            Quant::Optional => (0, Some(1)),
            Quant::Star => (0, None),
            Quant::Plus => (1, None),
            Quant::OneTwo => (1, Some(2)),
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Quant::One => "",
            Quant::Optional => "?",
            Quant::Star => "*",
            Quant::Plus => "+",
            Quant::OneTwo => "{1,2}",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub forward: bool,
    pub label: usize,
    pub quant: Quant,
    /// Label required on the node after this step.
    pub node_label: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Pattern {
    pub first_label: Option<usize>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Default,
    Trail,
    Acyclic,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::Default => "",
            Mode::Trail => "TRAIL ",
            Mode::Acyclic => "ACYCLIC ",
        }
    }
}

/// Statements that build the graph. Every node label is a subtype of `N`
/// so that one edge label can join nodes of different labels.
pub fn build_script(g: &Graph) -> String {
    let mut s = String::from("create type N as (k int) nodetype\n");
    for l in NODE_LABELS {
        let _ = writeln!(s, "create type {} under N", l);
    }
    // Declaring every edge type up front keeps unused labels known.
    for l in EDGE_LABELS {
        let _ = writeln!(s, "create type {} edgetype (leaving N, arriving N)", l);
    }
    if g.nodes.is_empty() {
        return s;
    }
    s.push_str("[CREATE ");
    let mut items: Vec<String> = g.nodes.iter().enumerate().map(|(i, l)| format!("(n{}:{} {{k:{}}})", i, NODE_LABELS[*l], i)).collect();
    for (a, b, l) in &g.edges {
        items.push(format!("(n{})-[:{}]->(n{})", a, EDGE_LABELS[*l], b));
    }
    s.push_str(&items.join(", "));
    s.push_str("]\n");
    s
}

pub fn query(p: &Pattern, mode: Mode) -> String {
    let label = |l: Option<usize>| l.map(|l| format!(":{}", NODE_LABELS[l])).unwrap_or_default();
    let mut q = format!("MATCH {}(x0{})", mode.keyword(), label(p.first_label));
    for (i, s) in p.steps.iter().enumerate() {
        let edge = if s.forward {
            format!("-[:{}]->", EDGE_LABELS[s.label])
        } else {
            format!("<-[:{}]-", EDGE_LABELS[s.label])
        };
        if s.quant == Quant::One {
            q.push_str(&edge);
        } else {
            let _ = write!(q, " [(){}()]{} ", edge, s.quant.suffix());
        }
        let _ = write!(q, "(x{}{})", i + 1, label(s.node_label));
    }
    q.push_str(" RETURN ");
    let cols: Vec<String> = (0..=p.steps.len()).map(|i| format!("x{}.k AS c{}", i, i)).collect();
    q.push_str(&cols.join(", "));
    q
}

struct Walk {
    nodes: Vec<usize>,
    edges: Vec<usize>,
}

impl Walk {
    fn admits(&self, mode: Mode, edge: usize, to: usize) -> bool {
        match mode {
            Mode::Default => true,
            Mode::Trail => !self.edges.contains(&edge),
            Mode::Acyclic => !self.nodes.contains(&to),
        }
    }
}

/// Every `(x0, x1, ...)` tuple the pattern can bind.
pub fn enumerate(g: &Graph, p: &Pattern, mode: Mode) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for start in 0..g.nodes.len() {
        if p.first_label.is_some_and(|l| g.nodes[start] != l) {
            continue;
        }
        let mut walk = Walk { nodes: vec![start], edges: Vec::new() };
        let mut named = vec![start];
        steps(g, p, mode, 0, start, &mut walk, &mut named, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn steps(
    g: &Graph,
    p: &Pattern,
    mode: Mode,
    i: usize,
    at: usize,
    walk: &mut Walk,
    named: &mut Vec<usize>,
    out: &mut BTreeSet<Vec<usize>>,
) {
    let Some(s) = p.steps.get(i) else {
        out.insert(named.clone());
        return;
    };
    let (min, max) = s.quant.bounds();
    let mut used = Vec::new();
    repeat(g, p, mode, i, s, min, max, 0, at, walk, &mut used, named, out);
}

#[allow(clippy::too_many_arguments)]
fn repeat(
    g: &Graph,
    p: &Pattern,
    mode: Mode,
    i: usize,
    s: &Step,
    min: usize,
    max: Option<usize>,
    done: usize,
    at: usize,
    walk: &mut Walk,
    used: &mut Vec<usize>,
    named: &mut Vec<usize>,
    out: &mut BTreeSet<Vec<usize>>,
) {
    if done >= min && s.node_label.is_none_or(|l| g.nodes[at] == l) {
        named.push(at);
        steps(g, p, mode, i + 1, at, walk, named, out);
        named.pop();
    }
    if max.is_some_and(|m| done >= m) {
        return;
    }
    for (e, &(a, b, l)) in g.edges.iter().enumerate() {
        if l != s.label {
            continue;
        }
        let to = match (s.forward, a == at, b == at) {
            (true, true, _) => b,
            (false, _, true) => a,
            _ => continue,
        };
        // A quantified step never reuses an edge within its own repetitions.
        if s.quant != Quant::One && used.contains(&e) {
            continue;
        }
        if !walk.admits(mode, e, to) {
            continue;
        }
        walk.nodes.push(to);
        walk.edges.push(e);
        used.push(e);
        repeat(g, p, mode, i, s, min, max, done + 1, to, walk, used, named, out);
        used.pop();
        walk.edges.pop();
        walk.nodes.pop();
    }
}
