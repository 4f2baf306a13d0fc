//! MATCH evaluation by backtracking.
//!
//! Each step receives the rest of the match as a continuation
//! (`&mut dyn FnMut(&mut Frame)`). A step binds something, calls the
//! continuation, then undoes the binding and tries its next alternative.
//!
//! Traversal order is fixed: start candidates and edges ascend by uid;
//! `+`, `*` and `{m,n}` try one more iteration before stopping, `?` tries
//! zero iterations first.
//!
//! Within one quantified expansion no iteration may repeat the segment
//! (start node, edges, end node) of an earlier iteration. This bounds the
//! expansion on cyclic graphs in every mode.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use crate::catalog::TypeKind;
use crate::error::{Error, Result};
use crate::expr::{self, compare};
use crate::parser::ast::*;
use crate::store::State;
use crate::value::{TypeId, Uid, Value};

/// Variable bindings visible to a match: `(name, value)`, later entries shadow earlier.
pub type Env = Vec<(String, Value)>;

/// Distinct binding rows of a MATCH, in first-found order.
#[derive(Clone, Debug, PartialEq)]
pub struct Bindings {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Bindings {
    /// The binding row as an environment extending `outer`.
    pub fn env(&self, outer: &Env, row: usize) -> Env {
        let mut env = outer.clone();
        env.extend(self.columns.iter().cloned().zip(self.rows[row].iter().cloned()));
        env
    }
}

pub struct Frame {
    env: Env,
    /// Alternating node and edge uids of the current pattern's walk.
    walk: Vec<Uid>,
    cursor: Option<Uid>,
    /// SIMPLE mode: the walk has returned to its first node.
    closed: bool,
    repetition: Repetition,
    edges: usize,
    stop: bool,
}

impl Frame {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.env.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn in_walk_nodes(&self, n: Uid) -> bool {
        self.walk.iter().step_by(2).any(|u| *u == n)
    }

    fn in_walk_edges(&self, e: Uid) -> bool {
        self.walk.iter().skip(1).step_by(2).any(|u| *u == e)
    }
}

type Cont<'k> = &'k mut dyn FnMut(&mut Frame) -> Result<()>;

/// Finds the distinct binding rows of `m` against `state`. Names bound in
/// `outer` act as constants and are not output columns.
pub fn find_bindings(m: &MatchStatement, state: &State, outer: &Env) -> Result<Bindings> {
    check(m)?;
    let columns = output_columns(m, outer);
    let selection = m.patterns.first().map(|p| p.mode.selection).unwrap_or_default();
    let matcher = Matcher { state };
    let mut frame =
        Frame { env: outer.clone(), walk: Vec::new(), cursor: None, closed: false, repetition: Repetition::Default, edges: 0, stop: false };
    let mut found: Vec<(Vec<Value>, usize)> = Vec::new();
    let mut k = |f: &mut Frame| -> Result<()> {
        if let Some(w) = &m.where_clause {
            let env = &f.env;
            let v = expr::eval(w, state, &|n| env.iter().rev().find(|(k, _)| k == n).map(|(_, v)| v.clone()))?;
            if !expr::holds(&v) {
                return Ok(());
            }
        }
        let row = columns.iter().map(|c| f.lookup(c).cloned().unwrap_or(Value::Null)).collect();
        found.push((row, f.edges));
        if selection == Selection::Any {
            f.stop = true;
        }
        Ok(())
    };
    matcher.patterns(&m.patterns, 0, &mut frame, &mut k)?;
    if selection == Selection::Shortest {
        if let Some(min) = found.iter().map(|(_, e)| *e).min() {
            found.retain(|(_, e)| *e == min);
        }
    }
    let mut seen = HashSet::new();
    let rows = found.into_iter().map(|(r, _)| r).filter(|r| seen.insert(r.clone())).collect();
    Ok(Bindings { columns, rows })
}

/// Static checks: selection modes need a single pattern, and a name used
/// inside a quantified path may not also be used outside it.
fn check(m: &MatchStatement) -> Result<()> {
    if m.patterns.len() > 1 && m.patterns.iter().any(|p| p.mode.selection != Selection::Default) {
        return Err(Error::Execution("SHORTEST, ALL and ANY cannot be combined with ','".into()));
    }
    let mut outside = BTreeSet::new();
    for p in &m.patterns {
        if let Some(a) = &p.path_alias {
            outside.insert(a.clone());
        }
        check_level(&p.elements, &mut outside)?;
    }
    Ok(())
}

fn check_level(els: &[PatternElement], level: &mut BTreeSet<String>) -> Result<()> {
    let mut inner_sets = Vec::new();
    for e in els {
        match e {
            PatternElement::Node(n) => item_names(&n.alias, &n.doc, level),
            PatternElement::Edge(x) => item_names(&x.alias, &x.doc, level),
            PatternElement::Path(p) => {
                let mut inner = BTreeSet::new();
                check_level(&p.body, &mut inner)?;
                inner_sets.push(inner);
            }
        }
    }
    for inner in inner_sets {
        if let Some(n) = inner.iter().find(|n| level.contains(*n)) {
            return Err(Error::Execution(format!("{} is used both inside and outside a quantified path", n)));
        }
        level.extend(inner);
    }
    Ok(())
}

fn item_names(alias: &Option<String>, doc: &Doc, out: &mut BTreeSet<String>) {
    out.extend(alias.iter().cloned());
    for (_, v) in doc {
        if let Expr::Var(n) = v {
            out.insert(n.clone());
        }
    }
}

/// Unbound identifiers in order of first appearance.
fn output_columns(m: &MatchStatement, outer: &Env) -> Vec<String> {
    fn add(name: &str, outer: &Env, out: &mut Vec<String>) {
        if !outer.iter().any(|(n, _)| n == name) && !out.iter().any(|n| n == name) {
            out.push(name.to_string());
        }
    }
    fn walk(els: &[PatternElement], outer: &Env, out: &mut Vec<String>) {
        for e in els {
            let (alias, doc) = match e {
                PatternElement::Node(n) => (&n.alias, &n.doc),
                PatternElement::Edge(x) => (&x.alias, &x.doc),
                PatternElement::Path(p) => {
                    walk(&p.body, outer, out);
                    continue;
                }
            };
            if let Some(a) = alias {
                add(a, outer, out);
            }
            for (_, v) in doc {
                if let Expr::Var(n) = v {
                    add(n, outer, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    for p in &m.patterns {
        if let Some(a) = &p.path_alias {
            add(a, outer, &mut out);
        }
        walk(&p.elements, outer, &mut out);
    }
    out
}

/// Names bound by a path body, in order, including nested paths' names.
fn group_vars(els: &[PatternElement], out: &mut Vec<String>) {
    for e in els {
        let (alias, doc) = match e {
            PatternElement::Node(n) => (&n.alias, &n.doc),
            PatternElement::Edge(x) => (&x.alias, &x.doc),
            PatternElement::Path(p) => {
                group_vars(&p.body, out);
                continue;
            }
        };
        for n in alias.iter().chain(doc.iter().filter_map(|(_, v)| if let Expr::Var(n) = v { Some(n) } else { None })) {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
    }
}

struct Expansion {
    vars: Vec<String>,
    acc: Vec<Vec<Value>>,
    segments: Vec<Vec<Uid>>,
}

struct Matcher<'a> {
    state: &'a State,
}

impl<'a> Matcher<'a> {
    fn patterns(&self, pats: &[MatchPattern], i: usize, f: &mut Frame, k: Cont) -> Result<()> {
        let Some(p) = pats.get(i) else { return k(f) };
        let saved = (std::mem::take(&mut f.walk), f.cursor.take(), f.closed, f.repetition);
        f.closed = false;
        f.repetition = p.mode.repetition;
        let res = self.elements(&p.elements, 0, f, &mut |f| {
            let n_edges = f.walk.len() / 2;
            let pushed = if let Some(a) = &p.path_alias {
                let path = f
                    .walk
                    .iter()
                    .enumerate()
                    .map(|(j, u)| if j % 2 == 0 { Value::Node(*u) } else { Value::Edge(*u) })
                    .collect();
                f.env.push((a.clone(), Value::Array(path)));
                true
            } else {
                false
            };
            let walk = std::mem::take(&mut f.walk);
            let (cursor, closed, rep) = (f.cursor.take(), f.closed, f.repetition);
            f.edges += n_edges;
            let r = self.patterns(pats, i + 1, f, k);
            f.edges -= n_edges;
            f.walk = walk;
            (f.cursor, f.closed, f.repetition) = (cursor, closed, rep);
            if pushed {
                f.env.pop();
            }
            r
        });
        (f.walk, f.cursor, f.closed, f.repetition) = saved;
        res
    }

    fn elements(&self, els: &[PatternElement], i: usize, f: &mut Frame, k: Cont) -> Result<()> {
        if f.stop {
            return Ok(());
        }
        let Some(e) = els.get(i) else { return k(f) };
        match e {
            PatternElement::Node(np) => match f.cursor {
                Some(c) => self.with_item(np_item(np), Value::Node(c), TypeKind::Node, f, &mut |f| self.elements(els, i + 1, f, k)),
                None => {
                    for c in self.node_candidates(np, f) {
                        if f.stop {
                            break;
                        }
                        f.cursor = Some(c);
                        f.walk.push(c);
                        let r = self.with_item(np_item(np), Value::Node(c), TypeKind::Node, f, &mut |f| {
                            self.elements(els, i + 1, f, k)
                        });
                        f.walk.pop();
                        f.cursor = None;
                        r?;
                    }
                    Ok(())
                }
            },
            PatternElement::Edge(ep) => {
                let c = f.cursor.expect("edge follows a node");
                let cands: Vec<Uid> = match ep.direction {
                    Direction::Right => self.state.out_edges(c).collect(),
                    Direction::Left => self.state.in_edges(c).collect(),
                };
                for e in cands {
                    if f.stop {
                        break;
                    }
                    let Some((l, a)) = self.state.endpoints(e) else { continue };
                    let far = if ep.direction == Direction::Right { a } else { l };
                    let was_closed = f.closed;
                    match f.repetition {
                        Repetition::Default => {}
                        Repetition::Trail => {
                            if f.in_walk_edges(e) {
                                continue;
                            }
                        }
                        Repetition::Acyclic => {
                            if f.in_walk_nodes(far) {
                                continue;
                            }
                        }
                        Repetition::Simple => {
                            if f.closed {
                                continue;
                            }
                            if f.in_walk_nodes(far) {
                                if f.walk.first() == Some(&far) {
                                    f.closed = true;
                                } else {
                                    continue;
                                }
                            }
                        }
                    }
                    f.walk.push(e);
                    f.walk.push(far);
                    f.cursor = Some(far);
                    let r = self.with_item(ep_item(ep), Value::Edge(e), TypeKind::Edge, f, &mut |f| self.elements(els, i + 1, f, k));
                    f.cursor = Some(c);
                    f.walk.truncate(f.walk.len() - 2);
                    f.closed = was_closed;
                    r?;
                }
                Ok(())
            }
            PatternElement::Path(pp) => {
                let mut vars = Vec::new();
                group_vars(&pp.body, &mut vars);
                let mut exp = Expansion { acc: vec![Vec::new(); vars.len()], vars, segments: Vec::new() };
                self.expand(pp, els, i, 0, &mut exp, f, k)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn expand(
        &self,
        pp: &PathPattern,
        els: &[PatternElement],
        i: usize,
        count: u32,
        exp: &mut Expansion,
        f: &mut Frame,
        k: Cont,
    ) -> Result<()> {
        let (min, max) = pp.quantifier.bounds();
        let lazy = pp.quantifier == Quantifier::Optional;
        let can_more = max.is_none_or(|m| count < m);
        let can_stop = count >= min;
        if lazy && can_stop {
            self.finish(els, i, exp, f, k)?;
        }
        if can_more && !f.stop {
            self.iterate(pp, els, i, count, exp, f, k)?;
        }
        if !lazy && can_stop && !f.stop {
            self.finish(els, i, exp, f, k)?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn iterate(
        &self,
        pp: &PathPattern,
        els: &[PatternElement],
        i: usize,
        count: u32,
        exp: &mut Expansion,
        f: &mut Frame,
        k: Cont,
    ) -> Result<()> {
        let mark = f.env.len();
        let start_walk = f.walk.len();
        let start = f.cursor.expect("path follows a node");
        self.elements(&pp.body, 0, f, &mut |f| {
            let mut seg = vec![start];
            seg.extend_from_slice(&f.walk[start_walk..]);
            if exp.segments.contains(&seg) {
                return Ok(());
            }
            let local = f.env.split_off(mark);
            for (j, v) in exp.vars.iter().enumerate() {
                let val = local.iter().rev().find(|(n, _)| n == v).map(|(_, x)| x.clone()).unwrap_or(Value::Null);
                exp.acc[j].push(val);
            }
            exp.segments.push(seg);
            let r = self.expand(pp, els, i, count + 1, exp, f, k);
            exp.segments.pop();
            for a in exp.acc.iter_mut() {
                a.pop();
            }
            f.env.extend(local);
            r
        })
    }

    /// Leaves the expansion: binds the group arrays and continues after the path.
    fn finish(&self, els: &[PatternElement], i: usize, exp: &mut Expansion, f: &mut Frame, k: Cont) -> Result<()> {
        let mark = f.env.len();
        for (v, a) in exp.vars.iter().zip(&exp.acc) {
            f.env.push((v.clone(), Value::Array(a.clone())));
        }
        let r = self.elements(els, i + 1, f, k);
        f.env.truncate(mark);
        r
    }

    fn node_candidates(&self, np: &NodePattern, f: &Frame) -> Vec<Uid> {
        let cat = &self.state.catalog;
        if let Some(a) = &np.alias {
            if let Some(v) = f.lookup(a) {
                return match v {
                    Value::Node(u) => vec![*u],
                    _ => Vec::new(),
                };
            }
        }
        let Some(first) = np.labels.first() else {
            let mut all: Vec<Uid> =
                cat.types().filter(|d| d.kind == TypeKind::Node).flat_map(|d| self.state.rows_of_type(d.id)).collect();
            all.sort_unstable();
            return all;
        };
        let Some(d) = cat.lookup_label(first, Some(TypeKind::Node)) else { return Vec::new() };
        if let Some(hits) = self.key_lookup(d.id, &np.doc, f) {
            return hits;
        }
        self.state.scan(d.id)
    }

    /// Uses the key index when the doc gives constant values for every key column.
    fn key_lookup(&self, t: TypeId, doc: &Doc, f: &Frame) -> Option<Vec<Uid>> {
        let cat = &self.state.catalog;
        let key = cat.primary_key(t).to_vec();
        let mut vals = Vec::new();
        for col in &key {
            let e = doc.iter().find(|(k, _)| k == col).map(|(_, e)| e)?;
            let v = match e {
                Expr::Literal(v) => v.clone(),
                Expr::Var(n) => f.lookup(n)?.clone(),
                _ => return None,
            };
            let dt = cat.column(t, col)?.1.data_type.clone();
            vals.push(v.coerce_to(&dt).ok()?);
        }
        let mut hits = self.state.index_lookup(t, &key, &vals)?;
        hits.retain(|u| self.state.row(*u).is_some_and(|r| cat.is_subtype_of(r.type_id, t)));
        Some(hits)
    }

    /// Checks alias, labels, doc and WHERE of an item against `value`, pushes
    /// the bindings it makes, runs `k`, and pops them again.
    fn with_item(&self, item: Item, value: Value, kind: TypeKind, f: &mut Frame, k: Cont) -> Result<()> {
        let uid = match value {
            Value::Node(u) | Value::Edge(u) => u,
            _ => unreachable!(),
        };
        let Some(row) = self.state.row(uid) else { return Ok(()) };
        let cat = &self.state.catalog;
        for l in item.labels {
            match cat.lookup_label(l, Some(kind)) {
                Some(d) if cat.is_subtype_of(row.type_id, d.id) => {}
                _ => return Ok(()),
            }
        }
        if !cat.get(row.type_id).is_ok_and(|d| d.kind == kind) {
            return Ok(());
        }
        let mark = f.env.len();
        let ok = (|| -> Result<bool> {
            if let Some(a) = item.alias {
                match f.lookup(a) {
                    Some(v) if *v != value => return Ok(false),
                    Some(_) => {}
                    None => f.env.push((a.clone(), value.clone())),
                }
            }
            for (col, e) in item.doc {
                let actual = row.get(col);
                if actual.is_null() {
                    return Ok(false);
                }
                if let Expr::Var(n) = e {
                    if f.lookup(n).is_none() {
                        f.env.push((n.clone(), actual.clone()));
                        continue;
                    }
                }
                let env = &f.env;
                let want = expr::eval(e, self.state, &|n| env.iter().rev().find(|(k, _)| k == n).map(|(_, v)| v.clone()))?;
                if !matches!(compare(actual, &want), Ok(Some(Ordering::Equal))) {
                    return Ok(false);
                }
            }
            if let Some(w) = item.where_clause {
                let env = &f.env;
                let v = expr::eval(w, self.state, &|n| env.iter().rev().find(|(k, _)| k == n).map(|(_, v)| v.clone()))?;
                if !expr::holds(&v) {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        let r = match ok {
            Ok(true) => k(f),
            Ok(false) => Ok(()),
            Err(e) => Err(e),
        };
        f.env.truncate(mark);
        r
    }
}

struct Item<'p> {
    alias: &'p Option<String>,
    labels: &'p [String],
    doc: &'p Doc,
    where_clause: &'p Option<Expr>,
}

fn np_item(n: &NodePattern) -> Item<'_> {
    Item { alias: &n.alias, labels: &n.labels, doc: &n.doc, where_clause: &n.where_clause }
}

fn ep_item(e: &EdgePattern) -> Item<'_> {
    Item { alias: &e.alias, labels: &e.labels, doc: &e.doc, where_clause: &e.where_clause }
}

#[cfg(test)]
mod tests;
