//! CREATE, SET and DELETE.
//!
//! CREATE infers types from the pattern: an unknown label becomes a new
//! type, a property without a column adds one, and an edge label seen with
//! new endpoint types has its endpoints generalized to a common supertype.

use std::collections::BTreeMap;

use super::{bound_row, eval, run, Outcome};
use crate::catalog::{Column, TypeKind, ARRIVING, LEAVING};
use crate::db::Transaction;
use crate::error::{Error, Result};
use crate::matcher::Env;
use crate::parser::ast::{Assignment, Direction, Doc, GraphPattern, NodePattern, PatternElement, Statement};
use crate::value::{DataType, TypeId, Uid, Value};

pub(super) fn exec_create(
    tx: &mut Transaction,
    graphs: &[GraphPattern],
    then: Option<&Statement>,
    env: &Env,
) -> Result<Outcome> {
    let mut scope = env.clone();
    // Nodes first, in textual order, so uids follow the text.
    let mut chains: Vec<Vec<Uid>> = Vec::new();
    for g in graphs {
        let mut uids = Vec::new();
        for el in &g.elements {
            match el {
                PatternElement::Node(np) => uids.push(create_node(tx, np, &mut scope)?),
                PatternElement::Edge(_) => {}
                PatternElement::Path(_) => {
                    return Err(Error::Execution("quantified paths are only allowed in MATCH".into()))
                }
            }
        }
        chains.push(uids);
    }
    for (g, uids) in graphs.iter().zip(&chains) {
        let mut pos = 0;
        for el in &g.elements {
            match el {
                PatternElement::Node(_) => pos += 1,
                PatternElement::Edge(ep) => {
                    let (near, far) = (uids[pos - 1], uids[pos]);
                    let (tail, head) = match ep.direction {
                        Direction::Right => (near, far),
                        Direction::Left => (far, near),
                    };
                    let [label] = ep.labels.as_slice() else {
                        return Err(Error::Execution("a created edge needs exactly one label".into()));
                    };
                    let et = edge_type(tx, label, tail, head)?;
                    let mut values = eval_doc(tx, &ep.doc, &scope)?;
                    widen(tx, et, &values)?;
                    values.insert(LEAVING.into(), key_of(tx, tail)?);
                    values.insert(ARRIVING.into(), key_of(tx, head)?);
                    let uid = tx.alloc_uid();
                    tx.insert_row(uid, et, values)?;
                    if let Some(a) = &ep.alias {
                        if scope.iter().any(|(n, _)| n == a) {
                            return Err(Error::Execution(format!("{} is already bound", a)));
                        }
                        scope.push((a.clone(), Value::Edge(uid)));
                    }
                }
                PatternElement::Path(_) => {}
            }
        }
    }
    if let Some(t) = then {
        run(tx, t, &scope)?;
    }
    Ok(Outcome::Done)
}

fn create_node(tx: &mut Transaction, np: &NodePattern, scope: &mut Env) -> Result<Uid> {
    if let Some(a) = &np.alias {
        if scope.iter().any(|(n, _)| n == a) {
            if !np.labels.is_empty() || !np.doc.is_empty() {
                return Err(Error::Execution(format!("{} is already bound", a)));
            }
            return match bound_row(scope, a)? {
                u if !tx.state().is_edge(u) => Ok(u),
                _ => Err(Error::TypeMismatch(format!("{} is an edge", a))),
            };
        }
    }
    if np.labels.is_empty() {
        return match &np.alias {
            Some(a) => Err(Error::Unbound(a.clone())),
            None => Err(Error::Execution("a created node needs a label".into())),
        };
    }
    if np.where_clause.is_some() {
        return Err(Error::Execution("WHERE is not allowed in CREATE".into()));
    }
    let t = node_type(tx, &np.labels)?;
    let values = eval_doc(tx, &np.doc, scope)?;
    widen(tx, t, &values)?;
    let uid = tx.alloc_uid();
    tx.insert_row(uid, t, values)?;
    if let Some(a) = &np.alias {
        scope.push((a.clone(), Value::Node(uid)));
    }
    Ok(uid)
}

/// The most specific type named by a label chain. A single unknown label
/// defines a new node type.
fn node_type(tx: &mut Transaction, labels: &[String]) -> Result<TypeId> {
    let cat = tx.catalog();
    if let [l] = labels {
        if cat.lookup_label(l, Some(TypeKind::Node)).is_none() {
            let l = l.clone();
            return tx.schema(|c| c.define_node_type(&l, Vec::new(), None));
        }
    }
    let ids = labels
        .iter()
        .map(|l| cat.require_label(l, Some(TypeKind::Node)).map(|d| d.id))
        .collect::<Result<Vec<_>>>()?;
    ids.iter()
        .copied()
        .find(|t| ids.iter().all(|o| cat.is_subtype_of(*t, *o)))
        .ok_or_else(|| Error::Schema(format!("labels {} do not lie on one subtype path", labels.join(":"))))
}

/// Resolves or defines the edge type, generalizing its endpoints if needed.
fn edge_type(tx: &mut Transaction, label: &str, tail: Uid, head: Uid) -> Result<TypeId> {
    let tt = tx.state().row(tail).ok_or(Error::UnknownRow(tail))?.type_id;
    let ht = tx.state().row(head).ok_or(Error::UnknownRow(head))?.type_id;
    let cat = tx.catalog();
    let Some(d) = cat.lookup_label(label, Some(TypeKind::Edge)) else {
        let (tl, hl) = (cat.get(tt)?.label.clone(), cat.get(ht)?.label.clone());
        let label = label.to_string();
        return tx.schema(|c| c.define_edge_type(&label, Vec::new(), &tl, &hl, None));
    };
    let (id, l, a) = (d.id, d.leaving.unwrap(), d.arriving.unwrap());
    let nl = cat.common_supertype(l, tt);
    let na = cat.common_supertype(a, ht);
    match (nl, na) {
        (Some(nl), Some(na)) if nl == l && na == a => Ok(id),
        (Some(nl), Some(na)) => {
            tx.schema(|c| c.set_endpoints(id, nl, na))?;
            Ok(id)
        }
        _ => Err(Error::Schema(format!(
            "{} connects {} to {}; cannot also connect {} to {}",
            label,
            cat.get(l)?.label,
            cat.get(a)?.label,
            cat.get(tt)?.label,
            cat.get(ht)?.label
        ))),
    }
}

/// The primary key value of a node, used as an edge reference.
fn key_of(tx: &Transaction, node: Uid) -> Result<Value> {
    let row = tx.state().row(node).ok_or(Error::UnknownRow(node))?;
    let key = tx.catalog().primary_key(row.type_id);
    match key {
        [k] => Ok(row.get(k).clone()),
        _ => Err(Error::Schema("nodes with composite keys cannot be edge endpoints".into())),
    }
}

fn eval_doc(tx: &Transaction, doc: &Doc, scope: &Env) -> Result<BTreeMap<String, Value>> {
    doc.iter().map(|(k, e)| Ok((k.clone(), eval(tx, e, scope)?))).collect()
}

/// Adds a column for every property the type does not have yet.
fn widen(tx: &mut Transaction, t: TypeId, values: &BTreeMap<String, Value>) -> Result<()> {
    for (k, v) in values {
        if v.is_null() || tx.catalog().column(t, k).is_some() {
            continue;
        }
        let dt = DataType::of_value(v)
            .ok_or_else(|| Error::TypeMismatch(format!("{} cannot be stored in property {}", v.to_text(), k)))?;
        tx.add_column(t, Column::new(k.clone(), dt))?;
    }
    Ok(())
}

pub(super) fn exec_set(tx: &mut Transaction, assignments: &[Assignment], env: &Env) -> Result<Outcome> {
    for a in assignments {
        let uid = bound_row(env, &a.target)?;
        let v = eval(tx, &a.value, env)?;
        let t = tx.state().row(uid).ok_or(Error::UnknownRow(uid))?.type_id;
        let single = BTreeMap::from([(a.field.clone(), v.clone())]);
        widen(tx, t, &single)?;
        if tx.catalog().column(t, &a.field).is_none() {
            continue;
        }
        tx.update_row(uid, &a.field, v)?;
    }
    Ok(Outcome::Done)
}

pub(super) fn exec_delete(tx: &mut Transaction, targets: &[String], cascade: bool, env: &Env) -> Result<Outcome> {
    for t in targets {
        let uid = bound_row(env, t)?;
        tx.delete_row(uid, cascade)?;
    }
    Ok(Outcome::Done)
}
