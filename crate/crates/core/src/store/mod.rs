//! Row storage with derived indexes.
//!
//! All maps are persistent, so a [`State`] clone is O(1); transactions work
//! on a private clone and publish it on commit.

pub mod log;

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::Hasher;
use std::sync::Arc;

use im::{OrdMap, OrdSet};
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, TypeDescriptor, TypeKind, ARRIVING, LEAVING};
use crate::value::{TypeId, Uid, Value};

/// One stored node or edge. Absent columns read as NULL.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub type_id: TypeId,
    pub values: BTreeMap<String, Value>,
}

impl Row {
    pub fn new(type_id: TypeId) -> Row {
        Row { type_id, values: BTreeMap::new() }
    }

    pub fn get(&self, column: &str) -> &Value {
        self.values.get(column).unwrap_or(&Value::Null)
    }

    fn key(&self, cols: &[String]) -> Option<Vec<Value>> {
        let vals: Vec<Value> = cols.iter().map(|c| self.get(c).clone()).collect();
        if vals.iter().any(Value::is_null) {
            None
        } else {
            Some(vals)
        }
    }
}

/// Durable unit of change: everything one commit wrote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub seq: u64,
    pub next_uid: Uid,
    pub next_type_id: u32,
    pub types: Vec<TypeDescriptor>,
    pub puts: Vec<(Uid, Row)>,
    pub removes: Vec<Uid>,
}

type KeyIndex = OrdMap<Vec<Value>, OrdSet<Uid>>;

#[derive(Clone, Debug, Default)]
pub struct State {
    pub catalog: Catalog,
    pub next_uid: Uid,
    rows: OrdMap<Uid, Arc<Row>>,
    by_type: OrdMap<TypeId, OrdSet<Uid>>,
    /// Per hierarchy root, per key column list.
    keys: OrdMap<TypeId, OrdMap<Vec<String>, KeyIndex>>,
    out_adj: OrdMap<Uid, OrdSet<Uid>>,
    in_adj: OrdMap<Uid, OrdSet<Uid>>,
    endpoints: OrdMap<Uid, (Uid, Uid)>,
    dangling: OrdSet<Uid>,
}

impl State {
    pub fn new() -> State {
        State { catalog: Catalog::new(), next_uid: 1, ..Default::default() }
    }

    pub fn alloc_uid(&mut self) -> Uid {
        let u = self.next_uid;
        self.next_uid += 1;
        u
    }

    pub fn row(&self, uid: Uid) -> Option<&Arc<Row>> {
        self.rows.get(&uid)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Uid, &Arc<Row>)> {
        self.rows.iter()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn is_edge(&self, uid: Uid) -> bool {
        self.rows.get(&uid).and_then(|r| self.catalog.get(r.type_id).ok()).is_some_and(|d| d.kind == TypeKind::Edge)
    }

    /// Rows whose type is exactly `id`, ascending.
    pub fn rows_of_type(&self, id: TypeId) -> impl Iterator<Item = Uid> + '_ {
        self.by_type.get(&id).into_iter().flat_map(|s| s.iter().copied())
    }

    /// Rows of `id` and all its subtypes, ascending by uid.
    pub fn scan(&self, id: TypeId) -> Vec<Uid> {
        let mut out: Vec<Uid> = self.catalog.subtype_closure(id).into_iter().flat_map(|t| self.rows_of_type(t)).collect();
        out.sort_unstable();
        out
    }

    pub fn count_of_type(&self, id: TypeId) -> usize {
        self.by_type.get(&id).map_or(0, |s| s.len())
    }

    /// Rows in the hierarchy of `id` whose columns `cols` equal `values`, if
    /// `cols` is an indexed key of that hierarchy.
    pub fn index_lookup(&self, id: TypeId, cols: &[String], values: &[Value]) -> Option<Vec<Uid>> {
        let root = self.catalog.root(id);
        let idx = self.keys.get(&root)?.get(cols)?;
        Some(idx.get(values).map(|s| s.iter().copied().collect()).unwrap_or_default())
    }

    /// Rows of the hierarchy of `root` sharing a key value with another row.
    pub fn key_holders(&self, root: TypeId, cols: &[String], values: &[Value]) -> usize {
        self.keys.get(&root).and_then(|m| m.get(cols)).and_then(|i| i.get(values)).map_or(0, |s| s.len())
    }

    pub fn endpoints(&self, edge: Uid) -> Option<(Uid, Uid)> {
        self.endpoints.get(&edge).copied()
    }

    pub fn out_edges(&self, node: Uid) -> impl Iterator<Item = Uid> + '_ {
        self.out_adj.get(&node).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn in_edges(&self, node: Uid) -> impl Iterator<Item = Uid> + '_ {
        self.in_adj.get(&node).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn dangling(&self) -> impl Iterator<Item = Uid> + '_ {
        self.dangling.iter().copied()
    }

    fn indexed_keys(&self, root: TypeId) -> Vec<Vec<String>> {
        let mut keys = Vec::new();
        let pk = self.catalog.primary_key(root);
        if !pk.is_empty() {
            keys.push(pk.to_vec());
        }
        keys.extend(self.catalog.unique_keys(root).iter().cloned());
        keys
    }

    fn index_keys(&mut self, uid: Uid, row: &Row, add: bool) {
        let root = self.catalog.root(row.type_id);
        let mut per_root = self.keys.get(&root).cloned().unwrap_or_default();
        for cols in self.indexed_keys(root) {
            let Some(k) = row.key(&cols) else { continue };
            let mut idx = per_root.get(&cols).cloned().unwrap_or_default();
            let mut set = idx.get(&k).cloned().unwrap_or_default();
            if add {
                set.insert(uid);
            } else {
                set.remove(&uid);
            }
            if set.is_empty() {
                idx.remove(&k);
            } else {
                idx.insert(k, set);
            }
            per_root.insert(cols, idx);
        }
        self.keys.insert(root, per_root);
    }

    /// Rebuilds the key indexes of one hierarchy after its keys changed.
    pub fn reindex_root(&mut self, root: TypeId) {
        self.keys.remove(&root);
        let uids = self.scan(root);
        for uid in uids {
            let row = self.rows[&uid].clone();
            self.index_keys(uid, &row, true);
        }
    }

    fn set_add<K: Ord + Clone>(map: &mut OrdMap<K, OrdSet<Uid>>, k: K, v: Uid) {
        let mut s = map.get(&k).cloned().unwrap_or_default();
        s.insert(v);
        map.insert(k, s);
    }

    fn set_remove<K: Ord + Clone>(map: &mut OrdMap<K, OrdSet<Uid>>, k: K, v: Uid) {
        if let Some(s) = map.get(&k) {
            let mut s = s.clone();
            s.remove(&v);
            if s.is_empty() {
                map.remove(&k);
            } else {
                map.insert(k, s);
            }
        }
    }

    fn unlink_edge(&mut self, edge: Uid) {
        if let Some((l, a)) = self.endpoints.remove(&edge) {
            Self::set_remove(&mut self.out_adj, l, edge);
            Self::set_remove(&mut self.in_adj, a, edge);
        }
        self.dangling.remove(&edge);
    }

    fn resolve_node(&self, endpoint_type: TypeId, value: &Value) -> Option<Uid> {
        let pk = self.catalog.primary_key(endpoint_type).to_vec();
        let hits = self.index_lookup(endpoint_type, &pk, std::slice::from_ref(value))?;
        hits.into_iter().find(|u| self.rows.get(u).is_some_and(|r| self.catalog.is_subtype_of(r.type_id, endpoint_type)))
    }

    /// Links an edge to the nodes its endpoint key values name, or marks it dangling.
    fn resolve_edge(&mut self, edge: Uid) {
        self.unlink_edge(edge);
        let Some(row) = self.rows.get(&edge).cloned() else { return };
        let Ok(d) = self.catalog.get(row.type_id) else { return };
        let (Some(lt), Some(at)) = (d.leaving, d.arriving) else { return };
        let l = self.resolve_node(lt, row.get(LEAVING));
        let a = self.resolve_node(at, row.get(ARRIVING));
        match (l, a) {
            (Some(l), Some(a)) => {
                self.endpoints.insert(edge, (l, a));
                Self::set_add(&mut self.out_adj, l, edge);
                Self::set_add(&mut self.in_adj, a, edge);
            }
            _ => {
                self.dangling.insert(edge);
            }
        }
    }

    fn incident(&self, node: Uid) -> Vec<Uid> {
        let mut v: Vec<Uid> = self.out_edges(node).chain(self.in_edges(node)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Inserts or replaces a row and maintains every derived index.
    pub fn put_row(&mut self, uid: Uid, row: Row) {
        let kind = self.catalog.get(row.type_id).map(|d| d.kind).unwrap_or(TypeKind::Node);
        let old = self.rows.get(&uid).cloned();
        let mut rekeyed = old.is_none();
        if let Some(old) = &old {
            Self::set_remove(&mut self.by_type, old.type_id, uid);
            self.index_keys(uid, old, false);
            if kind == TypeKind::Node {
                let pk = self.catalog.primary_key(row.type_id).to_vec();
                rekeyed = old.key(&pk) != row.key(&pk) || old.type_id != row.type_id;
            }
        }
        let row = Arc::new(row);
        Self::set_add(&mut self.by_type, row.type_id, uid);
        self.index_keys(uid, &row, true);
        self.rows.insert(uid, row);
        if uid >= self.next_uid {
            self.next_uid = uid + 1;
        }
        match kind {
            TypeKind::Edge => self.resolve_edge(uid),
            _ if rekeyed => {
                for e in self.incident(uid) {
                    self.resolve_edge(e);
                }
                let pending: Vec<Uid> = self.dangling.iter().copied().collect();
                for e in pending {
                    self.resolve_edge(e);
                }
            }
            _ => {}
        }
    }

    /// Removes a row. Edges incident to a removed node become dangling.
    pub fn remove_row(&mut self, uid: Uid) -> Option<Arc<Row>> {
        let old = self.rows.remove(&uid)?;
        Self::set_remove(&mut self.by_type, old.type_id, uid);
        self.index_keys(uid, &old, false);
        if self.endpoints.contains_key(&uid) || self.dangling.contains(&uid) {
            self.unlink_edge(uid);
        } else {
            for e in self.incident(uid) {
                self.unlink_edge(e);
                self.dangling.insert(e);
            }
        }
        Some(old)
    }

    /// Replays one commit record: types, then node puts, then edge puts,
    /// then edge removals, then node removals.
    pub fn apply_record(&mut self, rec: &CommitRecord) {
        let mut roots = Vec::new();
        for d in &rec.types {
            self.catalog.put(d.clone());
            roots.push(self.catalog.root(d.id));
        }
        roots.sort();
        roots.dedup();
        for r in roots {
            self.reindex_root(r);
        }
        self.catalog.set_next_type_id(rec.next_type_id);
        let edge_row = |s: &State, r: &Row| s.catalog.get(r.type_id).is_ok_and(|d| d.kind == TypeKind::Edge);
        for pass_edges in [false, true] {
            for (uid, row) in &rec.puts {
                if edge_row(self, row) == pass_edges {
                    self.put_row(*uid, row.clone());
                }
            }
        }
        let (edges, nodes): (Vec<Uid>, Vec<Uid>) = rec.removes.iter().partition(|u| self.is_edge(**u));
        for u in edges.into_iter().chain(nodes) {
            self.remove_row(u);
        }
        self.next_uid = self.next_uid.max(rec.next_uid);
    }

    /// Order-independent fingerprint of catalog, rows and uid counter.
    pub fn digest(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for d in self.catalog.types() {
            h.write(&bincode::serialize(d.as_ref()).expect("descriptor serializes"));
        }
        for (uid, row) in &self.rows {
            h.write_u64(*uid);
            h.write(&bincode::serialize(row.as_ref()).expect("row serializes"));
        }
        h.write_u64(self.next_uid);
        h.finish()
    }
}
