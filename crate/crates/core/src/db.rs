//! Database handle, snapshots and transactions.
//!
//! Writers work on a private copy of the committed state. Commit validates
//! the touched rows, appends one record to the log and publishes the new
//! state. Concurrent writers are detected optimistically: the first to
//! commit wins, later ones fail with [`Error::Conflict`].

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard};

use im::OrdSet;

use crate::catalog::{Catalog, Column, TypeKind, ARRIVING, ID, LEAVING};
use crate::error::{Error, Result, Rule, Violation};
use crate::expr;
use crate::graphset::GraphSet;
use crate::store::log::CommitLog;
use crate::store::{CommitRecord, Row, State};
use crate::value::{DataType, TypeId, Uid, Value};

/// An immutable committed version of the database.
#[derive(Debug)]
pub struct Committed {
    pub seq: u64,
    pub state: State,
    pub graphs: GraphSet,
}

impl Committed {
    pub fn digest(&self) -> u64 {
        self.state.digest()
    }
}

#[derive(Debug)]
struct Shared {
    current: Arc<Committed>,
    log: Option<CommitLog>,
}

#[derive(Clone, Debug)]
pub struct Database {
    shared: Arc<Mutex<Shared>>,
    name: String,
}

impl Database {
    pub fn in_memory() -> Database {
        Database::from_parts(State::new(), 0, None, "memory")
    }

    /// Opens or creates a database file, replaying its log.
    pub fn open(path: &Path) -> Result<Database> {
        Database::open_with(path, false)
    }

    /// As [`Database::open`]; with `sync` every commit is fsynced.
    pub fn open_with(path: &Path, sync: bool) -> Result<Database> {
        let (log, records) = CommitLog::open(path, sync)?;
        let mut state = State::new();
        let mut seq = 0;
        for rec in &records {
            state.apply_record(rec);
            seq = rec.seq;
        }
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Database::from_parts(state, seq, Some(log), &name))
    }

    fn from_parts(state: State, seq: u64, log: Option<CommitLog>, name: &str) -> Database {
        let graphs = graphs_of(&state);
        let current = Arc::new(Committed { seq, state, graphs });
        Database { shared: Arc::new(Mutex::new(Shared { current, log })), name: name.to_string() }
    }

    fn lock(&self) -> MutexGuard<'_, Shared> {
        self.shared.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Database name: the file stem, or `memory`.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn snapshot(&self) -> Arc<Committed> {
        self.lock().current.clone()
    }

    pub fn begin(&self) -> Transaction {
        let base = self.snapshot();
        Transaction {
            db: self.clone(),
            state: base.state.clone(),
            base,
            touched: OrdSet::new(),
            touched_types: OrdSet::new(),
        }
    }
}

/// Builds the graph partition of a state from scratch.
pub fn graphs_of(state: &State) -> GraphSet {
    let mut gs = GraphSet::new();
    for (uid, row) in state.rows() {
        if state.catalog.get(row.type_id).is_ok_and(|d| d.kind == TypeKind::Node) {
            gs.add_node(*uid);
        }
    }
    for (uid, _) in state.rows() {
        if let Some((l, a)) = state.endpoints(*uid) {
            gs.add_edge(*uid, l, a);
        }
    }
    gs
}

/// Restorable position inside a transaction.
#[derive(Clone)]
pub struct Savepoint {
    state: State,
    touched: OrdSet<Uid>,
    touched_types: OrdSet<TypeId>,
}

pub struct Transaction {
    db: Database,
    base: Arc<Committed>,
    state: State,
    touched: OrdSet<Uid>,
    /// Types whose descriptor changed; their rows are validated in full.
    touched_types: OrdSet<TypeId>,
}

impl Transaction {
    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn catalog(&self) -> &Catalog {
        &self.state.catalog
    }

    pub fn base(&self) -> &Arc<Committed> {
        &self.base
    }

    pub fn database(&self) -> &Database {
        &self.db
    }

    pub fn is_dirty(&self) -> bool {
        !self.touched.is_empty() || !self.touched_types.is_empty()
    }

    pub fn savepoint(&self) -> Savepoint {
        Savepoint { state: self.state.clone(), touched: self.touched.clone(), touched_types: self.touched_types.clone() }
    }

    pub fn restore(&mut self, sp: Savepoint) {
        self.state = sp.state;
        self.touched = sp.touched;
        self.touched_types = sp.touched_types;
    }

    /// Runs a catalog change and records which descriptors it modified.
    pub fn schema<T>(&mut self, f: impl FnOnce(&mut Catalog) -> Result<T>) -> Result<T> {
        let before = self.state.catalog.clone();
        let out = f(&mut self.state.catalog)?;
        for d in self.state.catalog.types() {
            let same = before.get_arc(d.id).is_some_and(|old| Arc::ptr_eq(old, d));
            if !same {
                self.touched_types.insert(d.id);
            }
        }
        Ok(out)
    }

    pub fn alloc_uid(&mut self) -> Uid {
        self.state.alloc_uid()
    }

    fn put(&mut self, uid: Uid, row: Row) {
        self.state.put_row(uid, row);
        self.touched.insert(uid);
    }

    /// Coerces `value` for `column` of type `id`. A decimal stored into an
    /// integer column widens the column to decimal first.
    fn coerce(&mut self, id: TypeId, column: &str, value: Value) -> Result<Value> {
        let (owner, col) = match self.state.catalog.column(id, column) {
            Some((o, c)) => (o, c.clone()),
            None => {
                let label = &self.state.catalog.get(id)?.label;
                return Err(Error::Schema(format!("{} has no column {}", label, column)));
            }
        };
        if let DataType::Structured(t) = col.data_type {
            if !value.is_null() {
                self.state.catalog.check_structured(t, &value)?;
            }
            return Ok(value);
        }
        match value.coerce_to(&col.data_type) {
            Ok(v) => Ok(v),
            Err(v @ Value::Decimal(_)) if col.data_type == DataType::Integer => {
                self.retype_column(owner, column, DataType::Decimal)?;
                Ok(v)
            }
            Err(v) => Err(Error::TypeMismatch(format!(
                "{}.{} is {}, got {}",
                self.state.catalog.get(id)?.label,
                column,
                col.data_type.sql_name(),
                v.to_text()
            ))),
        }
    }

    /// Changes a column's type and rewrites the stored values.
    pub fn retype_column(&mut self, owner: TypeId, column: &str, dt: DataType) -> Result<()> {
        let name = column.to_string();
        let target = dt.clone();
        self.schema(|c| c.retype_column(owner, &name, target))?;
        for uid in self.state.scan(owner) {
            let row = self.state.row(uid).unwrap();
            let v = row.get(column).clone();
            if v.is_null() {
                continue;
            }
            let nv = v.coerce_to(&dt).map_err(|v| Error::TypeMismatch(format!("cannot convert {}", v.to_text())))?;
            let mut row = row.as_ref().clone();
            row.values.insert(column.to_string(), nv);
            self.put(uid, row);
        }
        let root = self.state.catalog.root(owner);
        if self.state.catalog.primary_key(root).iter().any(|c| c == column) {
            self.refresh_references(root)?;
        }
        Ok(())
    }

    /// Inserts a row at a pre-allocated uid. The auto `ID` column is filled in.
    pub fn insert_row(&mut self, uid: Uid, type_id: TypeId, values: BTreeMap<String, Value>) -> Result<()> {
        let d = self.state.catalog.get(type_id)?;
        if d.kind == TypeKind::Plain {
            return Err(Error::Schema(format!("{} is not a node or edge type", d.label)));
        }
        let mut row = Row::new(type_id);
        for (k, v) in values {
            if let Some((_, c)) = self.state.catalog.column(type_id, &k) {
                if c.auto {
                    return Err(Error::Schema(format!("column {} is assigned automatically", k)));
                }
            }
            let v = self.coerce(type_id, &k, v)?;
            if !v.is_null() {
                row.values.insert(k, v);
            }
        }
        if self.state.catalog.column(type_id, ID).is_some_and(|(_, c)| c.auto) {
            row.values.insert(ID.into(), Value::Int(uid as i64));
        }
        self.put(uid, row);
        Ok(())
    }

    /// Sets one column. Changing a node's primary key rewrites the edges
    /// that reference it.
    pub fn update_row(&mut self, uid: Uid, column: &str, value: Value) -> Result<()> {
        let row = self.state.row(uid).ok_or(Error::UnknownRow(uid))?.clone();
        let d = self.state.catalog.get(row.type_id)?;
        let kind = d.kind;
        if let Some((_, c)) = self.state.catalog.column(row.type_id, column) {
            if c.auto {
                return Err(Error::Schema(format!("column {} is assigned automatically", column)));
            }
        }
        let value = self.coerce(row.type_id, column, value)?;
        let row = self.state.row(uid).unwrap().clone();
        if *row.get(column) == value {
            return Ok(());
        }
        let mut new = row.as_ref().clone();
        if value.is_null() {
            new.values.remove(column);
        } else {
            new.values.insert(column.to_string(), value.clone());
        }
        let is_key = kind == TypeKind::Node && self.state.catalog.primary_key(row.type_id).iter().any(|c| c == column);
        let incident: Vec<(Uid, bool)> = if is_key {
            let outs = self.state.out_edges(uid).map(|e| (e, true));
            let ins = self.state.in_edges(uid).map(|e| (e, false));
            outs.chain(ins).collect()
        } else {
            Vec::new()
        };
        self.put(uid, new);
        for (e, leaving) in incident {
            let mut er = self.state.row(e).unwrap().as_ref().clone();
            er.values.insert(if leaving { LEAVING } else { ARRIVING }.to_string(), value.clone());
            self.put(e, er);
        }
        Ok(())
    }

    /// Deletes a row. A node with edges needs `cascade`, which deletes them too.
    pub fn delete_row(&mut self, uid: Uid, cascade: bool) -> Result<()> {
        if self.state.row(uid).is_none() {
            return Ok(());
        }
        let mut edges: Vec<Uid> = self.state.out_edges(uid).chain(self.state.in_edges(uid)).collect();
        edges.sort_unstable();
        edges.dedup();
        if !edges.is_empty() && !self.state.is_edge(uid) {
            if !cascade {
                return Err(Error::Execution(format!(
                    "node #{} still has {} edge(s); use DELETE ... CASCADE",
                    uid,
                    edges.len()
                )));
            }
            for e in edges {
                self.state.remove_row(e);
                self.touched.insert(e);
            }
        }
        self.state.remove_row(uid);
        self.touched.insert(uid);
        Ok(())
    }

    /// Adds a column; CREATE uses this to widen a type with a new property.
    pub fn add_column(&mut self, id: TypeId, column: Column) -> Result<()> {
        self.schema(|c| c.widen_type(id, column))
    }

    /// Replaces the primary key of a node hierarchy. The old key stays
    /// unique and every edge referencing the hierarchy is rewritten to the
    /// new key, keeping the same endpoints.
    pub fn alter_primary_key(&mut self, id: TypeId, key: Vec<String>) -> Result<()> {
        let d = self.state.catalog.get(id)?;
        if d.kind != TypeKind::Node {
            return Err(Error::Schema(format!("{} is not a node type", d.label)));
        }
        if d.supertype.is_some() {
            return Err(Error::Schema(format!("{} inherits its key from its supertype", d.label)));
        }
        if key.is_empty() {
            return Err(Error::Schema("empty key".into()));
        }
        for k in &key {
            if self.state.catalog.column(id, k).is_none() {
                return Err(Error::Schema(format!("{} has no column {}", d.label, k)));
            }
        }
        // Pin endpoint uids before the key changes under them.
        let referencing = self.state.catalog.edge_types_referencing(id);
        let mut pinned = Vec::new();
        for t in &referencing {
            for e in self.state.scan(*t) {
                pinned.push((e, self.state.endpoints(e)));
            }
        }
        self.schema(|c| c.set_primary_key(id, key))?;
        self.state.reindex_root(id);
        self.rewrite_references(id, &pinned)
    }

    /// Re-derives reference column types and values after the key of `root`
    /// changed type.
    fn refresh_references(&mut self, root: TypeId) -> Result<()> {
        let mut pinned = Vec::new();
        for t in self.state.catalog.edge_types_referencing(root) {
            for e in self.state.scan(t) {
                pinned.push((e, self.state.endpoints(e)));
            }
        }
        self.rewrite_references(root, &pinned)
    }

    fn rewrite_references(&mut self, root: TypeId, pinned: &[(Uid, Option<(Uid, Uid)>)]) -> Result<()> {
        for t in self.state.catalog.edge_types_referencing(root) {
            let d = self.state.catalog.get(t)?;
            let (l, a) = (d.leaving.unwrap(), d.arriving.unwrap());
            self.schema(|c| c.set_endpoints(t, l, a))?;
        }
        let key = self.state.catalog.primary_key(root).to_vec();
        for (e, ends) in pinned {
            let Some((l, a)) = ends else { continue };
            let mut row = self.state.row(*e).unwrap().as_ref().clone();
            let d = self.state.catalog.get(row.type_id)?;
            for (col, node, end_type) in [(LEAVING, *l, d.leaving.unwrap()), (ARRIVING, *a, d.arriving.unwrap())] {
                if self.state.catalog.root(end_type) == root {
                    let v = self.state.row(node).map(|r| r.get(&key[0]).clone()).unwrap_or(Value::Null);
                    row.values.insert(col.to_string(), v);
                }
            }
            self.put(*e, row);
        }
        Ok(())
    }

    /// Drops a non-key column and its values.
    pub fn drop_column(&mut self, id: TypeId, column: &str) -> Result<()> {
        let (owner, col) = self
            .state
            .catalog
            .column(id, column)
            .map(|(o, c)| (o, c.clone()))
            .ok_or_else(|| Error::Schema(format!("no column {}", column)))?;
        let root = self.state.catalog.root(owner);
        if self.state.catalog.primary_key(root).contains(&col.name) || col.name == LEAVING || col.name == ARRIVING {
            return Err(Error::Schema(format!("cannot drop key column {}", column)));
        }
        self.schema(|c| c.remove_column(owner, column))?;
        for uid in self.state.scan(owner) {
            let row = self.state.row(uid).unwrap();
            if row.values.contains_key(column) {
                let mut row = row.as_ref().clone();
                row.values.remove(column);
                self.put(uid, row);
            }
        }
        self.state.reindex_root(root);
        Ok(())
    }

    /// Validates the transaction's effects against the schema.
    pub fn validate(&self) -> Vec<Violation> {
        let st = &self.state;
        let cat = &st.catalog;
        let mut scope: BTreeSet<Uid> = self.touched.iter().copied().filter(|u| st.row(*u).is_some()).collect();
        let mut full_edge_types = Vec::new();
        for t in self.touched_types.iter() {
            let Ok(d) = cat.get(*t) else { continue };
            match d.kind {
                TypeKind::Plain => {}
                TypeKind::Node => scope.extend(st.scan(*t)),
                TypeKind::Edge => {
                    scope.extend(st.scan(*t));
                    full_edge_types.push(*t);
                }
            }
        }
        let mut out = Vec::new();
        let label = |t: TypeId| cat.get(t).map(|d| d.label.clone()).unwrap_or_else(|_| t.to_string());

        // Column types and keys.
        let mut seen_keys = BTreeSet::new();
        for &uid in &scope {
            let row = st.row(uid).unwrap();
            let cols = cat.effective_columns(row.type_id);
            for (k, v) in &row.values {
                match cols.iter().find(|c| c.name == *k) {
                    None => out.push(violation(label(row.type_id), Rule::ColumnType, vec![uid], format!("unknown column {}", k))),
                    Some(c) if !conforms(cat, v, &c.data_type) => out.push(violation(
                        label(row.type_id),
                        Rule::ColumnType,
                        vec![uid],
                        format!("{} is not a valid {} for {}", v.to_text(), c.data_type.sql_name(), k),
                    )),
                    _ => {}
                }
            }
            let root = cat.root(row.type_id);
            let pk = cat.primary_key(root).to_vec();
            for c in &cols {
                if !c.nullable && row.get(&c.name).is_null() {
                    let rule = if pk.contains(&c.name) { Rule::KeyNull } else { Rule::ColumnType };
                    out.push(violation(label(row.type_id), rule, vec![uid], format!("{} is null", c.name)));
                }
            }
            let mut keys = vec![pk];
            keys.extend(cat.unique_keys(root).iter().cloned());
            for key in keys {
                if key.is_empty() {
                    continue;
                }
                let vals: Vec<Value> = key.iter().map(|c| row.get(c).clone()).collect();
                if vals.iter().any(Value::is_null) {
                    continue;
                }
                if st.key_holders(root, &key, &vals) > 1 && seen_keys.insert((root, key.clone(), vals.clone())) {
                    let holders = st.index_lookup(root, &key, &vals).unwrap_or_default();
                    let shown: Vec<String> = vals.iter().map(Value::to_text).collect();
                    out.push(violation(
                        label(root),
                        Rule::KeyUnique,
                        holders,
                        format!("duplicate key ({})=({})", key.join(","), shown.join(",")),
                    ));
                }
            }
        }

        // Referential integrity.
        let mut dangling: BTreeSet<Uid> = st.dangling().collect();
        dangling.extend(scope.iter().copied().filter(|u| st.is_edge(*u) && st.endpoints(*u).is_none()));
        for e in dangling {
            let row = st.row(e).unwrap();
            let d = cat.get(row.type_id).unwrap();
            out.push(violation(
                d.label.clone(),
                Rule::Referential,
                vec![e],
                format!(
                    "edge {}->{} does not connect a {} to a {}",
                    row.get(LEAVING).to_text(),
                    row.get(ARRIVING).to_text(),
                    label(d.leaving.unwrap()),
                    label(d.arriving.unwrap())
                ),
            ));
        }

        // Multiplicity.
        let mut nodes: BTreeSet<Uid> = BTreeSet::new();
        for &u in self.touched.iter() {
            match st.row(u) {
                Some(_) if st.is_edge(u) => nodes.extend(st.endpoints(u).into_iter().flat_map(|(l, a)| [l, a])),
                Some(_) => {
                    nodes.insert(u);
                }
                None => nodes.extend(self.base.state.endpoints(u).into_iter().flat_map(|(l, a)| [l, a])),
            }
            if let Some((l, a)) = self.base.state.endpoints(u) {
                nodes.extend([l, a]);
            }
        }
        nodes.retain(|n| st.row(*n).is_some() && !st.is_edge(*n));
        let edge_types: Vec<_> =
            cat.types().filter(|d| d.kind == TypeKind::Edge && !d.multiplicity.is_unconstrained()).cloned().collect();
        let mut checks: BTreeSet<(TypeId, Uid)> = BTreeSet::new();
        for &n in &nodes {
            for d in &edge_types {
                checks.insert((d.id, n));
            }
        }
        for t in &full_edge_types {
            let d = cat.get(*t).unwrap();
            if d.multiplicity.is_unconstrained() {
                continue;
            }
            for end in [d.leaving, d.arriving].into_iter().flatten() {
                for n in st.scan(end) {
                    checks.insert((*t, n));
                }
            }
        }
        for (t, n) in checks {
            let d = cat.get(t).unwrap();
            let m = d.multiplicity;
            let nt = st.row(n).unwrap().type_id;
            if cat.is_subtype_of(nt, d.leaving.unwrap()) {
                let count = st.out_edges(n).filter(|e| st.row(*e).is_some_and(|r| r.type_id == t)).count();
                if !m.allows_leaving(count) {
                    out.push(violation(
                        d.label.clone(),
                        Rule::Multiplicity,
                        vec![n],
                        format!(
                            "{} #{} has {} leaving {} edge(s), requires {}",
                            label(nt),
                            n,
                            count,
                            d.label,
                            range(m.leaving_min, m.leaving_max)
                        ),
                    ));
                }
            }
            if cat.is_subtype_of(nt, d.arriving.unwrap()) {
                let count = st.in_edges(n).filter(|e| st.row(*e).is_some_and(|r| r.type_id == t)).count();
                if !m.allows_arriving(count) {
                    out.push(violation(
                        d.label.clone(),
                        Rule::Multiplicity,
                        vec![n],
                        format!(
                            "{} #{} has {} arriving {} edge(s), requires {}",
                            label(nt),
                            n,
                            count,
                            d.label,
                            range(m.arriving_min, m.arriving_max)
                        ),
                    ));
                }
            }
        }

        // Constraints.
        for &uid in &scope {
            let row = st.row(uid).unwrap();
            for (owner, c) in cat.constraints(row.type_id) {
                let res = expr::eval(&c, st, &|name| Some(row.get(name).clone()));
                let failed = match res {
                    Ok(Value::Bool(false)) => Some(format!("CHECK ({}) is false", c)),
                    Ok(Value::Bool(true)) | Ok(Value::Null) => None,
                    Ok(v) => Some(format!("CHECK ({}) yields {}", c, v.to_text())),
                    Err(e) => Some(format!("CHECK ({}) failed: {}", c, e)),
                };
                if let Some(msg) = failed {
                    out.push(violation(label(owner), Rule::Check, vec![uid], msg));
                }
            }
        }
        out
    }

    /// Validates, logs and publishes. Nothing is written when the
    /// transaction made no changes.
    pub fn commit(self) -> Result<Arc<Committed>> {
        if !self.is_dirty() {
            return Ok(self.db.snapshot());
        }
        let db = self.db.clone();
        let mut shared = db.lock();
        if shared.current.seq != self.base.seq {
            return Err(Error::Conflict);
        }
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let seq = self.base.seq + 1;
        let mut rec = CommitRecord {
            seq,
            next_uid: self.state.next_uid,
            next_type_id: self.state.catalog.next_type_id(),
            types: Vec::new(),
            puts: Vec::new(),
            removes: Vec::new(),
        };
        for t in self.touched_types.iter() {
            if let Ok(d) = self.state.catalog.get(*t) {
                rec.types.push(d.clone());
            }
        }
        for u in self.touched.iter() {
            match self.state.row(*u) {
                Some(r) => rec.puts.push((*u, r.as_ref().clone())),
                None if self.base.state.row(*u).is_some() => rec.removes.push(*u),
                None => {}
            }
        }
        let graphs = self.graph_delta();
        if let Some(log) = shared.log.as_mut() {
            log.append(&rec)?;
        }
        let next = Arc::new(Committed { seq, state: self.state, graphs });
        shared.current = next.clone();
        Ok(next)
    }

    fn graph_delta(&self) -> GraphSet {
        let old = &self.base.state;
        let new = &self.state;
        let mut gs = self.base.graphs.clone();
        let mut add_nodes = Vec::new();
        let mut del_nodes = Vec::new();
        let mut add_edges = Vec::new();
        let mut del_edges = Vec::new();
        for u in self.touched.iter().copied() {
            let (was, is) = (old.row(u).is_some(), new.row(u).is_some());
            let edge = if is { new.is_edge(u) } else { old.is_edge(u) };
            if edge {
                let (before, after) = (old.endpoints(u), new.endpoints(u));
                if before != after {
                    if before.is_some() {
                        del_edges.push(u);
                    }
                    if let Some((l, a)) = after {
                        add_edges.push((u, l, a));
                    }
                }
            } else if was && !is {
                del_nodes.push(u);
            } else if !was && is {
                add_nodes.push(u);
            }
        }
        for e in del_edges {
            gs.remove_edge(e);
        }
        for n in del_nodes {
            gs.remove_node(n);
        }
        for n in add_nodes {
            gs.add_node(n);
        }
        for (e, l, a) in add_edges {
            gs.add_edge(e, l, a);
        }
        gs
    }
}

fn violation(type_label: String, rule: Rule, uids: Vec<Uid>, detail: String) -> Violation {
    Violation { type_label, rule, uids, detail }
}

fn range(min: u32, max: Option<u32>) -> String {
    match max {
        Some(m) => format!("{}..{}", min, m),
        None => format!("{}..*", min),
    }
}

fn conforms(cat: &Catalog, v: &Value, dt: &DataType) -> bool {
    match (dt, v) {
        (_, Value::Null) => true,
        (DataType::Integer, Value::Int(_))
        | (DataType::Decimal, Value::Decimal(_))
        | (DataType::String, Value::Str(_))
        | (DataType::Boolean, Value::Bool(_))
        | (DataType::Date, Value::Date(_))
        | (DataType::Currency, Value::Currency { .. }) => true,
        (DataType::Structured(t), v) => cat.check_structured(*t, v).is_ok(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Multiplicity;

    fn person_db() -> (Database, TypeId, TypeId) {
        let db = Database::in_memory();
        let mut tx = db.begin();
        let p = tx.schema(|c| c.define_node_type("PERSON", vec![Column::new("NAME", DataType::String)], None)).unwrap();
        let e = tx.schema(|c| c.define_edge_type("CHILD", vec![], "PERSON", "PERSON", None)).unwrap();
        tx.commit().unwrap();
        (db, p, e)
    }

    fn vals(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    fn person(tx: &mut Transaction, p: TypeId, name: &str) -> Uid {
        let u = tx.alloc_uid();
        tx.insert_row(u, p, vals(&[("NAME", Value::Str(name.into()))])).unwrap();
        u
    }

    fn child(tx: &mut Transaction, e: TypeId, l: Value, a: Value) -> Uid {
        let u = tx.alloc_uid();
        tx.insert_row(u, e, vals(&[(LEAVING, l), (ARRIVING, a)])).unwrap();
        u
    }

    #[test]
    fn commit_publishes_and_graphs_follow() {
        let (db, p, e) = person_db();
        let mut tx = db.begin();
        let a = person(&mut tx, p, "A");
        let b = person(&mut tx, p, "B");
        child(&mut tx, e, Value::Int(a as i64), Value::Int(b as i64));
        let c = tx.commit().unwrap();
        assert_eq!(c.seq, 2);
        assert_eq!(c.graphs.len(), 1);
        assert_eq!(c.graphs.representative(b), Some(a));
    }

    #[test]
    fn dangling_edge_rejected() {
        let (db, p, e) = person_db();
        let mut tx = db.begin();
        person(&mut tx, p, "A");
        child(&mut tx, e, Value::Int(1), Value::Int(99));
        let err = tx.commit().unwrap_err();
        assert_eq!(err.violations()[0].rule, Rule::Referential);
    }

    #[test]
    fn conflict_first_committer_wins() {
        let (db, p, _) = person_db();
        let mut t1 = db.begin();
        let mut t2 = db.begin();
        person(&mut t1, p, "A");
        person(&mut t2, p, "B");
        t1.commit().unwrap();
        assert!(matches!(t2.commit(), Err(Error::Conflict)));
    }

    #[test]
    fn key_change_cascades_to_edges() {
        let (db, p, e) = person_db();
        let mut tx = db.begin();
        let a = person(&mut tx, p, "A");
        let b = person(&mut tx, p, "B");
        let ed = child(&mut tx, e, Value::Int(a as i64), Value::Int(b as i64));
        tx.commit().unwrap();
        let mut tx = db.begin();
        tx.alter_primary_key(p, vec!["NAME".into()]).unwrap();
        let c = tx.commit().unwrap();
        assert_eq!(c.state.endpoints(ed), Some((a, b)));
        assert_eq!(*c.state.row(ed).unwrap().get(LEAVING), Value::Str("A".into()));
        let mut tx = db.begin();
        tx.update_row(a, "NAME", Value::Str("Z".into())).unwrap();
        let c = tx.commit().unwrap();
        assert_eq!(c.state.endpoints(ed), Some((a, b)));
        assert_eq!(*c.state.row(ed).unwrap().get(LEAVING), Value::Str("Z".into()));
    }

    #[test]
    fn multiplicity_enforced() {
        let (db, p, e) = person_db();
        let mut tx = db.begin();
        tx.schema(|c| c.set_multiplicity(e, Multiplicity::new((0, None), (0, Some(1)))?)).unwrap();
        let a = person(&mut tx, p, "A");
        let b = person(&mut tx, p, "B");
        let c = person(&mut tx, p, "C");
        child(&mut tx, e, Value::Int(a as i64), Value::Int(c as i64));
        child(&mut tx, e, Value::Int(b as i64), Value::Int(c as i64));
        let err = tx.commit().unwrap_err();
        let v = err.violations();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].rule, v[0].uids.clone()), (Rule::Multiplicity, vec![c]));
    }

    #[test]
    fn delete_needs_cascade() {
        let (db, p, e) = person_db();
        let mut tx = db.begin();
        let a = person(&mut tx, p, "A");
        let b = person(&mut tx, p, "B");
        child(&mut tx, e, Value::Int(a as i64), Value::Int(b as i64));
        tx.commit().unwrap();
        let mut tx = db.begin();
        assert!(tx.delete_row(a, false).is_err());
        tx.delete_row(a, true).unwrap();
        let c = tx.commit().unwrap();
        assert_eq!(c.state.row_count(), 1);
        assert_eq!(c.graphs.len(), 1);
    }

    #[test]
    fn decimal_widens_integer_column() {
        let db = Database::in_memory();
        let mut tx = db.begin();
        let t = tx.schema(|c| c.define_node_type("T", vec![Column::new("W", DataType::Integer)], None)).unwrap();
        let u1 = tx.alloc_uid();
        tx.insert_row(u1, t, vals(&[("W", Value::Int(4))])).unwrap();
        let u2 = tx.alloc_uid();
        tx.insert_row(u2, t, vals(&[("W", Value::Decimal(2.5))])).unwrap();
        let c = tx.commit().unwrap();
        assert_eq!(*c.state.row(u1).unwrap().get("W"), Value::Decimal(4.0));
        assert_eq!(c.state.catalog.column(t, "W").unwrap().1.data_type, DataType::Decimal);
    }
}
