//! Statement execution and result tables.
//!
//! A [`Session`] runs each statement in its own transaction unless BEGIN
//! opened one. A failing statement leaves no trace in its transaction.

mod create;
mod schema;

use std::fmt::Write as _;

use crate::db::{Database, Transaction};
use crate::error::{Error, Result};
use crate::expr;
use crate::matcher::{self, Env};
use crate::parser::ast::{Expr, MatchStatement, ReturnItem, Statement};
use crate::parser::{self, ast::ParsedStatement};
use crate::store::State;
use crate::value::Value;

/// Rows produced by a query, with cells already rendered for display.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub cells: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: Vec<String>) -> Table {
        Table { headers: headers.into_iter().map(|h| h.to_uppercase()).collect(), rows: Vec::new(), cells: Vec::new() }
    }

    fn push(&mut self, row: Vec<Value>, state: &State) {
        self.cells.push(row.iter().map(|v| render_value(v, state)).collect());
        self.rows.push(row);
    }

    /// Values of one column, by header.
    pub fn column(&self, header: &str) -> Option<Vec<&Value>> {
        let i = self.headers.iter().position(|h| h == header)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Dashed table layout used by the shell.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("-----\n|");
        for h in &self.headers {
            let _ = write!(s, "{}|", h);
        }
        s.push_str("\n-----\n");
        for r in &self.cells {
            s.push('|');
            for c in r {
                let _ = write!(s, "{}|", c);
            }
            s.push('\n');
        }
        s.push_str("-----\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Statement ran; nothing to show.
    Done,
    Table(Table),
}

impl Outcome {
    pub fn table(&self) -> Option<&Table> {
        match self {
            Outcome::Table(t) => Some(t),
            Outcome::Done => None,
        }
    }
}

/// Display form: nodes and edges as `LABEL(COL=v,...)`, arrays as `ARRAY[...]`.
pub fn render_value(v: &Value, state: &State) -> String {
    match v {
        Value::Node(u) | Value::Edge(u) => {
            let Some(row) = state.row(*u) else { return format!("#{}", u) };
            let Ok(d) = state.catalog.get(row.type_id) else { return format!("#{}", u) };
            let fields: Vec<String> = state
                .catalog
                .effective_columns(row.type_id)
                .iter()
                .filter(|c| !row.get(&c.name).is_null())
                .map(|c| format!("{}={}", c.name, render_value(row.get(&c.name), state)))
                .collect();
            format!("{}({})", d.label, fields.join(","))
        }
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(|x| render_value(x, state)).collect();
            format!("ARRAY[{}]", inner.join(","))
        }
        other => other.to_text(),
    }
}

pub struct Session {
    db: Database,
    tx: Option<Transaction>,
    explicit: bool,
}

impl Session {
    pub fn new(db: Database) -> Session {
        Session { db, tx: None, explicit: false }
    }

    pub fn database(&self) -> &Database {
        &self.db
    }

    /// True between BEGIN and COMMIT/ROLLBACK.
    pub fn in_transaction(&self) -> bool {
        self.explicit
    }

    /// State visible to this session, including its open transaction.
    pub fn with_state<T>(&self, f: impl FnOnce(&State) -> T) -> T {
        match &self.tx {
            Some(tx) => f(tx.state()),
            None => f(&self.db.snapshot().state),
        }
    }

    pub fn execute(&mut self, stmt: &Statement) -> Result<Outcome> {
        match stmt {
            Statement::Begin => {
                if self.explicit {
                    return Err(Error::Execution("a transaction is already open".into()));
                }
                self.tx = Some(self.db.begin());
                self.explicit = true;
                Ok(Outcome::Done)
            }
            Statement::Commit => {
                let tx = self.take_explicit()?;
                tx.commit()?;
                Ok(Outcome::Done)
            }
            Statement::Rollback => {
                self.take_explicit()?;
                Ok(Outcome::Done)
            }
            _ => {
                let mut tx = self.tx.take().unwrap_or_else(|| self.db.begin());
                let sp = tx.savepoint();
                let res = run(&mut tx, stmt, &Env::new());
                if res.is_err() {
                    tx.restore(sp);
                }
                if self.explicit {
                    self.tx = Some(tx);
                    return res;
                }
                let out = res?;
                tx.commit()?;
                Ok(out)
            }
        }
    }

    fn take_explicit(&mut self) -> Result<Transaction> {
        if !self.explicit {
            return Err(Error::NoTransaction);
        }
        self.explicit = false;
        self.tx.take().ok_or(Error::NoTransaction)
    }

    /// Parses and runs a script, stopping at the first failing statement.
    pub fn execute_script(&mut self, src: &str) -> Result<Vec<Outcome>> {
        let stmts = parser::parse_script(src)?;
        stmts.iter().map(|p: &ParsedStatement| self.execute(&p.statement)).collect()
    }
}

fn lookup(env: &Env, name: &str) -> Option<Value> {
    env.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v.clone())
}

pub(crate) fn eval(tx: &Transaction, e: &Expr, env: &Env) -> Result<Value> {
    expr::eval(e, tx.state(), &|n| lookup(env, n))
}

fn run(tx: &mut Transaction, stmt: &Statement, env: &Env) -> Result<Outcome> {
    match stmt {
        Statement::Create { graphs, then } => create::exec_create(tx, graphs, then.as_deref(), env),
        Statement::Match(m) => exec_match(tx, m, env),
        Statement::Return(items) => {
            let mut t = Table::new(items.iter().map(header).collect());
            let row = items.iter().map(|it| eval(tx, &it.expr, env)).collect::<Result<Vec<_>>>()?;
            t.push(row, tx.state());
            Ok(Outcome::Table(t))
        }
        Statement::Set(assignments) => create::exec_set(tx, assignments, env),
        Statement::Delete { targets, cascade } => create::exec_delete(tx, targets, *cascade, env),
        Statement::CreateType(def) => schema::exec_create_type(tx, def),
        Statement::Alter { target, action } => schema::exec_alter(tx, target, action),
        Statement::Begin | Statement::Commit | Statement::Rollback => {
            Err(Error::Execution("transaction control is not allowed inside another statement".into()))
        }
        Statement::CreateRole(_) | Statement::Grant { .. } => Ok(Outcome::Done),
        Statement::ShowGraphs => {
            let snap = tx.database().snapshot();
            let mut t = Table::new(vec!["REPRESENTATIVE".into(), "NODES".into(), "EDGES".into()]);
            for g in snap.graphs.graphs() {
                let row = vec![
                    Value::Int(g.representative() as i64),
                    Value::Int(g.nodes.len() as i64),
                    Value::Int(g.edges.len() as i64),
                ];
                t.push(row, &snap.state);
            }
            Ok(Outcome::Table(t))
        }
    }
}

fn header(it: &ReturnItem) -> String {
    match (&it.alias, &it.expr) {
        (Some(a), _) => a.clone(),
        (None, Expr::Field(_, f)) => f.clone(),
        (None, Expr::Var(v)) => v.clone(),
        (None, e) => e.to_string(),
    }
}

fn exec_match(tx: &mut Transaction, m: &MatchStatement, env: &Env) -> Result<Outcome> {
    let b = matcher::find_bindings(m, tx.state(), env)?;
    if m.dependent.is_none() && m.then_block.is_empty() {
        if b.columns.is_empty() {
            let mut t = Table::new(vec!["EXISTS".into()]);
            t.push(vec![Value::Bool(!b.rows.is_empty())], tx.state());
            return Ok(Outcome::Table(t));
        }
        let mut t = Table::new(b.columns.clone());
        for r in b.rows {
            t.push(r, tx.state());
        }
        return Ok(Outcome::Table(t));
    }
    let mut table: Option<Table> = None;
    if let Some(d) = &m.dependent {
        for i in 0..b.rows.len() {
            if let Outcome::Table(t) = run(tx, d, &b.env(env, i))? {
                match &mut table {
                    Some(acc) => {
                        acc.rows.extend(t.rows);
                        acc.cells.extend(t.cells);
                    }
                    None => table = Some(t),
                }
            }
        }
        if table.is_none() {
            if let Statement::Return(items) = d.as_ref() {
                table = Some(Table::new(items.iter().map(header).collect()));
            }
        }
    }
    for i in 0..b.rows.len() {
        let e = b.env(env, i);
        for s in &m.then_block {
            run(tx, s, &e)?;
        }
    }
    Ok(table.map_or(Outcome::Done, Outcome::Table))
}

/// Uid of the node or edge bound to `name`.
pub(crate) fn bound_row(env: &Env, name: &str) -> Result<u64> {
    match lookup(env, name) {
        Some(Value::Node(u)) | Some(Value::Edge(u)) => Ok(u),
        Some(other) => Err(Error::TypeMismatch(format!("{} is {}, not a node or edge", name, other.to_text()))),
        None => Err(Error::Unbound(name.to_string())),
    }
}
