//! Read-only HTTP export of the graph around a node.
//!
//! `GET /{db}/{role}/{TYPE}/{COL}='{value}'?NODE[&depth=k]` answers with the
//! anchor's whole graph component as JSON, or with the nodes within `k` hops
//! when `depth` is given. The role segment is accepted and ignored.

use std::collections::{BTreeSet, VecDeque};
use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use percent_encoding::percent_decode_str;
use serde_json::{json, Map, Value as Json};

use crate::catalog::TypeKind;
use crate::db::{Committed, Database};
use crate::error::{Error, Result};
use crate::expr;
use crate::value::{Uid, Value};

pub const DEFAULT_PORT: u16 = 8180;

#[derive(Clone, Debug, PartialEq)]
pub struct Response {
    pub status: u16,
    pub body: String,
}

impl Response {
    fn error(status: u16, message: impl Into<String>) -> Response {
        Response { status, body: json!({ "error": message.into() }).to_string() }
    }
}

struct Request {
    database: String,
    type_label: String,
    column: String,
    value: Value,
    depth: Option<usize>,
}

fn parse(url: &str) -> std::result::Result<Request, String> {
    let (path, query) = url.split_once('?').ok_or("missing ?NODE")?;
    let mut depth = None;
    let mut node = false;
    for flag in query.split('&') {
        match flag.split_once('=') {
            None if flag.eq_ignore_ascii_case("NODE") => node = true,
            Some((k, v)) if k.eq_ignore_ascii_case("depth") => {
                depth = Some(v.parse::<usize>().map_err(|_| format!("bad depth {:?}", v))?)
            }
            _ => return Err(format!("unsupported flag {:?}", flag)),
        }
    }
    if !node {
        return Err("missing ?NODE".into());
    }
    let segs: Vec<&str> = path.strip_prefix('/').unwrap_or(path).split('/').collect();
    let [database, _role, type_label, cond] = segs.as_slice() else {
        return Err("expected /{db}/{role}/{TYPE}/{COL}='{value}'".into());
    };
    let decode = |s: &str| percent_decode_str(s).decode_utf8().map(|c| c.into_owned()).map_err(|e| e.to_string());
    let cond = decode(cond)?;
    let (column, raw) = cond.split_once('=').ok_or("expected COL=value")?;
    let value = if let Some(inner) = raw.strip_prefix('\'').and_then(|r| r.strip_suffix('\'')) {
        Value::Str(inner.replace("''", "'"))
    } else if let Ok(i) = raw.parse::<i64>() {
        Value::Int(i)
    } else if let Ok(f) = raw.parse::<f64>() {
        Value::Decimal(f)
    } else {
        return Err(format!("value {:?} must be a number or single-quoted", raw));
    };
    if column.is_empty() {
        return Err("empty column name".into());
    }
    Ok(Request {
        database: decode(database)?,
        type_label: decode(type_label)?.to_uppercase(),
        column: column.to_uppercase(),
        value,
        depth,
    })
}

/// Answers one request against the latest committed snapshot.
pub fn handle(db: &Database, method: &str, url: &str) -> Response {
    if method != "GET" {
        return Response::error(405, "only GET is supported");
    }
    let req = match parse(url) {
        Ok(r) => r,
        Err(m) => return Response::error(400, m),
    };
    if !req.database.eq_ignore_ascii_case(db.name()) {
        return Response::error(404, format!("unknown database {}", req.database));
    }
    let snap = db.snapshot();
    match export(&snap, &req) {
        Ok(body) => Response { status: 200, body: body.to_string() },
        Err(e) => Response::error(404, e.to_string()),
    }
}

fn export(snap: &Committed, req: &Request) -> Result<Json> {
    let st = &snap.state;
    let cat = &st.catalog;
    let t = cat.require_label(&req.type_label, Some(TypeKind::Node))?.id;
    let Some((_, col)) = cat.column(t, &req.column) else {
        return Err(Error::Execution(format!("{} has no column {}", req.type_label, req.column)));
    };
    let want = req.value.clone().coerce_to(&col.data_type).unwrap_or_else(|v| v);
    let anchor = st
        .scan(t)
        .into_iter()
        .find(|u| {
            let have = st.row(*u).unwrap().get(&req.column);
            matches!(expr::compare(have, &want), Ok(Some(std::cmp::Ordering::Equal)))
        })
        .ok_or_else(|| Error::Execution(format!("no {} with {} = {}", req.type_label, req.column, want.to_text())))?;
    let graph = snap.graphs.graph_of(anchor).ok_or(Error::UnknownRow(anchor))?;
    let nodes: BTreeSet<Uid> = match req.depth {
        None => graph.nodes.iter().copied().collect(),
        Some(k) => within(snap, anchor, k),
    };
    let edges: BTreeSet<Uid> = graph
        .edges
        .iter()
        .copied()
        .filter(|e| st.endpoints(*e).is_some_and(|(l, a)| nodes.contains(&l) && nodes.contains(&a)))
        .collect();
    let node_json: Vec<Json> = nodes
        .iter()
        .map(|&u| {
            let row = st.row(u).unwrap();
            let key: Map<String, Json> =
                cat.primary_key(row.type_id).iter().map(|k| (k.clone(), to_json(row.get(k)))).collect();
            json!({
                "uid": u,
                "type": cat.get(row.type_id).map(|d| d.label.clone()).unwrap_or_default(),
                "key": key,
                "properties": properties(row),
            })
        })
        .collect();
    let edge_json: Vec<Json> = edges
        .iter()
        .map(|&e| {
            let row = st.row(e).unwrap();
            json!({
                "uid": e,
                "type": cat.get(row.type_id).map(|d| d.label.clone()).unwrap_or_default(),
                "leaving": to_json(row.get(crate::catalog::LEAVING)),
                "arriving": to_json(row.get(crate::catalog::ARRIVING)),
                "properties": properties(row),
            })
        })
        .collect();
    Ok(json!({
        "anchor": anchor,
        "representative": graph.representative(),
        "nodes": node_json,
        "edges": edge_json,
    }))
}

/// Nodes at most `k` hops from `anchor`, ignoring edge direction.
fn within(snap: &Committed, anchor: Uid, k: usize) -> BTreeSet<Uid> {
    let st = &snap.state;
    let mut seen = BTreeSet::from([anchor]);
    let mut queue = VecDeque::from([(anchor, 0)]);
    while let Some((n, d)) = queue.pop_front() {
        if d == k {
            continue;
        }
        for e in st.out_edges(n).chain(st.in_edges(n)) {
            if let Some((l, a)) = st.endpoints(e) {
                let m = if l == n { a } else { l };
                if seen.insert(m) {
                    queue.push_back((m, d + 1));
                }
            }
        }
    }
    seen
}

fn properties(row: &crate::store::Row) -> Map<String, Json> {
    row.values.iter().map(|(k, v)| (k.clone(), to_json(v))).collect()
}

pub fn to_json(v: &Value) -> Json {
    match v {
        Value::Null => Json::Null,
        Value::Bool(b) => json!(b),
        Value::Int(i) => json!(i),
        Value::Decimal(f) => json!(f),
        Value::Str(s) => json!(s),
        Value::Node(u) | Value::Edge(u) => json!(u),
        Value::Doc(m) => Json::Object(m.iter().map(|(k, v)| (k.clone(), to_json(v))).collect()),
        Value::Array(a) => Json::Array(a.iter().map(to_json).collect()),
        Value::Date(_) | Value::Currency { .. } => json!(v.to_text()),
    }
}

/// A running HTTP service; stops when dropped.
pub struct HttpService {
    server: Arc<tiny_http::Server>,
    worker: Option<JoinHandle<()>>,
}

impl HttpService {
    pub fn start(db: Database, addr: SocketAddr) -> Result<HttpService> {
        let server = tiny_http::Server::http(addr).map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        let server = Arc::new(server);
        let srv = Arc::clone(&server);
        let worker = std::thread::spawn(move || {
            for request in srv.incoming_requests() {
                let method = request.method().as_str().to_ascii_uppercase();
                let resp = handle(&db, &method, request.url());
                log::info!("{} {} -> {}", method, request.url(), resp.status);
                let header = tiny_http::Header::from_bytes("Content-Type", "application/json").unwrap();
                let out = tiny_http::Response::from_string(resp.body).with_status_code(resp.status).with_header(header);
                if let Err(e) = request.respond(out) {
                    log::warn!("response failed: {}", e);
                }
            }
        });
        Ok(HttpService { server, worker: Some(worker) })
    }

    pub fn local_addr(&self) -> Option<SocketAddr> {
        self.server.server_addr().to_ip()
    }

    /// Blocks until the service stops.
    pub fn wait(mut self) {
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

impl Drop for HttpService {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}
