//! End-to-end acceptance checks, one test (or group) per criterion.

mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use serde_json::Value as Json;
use tgdb_core::{Database, Outcome, Rule, Session, TypeKind, Value};

use oracle::{Graph, Mode, Pattern, Quant, Step};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_tgdb")
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

/// Runs the shell on `db` with `input` on stdin.
fn shell(db: &Path, input: &str) -> Output {
    let mut child = Command::new(bin())
        .arg(db)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn script(db: &Path, file: &Path, extra: &[&str]) -> Output {
    Command::new(bin()).arg(db).arg("--script").arg(file).args(extra).output().unwrap()
}

/// Result tables in printed order: header cells, then rows of cells.
fn tables(out: &str) -> Vec<(Vec<String>, Vec<Vec<String>>)> {
    let cells = |l: &str| -> Vec<String> {
        l.trim_start_matches('|').trim_end_matches('|').split('|').map(String::from).collect()
    };
    let lines: Vec<&str> = out.lines().collect();
    let mut res = Vec::new();
    let mut i = 0;
    while i + 2 < lines.len() {
        assert_eq!(lines[i], "-----", "unexpected output line {:?}", lines[i]);
        let header = cells(lines[i + 1]);
        assert_eq!(lines[i + 2], "-----");
        let mut rows = Vec::new();
        i += 3;
        while lines[i] != "-----" {
            rows.push(cells(lines[i]));
            i += 1;
        }
        i += 1;
        res.push((header, rows));
    }
    res
}

fn set(rows: &[Vec<String>]) -> BTreeSet<Vec<String>> {
    rows.iter().cloned().collect()
}

fn family_names() -> BTreeSet<Vec<String>> {
    ["Lee Smith", "Bill Smith", "Mary Smith", "Fred Smith"].iter().map(|n| vec![n.to_string()]).collect()
}

fn replay_family(dir: &Path) -> (PathBuf, Duration, Output) {
    let db = dir.join("ps");
    let src = std::fs::read_to_string(corpus("family.sql")).unwrap();
    let t0 = Instant::now();
    let out = shell(&db, &src);
    (db, t0.elapsed(), out)
}

// Criterion 1.
#[test]
fn c1_family_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let (db, elapsed, out) = replay_family(dir.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(out.status.success() && stderr.is_empty(), "{}", stderr);
    assert!(elapsed < Duration::from_secs(1), "took {:?}", elapsed);

    let t = tables(&stdout);
    assert_eq!(t.len(), 2);
    assert_eq!(t[0].0, ["NAME"]);
    assert_eq!(set(&t[0].1), family_names());
    assert_eq!(t[0].1.len(), 4);

    // Expected binding table, compared as a set.
    let expected: BTreeSet<Vec<String>> = [
        ("ARRAY[PERSON(ID=2,NAME=Peter Smith),PERSON(ID=1,NAME=Fred Smith),PERSON(ID=3,NAME=Mary Smith)]", "Lee Smith"),
        ("ARRAY[PERSON(ID=2,NAME=Peter Smith),PERSON(ID=1,NAME=Fred Smith),PERSON(ID=3,NAME=Mary Smith)]", "Bill Smith"),
        ("ARRAY[PERSON(ID=2,NAME=Peter Smith),PERSON(ID=1,NAME=Fred Smith)]", "Mary Smith"),
        ("ARRAY[PERSON(ID=2,NAME=Peter Smith)]", "Fred Smith"),
    ]
    .iter()
    .map(|(p, x)| vec![p.to_string(), x.to_string()])
    .collect();
    assert_eq!(t[1].0, ["P", "X"]);
    assert_eq!(set(&t[1].1), expected);
    let lens: BTreeMap<String, usize> =
        t[1].1.iter().map(|r| (r[1].clone(), r[0].matches("PERSON(").count())).collect();
    assert_eq!(lens["Lee Smith"], 3);
    assert_eq!(lens["Bill Smith"], 3);
    assert_eq!(lens["Mary Smith"], 2);
    assert_eq!(lens["Fred Smith"], 1);

    // After both ALTERs the first query still answers the same set.
    let again = shell(&db, "MATCH ({name:'Peter Smith'}) [()-[:Child]->()]+ (x) RETURN x.name\n");
    assert!(again.status.success());
    let t = tables(&String::from_utf8(again.stdout).unwrap());
    assert_eq!(set(&t[0].1), family_names());

    let snap = Database::open(&db).unwrap().snapshot();
    let person = snap.state.catalog.lookup_label("PERSON", Some(TypeKind::Node)).unwrap().id;
    assert_eq!(snap.state.catalog.primary_key(person), ["NAME"]);
    assert!(snap.state.catalog.column(person, "ID").is_none());
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn http_get(port: u16, path: &str) -> (u16, String) {
    let deadline = Instant::now() + Duration::from_secs(10);
    let mut conn = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(c) => break c,
            Err(e) if Instant::now() > deadline => panic!("no server on {}: {}", port, e),
            Err(_) => std::thread::sleep(Duration::from_millis(20)),
        }
    };
    write!(conn, "GET {} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n", path).unwrap();
    let mut raw = String::new();
    conn.read_to_string(&mut raw).unwrap();
    let status = raw.split_whitespace().nth(1).unwrap().parse().unwrap();
    let body = raw.split_once("\r\n\r\n").map(|(_, b)| b.to_string()).unwrap_or_default();
    (status, body)
}

// Criterion 2.
#[test]
fn c2_family_graph_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let (db, _, out) = replay_family(dir.path());
    assert!(out.status.success());
    let port = free_port();
    let mut child = Command::new(bin())
        .arg(&db)
        .arg("--http")
        .arg(port.to_string())
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let (status, body) = http_get(port, "/ps/PS/PERSON/NAME='Peter%20Smith'?NODE");
    let (missing, _) = http_get(port, "/ps/PS/PERSON/NAME='Nobody'?NODE");
    drop(child.stdin.take());
    assert!(child.wait().unwrap().success());
    assert_eq!(status, 200, "{}", body);
    assert_eq!(missing, 404);

    let j: Json = serde_json::from_str(&body).unwrap();
    let nodes = j["nodes"].as_array().unwrap();
    let edges = j["edges"].as_array().unwrap();
    assert_eq!((nodes.len(), edges.len()), (5, 4));
    let names: BTreeSet<&str> = nodes.iter().map(|n| n["key"]["NAME"].as_str().unwrap()).collect();
    for e in edges {
        assert_eq!(e["type"], "CHILD");
        assert!(names.contains(e["leaving"].as_str().unwrap()), "{}", e);
        assert!(names.contains(e["arriving"].as_str().unwrap()), "{}", e);
    }
    let peter = nodes.iter().find(|n| n["key"]["NAME"] == "Peter Smith").unwrap();
    assert_eq!(j["anchor"], peter["uid"]);
}

fn load_erp(dir: &Path) -> PathBuf {
    let db = dir.join("erp");
    let out = script(&db, &corpus("erp.sql"), &[]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(out.status.success() && stderr.is_empty(), "{}", stderr);
    db
}

// Criterion 3.
#[test]
fn c3_erp_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let db = load_erp(dir.path());
    {
        let snap = Database::open(&db).unwrap().snapshot();
        let cat = &snap.state.catalog;
        let nodes: BTreeSet<String> =
            cat.types().filter(|d| d.kind == TypeKind::Node && d.label != "PART").map(|d| d.label.clone()).collect();
        let expected: BTreeSet<String> = [
            "CUSTOMER", "CUSTORDER", "ORDERPOS", "LOCATION", "PURCHASEDPART", "INHOUSEPRODUCT", "STOCK", "SUPPLIER",
            "SUPPLORD", "PURCHPOS", "SUPPLCATALOG",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(nodes, expected);
        let part = cat.lookup_label("PART", Some(TypeKind::Node)).unwrap().id;
        for sub in ["PURCHASEDPART", "INHOUSEPRODUCT"] {
            assert_eq!(cat.lookup_label(sub, Some(TypeKind::Node)).unwrap().supertype, Some(part));
        }
        let edges: BTreeSet<&str> = cat.types().filter(|d| d.kind == TypeKind::Edge).map(|d| d.label.as_str()).collect();
        let expected: BTreeSet<&str> = [
            "ORDERED_BY", "BELONGS_TO", "IS_PART_OF", "STOCKED", "AT", "SUPPLIED_BY", "IS_POS_OF", "HAS", "ORDERS",
            "FROM", "SUPPLIED", "CAN_SUPPLY", "SERVES",
        ]
        .into_iter()
        .collect();
        assert_eq!(edges, expected);
        let belongs = cat.lookup_label("BELONGS_TO", Some(TypeKind::Edge)).unwrap();
        assert_eq!(belongs.multiplicity.arriving_min, 1);
        assert_eq!(cat.get(belongs.arriving.unwrap()).unwrap().label, "CUSTORDER");
    }

    let out = shell(
        &db,
        "MATCH (c:Customer {CustNo:1006}) CREATE (:CustOrder {OrdNo:2009, CustNo:1006})-[:ORDERED_BY]->(c)\n",
    );
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(!out.status.success());
    assert!(stderr.contains("multiplicity violation on BELONGS_TO"), "{}", stderr);
    assert!(stderr.contains("arriving BELONGS_TO"), "{}", stderr);

    let mut s = Session::new(Database::open(&db).unwrap());
    let found = s.execute_script("MATCH (o:CustOrder {OrdNo:2009}) RETURN o").unwrap();
    assert!(found[0].table().unwrap().rows.is_empty());
}

#[test]
fn c3_erp_part_export_matches_component() {
    let dir = tempfile::tempdir().unwrap();
    let db = Database::open(&load_erp(dir.path())).unwrap();
    let r = tgdb_core::httpd::handle(&db, "GET", "/erp/ERP/PART/PARTID='P02'?NODE");
    assert_eq!(r.status, 200, "{}", r.body);
    let j: Json = serde_json::from_str(&r.body).unwrap();
    let snap = db.snapshot();
    let anchor = j["anchor"].as_u64().unwrap();
    let g = snap.graphs.graph_of(anchor).unwrap();
    let nodes: BTreeSet<u64> = j["nodes"].as_array().unwrap().iter().map(|n| n["uid"].as_u64().unwrap()).collect();
    let edges: BTreeSet<u64> = j["edges"].as_array().unwrap().iter().map(|n| n["uid"].as_u64().unwrap()).collect();
    assert_eq!(nodes, g.nodes.iter().copied().collect());
    assert_eq!(edges, g.edges.iter().copied().collect());
    // P02's bill of materials lies inside the export.
    let ids: BTreeSet<&str> = j["nodes"].as_array().unwrap().iter().filter_map(|n| n["key"]["PARTID"].as_str()).collect();
    for p in ["P02", "P11", "P12", "P13"] {
        assert!(ids.contains(p), "{}", p);
    }
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1usize..=8).prop_flat_map(|n| {
        (
            proptest::collection::vec(0usize..3, n),
            proptest::collection::vec((0..n, 0..n, 0usize..3), 0..=12),
        )
            .prop_map(|(nodes, edges)| Graph { nodes, edges })
    })
}

fn pattern_strategy() -> impl Strategy<Value = Pattern> {
    let label = prop_oneof![3 => Just(None), 1 => (0usize..3).prop_map(Some)];
    let quant = prop_oneof![
        Just(Quant::One),
        Just(Quant::Optional),
        Just(Quant::Star),
        Just(Quant::Plus),
        Just(Quant::OneTwo)
    ];
    let step = (any::<bool>(), 0usize..3, quant, label.clone())
        .prop_map(|(forward, label, quant, node_label)| Step { forward, label, quant, node_label });
    (label, proptest::collection::vec(step, 1..=3)).prop_map(|(first_label, steps)| Pattern { first_label, steps })
}

fn engine_rows(s: &mut Session, q: &str) -> (BTreeSet<Vec<usize>>, usize) {
    let out = s.execute_script(q).unwrap_or_else(|e| panic!("{}: {}", q, e));
    let t = out[0].table().unwrap();
    let rows: Vec<Vec<usize>> = t
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| match v {
                    Value::Int(i) => *i as usize,
                    other => panic!("unexpected {:?}", other),
                })
                .collect()
        })
        .collect();
    let n = rows.len();
    (rows.into_iter().collect(), n)
}

// Criterion 4.
proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn c4_matcher_equals_enumeration_oracle(g in graph_strategy(), p in pattern_strategy()) {
        let mut s = Session::new(Database::in_memory());
        s.execute_script(&oracle::build_script(&g)).unwrap();
        let before = s.database().snapshot().digest();
        for mode in [Mode::Default, Mode::Trail, Mode::Acyclic] {
            let q = oracle::query(&p, mode);
            let (got, n) = engine_rows(&mut s, &q);
            let want = oracle::enumerate(&g, &p, mode);
            prop_assert_eq!(n, got.len(), "duplicate rows for {}", q);
            prop_assert_eq!(got, want, "{}", q);
        }
        prop_assert_eq!(s.database().snapshot().digest(), before);
    }
}

/// Partition of `nodes` under `edges`, each part as (nodes, edges).
fn union_find(nodes: &BTreeSet<u64>, edges: &BTreeMap<u64, (u64, u64)>) -> BTreeSet<(BTreeSet<u64>, BTreeSet<u64>)> {
    let mut parent: BTreeMap<u64, u64> = nodes.iter().map(|n| (*n, *n)).collect();
    fn find(p: &mut BTreeMap<u64, u64>, x: u64) -> u64 {
        let mut r = x;
        while p[&r] != r {
            r = p[&r];
        }
        let mut c = x;
        while p[&c] != r {
            let next = p[&c];
            p.insert(c, r);
            c = next;
        }
        r
    }
    for (a, b) in edges.values() {
        let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
        if ra != rb {
            parent.insert(ra.max(rb), ra.min(rb));
        }
    }
    let mut parts: BTreeMap<u64, (BTreeSet<u64>, BTreeSet<u64>)> = BTreeMap::new();
    for n in nodes {
        let r = find(&mut parent, *n);
        parts.entry(r).or_default().0.insert(*n);
    }
    for (e, (a, _)) in edges {
        let r = find(&mut parent, *a);
        parts.get_mut(&r).unwrap().1.insert(*e);
    }
    parts.into_values().collect()
}

#[derive(Clone, Debug)]
enum Event {
    Add(usize, usize),
    /// Removes the i-th live edge, modulo the number of live edges.
    Remove(usize),
}

// Criterion 5.
proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn c5_graphset_equals_union_find(
        n in 1usize..=10,
        batches in proptest::collection::vec(
            (proptest::collection::vec(
                prop_oneof![
                    3 => (0usize..10, 0usize..10).prop_map(|(a, b)| Event::Add(a, b)),
                    2 => any::<usize>().prop_map(Event::Remove),
                ],
                1..=4,
            ), any::<bool>()),
            1..=50,
        )
    ) {
        let db = Database::in_memory();
        let mut s = Session::new(db.clone());
        let nodes: Vec<String> = (0..n).map(|i| format!("(:N {{k:{}}})", i)).collect();
        s.execute_script(&format!("[CREATE {}]", nodes.join(", "))).unwrap();
        let node_uid: Vec<u64> = (0..n)
            .map(|i| {
                let t = s.execute_script(&format!("MATCH (x:N {{k:{}}}) RETURN x", i)).unwrap();
                match &t[0].table().unwrap().rows[0][0] {
                    Value::Node(u) => *u,
                    other => panic!("{:?}", other),
                }
            })
            .collect();
        let node_set: BTreeSet<u64> = node_uid.iter().copied().collect();
        let mut live: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        let mut tag = 0;
        for (events, commit) in batches {
            s.execute_script("BEGIN").unwrap();
            let mut staged = live.clone();
            for ev in events {
                match ev {
                    Event::Add(a, b) => {
                        let (a, b) = (a % n, b % n);
                        tag += 1;
                        s.execute_script(&format!(
                            "MATCH (a:N {{k:{}}}), (b:N {{k:{}}}) CREATE (a)-[:E {{tag:{}}}]->(b)", a, b, tag
                        )).unwrap();
                        let t = s.execute_script(&format!("MATCH ()-[e:E {{tag:{}}}]->() RETURN e", tag)).unwrap();
                        let Value::Edge(e) = t[0].table().unwrap().rows[0][0] else { panic!() };
                        staged.insert(e, (node_uid[a], node_uid[b]));
                    }
                    Event::Remove(i) => {
                        if staged.is_empty() {
                            continue;
                        }
                        let e = *staged.keys().nth(i % staged.len()).unwrap();
                        s.execute_script(&format!("MATCH ()-[e:E {{ID:{}}}]->() DELETE e", e)).unwrap();
                        staged.remove(&e);
                    }
                }
            }
            if commit {
                s.execute_script("COMMIT").unwrap();
                live = staged;
            } else {
                s.execute_script("ROLLBACK").unwrap();
            }
            let snap = db.snapshot();
            let got: BTreeSet<(BTreeSet<u64>, BTreeSet<u64>)> = snap
                .graphs
                .graphs()
                .into_iter()
                .map(|g| (g.nodes.iter().copied().collect(), g.edges.iter().copied().collect()))
                .collect();
            prop_assert_eq!(&got, &union_find(&node_set, &live));
            for g in snap.graphs.graphs() {
                prop_assert_eq!(g.representative(), *g.nodes.iter().min().unwrap());
            }
        }
    }
}

fn run_stmts(db: &Path, lines: &[String], extra: &[&str]) -> Output {
    let dir = db.parent().unwrap();
    let file = dir.join(format!("{}.sql", db.file_name().unwrap().to_string_lossy()));
    std::fs::write(&file, lines.join("\n")).unwrap();
    script(db, &file, extra)
}

fn rate(stderr: &str) -> f64 {
    let line = stderr.lines().last().unwrap();
    let inner = line.split('(').nth(1).unwrap();
    inner.split_whitespace().next().unwrap().parse().unwrap()
}

// Criterion 6 (informational: the rate is reported, not enforced).
#[test]
fn c6_throughput() {
    const N: usize = 10_000;
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("bench");
    let setup = run_stmts(&db, &["create type P as (k int) nodetype".into(), "alter type P add primary key(k)".into()], &[]);
    assert!(setup.status.success());

    let creates: Vec<String> = (0..N).map(|i| format!("CREATE (:P {{k:{}}})", i)).collect();
    let out = run_stmts(&db, &creates, &["--time"]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(out.status.success(), "{}", stderr);
    let create_rate = rate(&stderr);

    let links: Vec<String> =
        (0..N - 1).map(|i| format!("MATCH (a:P {{k:{}}}), (b:P {{k:{}}}) CREATE (a)-[:E]->(b)", i, i + 1)).collect();
    assert!(run_stmts(&db, &links, &[]).status.success());

    let matches: Vec<String> = (0..N - 1).map(|i| format!("MATCH (a:P {{k:{}}})-[:E]->(b) RETURN b.k", i)).collect();
    let out = run_stmts(&db, &matches, &["--time"]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(out.status.success(), "{}", stderr);
    let match_rate = rate(&stderr);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(tables(&stdout).len(), N - 1);

    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    eprintln!("throughput ({} build): CREATE {:.0}/s, MATCH {:.0}/s, target 2500/s", profile, create_rate, match_rate);
    if create_rate < 2500.0 || match_rate < 2500.0 {
        eprintln!("below the 2500 statements/s target on this machine and build profile");
    }
}

/// One small transaction of the durability script.
fn durability_stmt(i: usize) -> String {
    match i % 4 {
        0 | 1 => format!("CREATE (:N {{k:{}}})", i),
        2 => format!("MATCH (a:N {{k:{}}}), (b:N {{k:{}}}) CREATE (a)-[:E {{t:{}}}]->(b)", i - 2, i - 1, i),
        _ => format!("MATCH (a:N {{k:{}}}) SET a.seen = {}", i - 3, i),
    }
}

// Criterion 7: cut the log at every commit boundary and inside the next frame.
#[test]
fn c7_log_prefixes_reopen_to_committed_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dur");
    let mut digests = Vec::new();
    let mut lengths = Vec::new();
    {
        let db = Database::open(&path).unwrap();
        digests.push(db.snapshot().digest());
        lengths.push(std::fs::metadata(&path).unwrap().len());
        let mut s = Session::new(db.clone());
        for i in 0..100 {
            s.execute_script(&durability_stmt(i)).unwrap();
            digests.push(db.snapshot().digest());
            lengths.push(std::fs::metadata(&path).unwrap().len());
        }
    }
    let full = std::fs::read(&path).unwrap();
    let cut = dir.path().join("cut");
    for k in 0..=100 {
        let end = lengths[k] as usize;
        let torn = if k < 100 { end + (lengths[k + 1] as usize - end) / 2 } else { end };
        for len in [end, torn] {
            std::fs::write(&cut, &full[..len]).unwrap();
            let db = Database::open(&cut).unwrap();
            assert_eq!(db.snapshot().digest(), digests[k], "prefix {} cut at {}", k, len);
            // The torn tail is gone, so the next commit lands cleanly.
            drop(db);
            assert_eq!(std::fs::metadata(&cut).unwrap().len() as usize, end);
        }
    }
}

// Criterion 7: kill the shell process mid-session and reopen.
#[test]
fn c7_killed_shell_keeps_committed_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let mut digests = vec![Database::in_memory().snapshot().digest()];
    {
        let db = Database::in_memory();
        let mut s = Session::new(db.clone());
        for i in 0..100 {
            s.execute_script(&durability_stmt(i)).unwrap();
            digests.push(db.snapshot().digest());
        }
    }
    for k in [1usize, 37, 64, 100] {
        let path = dir.path().join(format!("kill{}", k));
        let mut child = Command::new(bin())
            .arg(&path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let mut stdin = child.stdin.take().unwrap();
        for i in 0..k {
            writeln!(stdin, "{}", durability_stmt(i)).unwrap();
        }
        // A query after the writes proves they were all processed.
        writeln!(stdin, "MATCH (x:N {{k:0}}) RETURN x.k").unwrap();
        stdin.flush().unwrap();
        let mut reader = BufReader::new(child.stdout.take().unwrap());
        let mut seen = String::new();
        while !seen.contains("|0|") {
            let mut line = String::new();
            assert!(reader.read_line(&mut line).unwrap() > 0, "shell exited early");
            seen.push_str(&line);
        }
        child.kill().unwrap();
        child.wait().unwrap();
        let db = Database::open(&path).unwrap();
        assert_eq!(db.snapshot().digest(), digests[k], "after {} statements", k);
    }
}

// Criterion 8.
proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn c8_alter_key_keeps_adjacency(
        n in 1usize..=12,
        edges in proptest::collection::vec((0usize..12, 0usize..12), 0..=24),
    ) {
        let db = Database::in_memory();
        let mut s = Session::new(db.clone());
        let mut items: Vec<String> = (0..n).map(|i| format!("(n{}:N {{code:'c{:02}'}})", i, i)).collect();
        for (a, b) in &edges {
            items.push(format!("(n{})-[:E]->(n{})", a % n, b % n));
        }
        s.execute_script(&format!("[CREATE {}]", items.join(", "))).unwrap();
        let adjacency = |db: &Database| -> BTreeSet<(u64, u64, u64)> {
            let snap = db.snapshot();
            let st = &snap.state;
            let e = st.catalog.lookup_label("E", Some(TypeKind::Edge)).map(|d| d.id);
            e.map(|e| st.scan(e).into_iter().map(|u| {
                let (l, a) = st.endpoints(u).unwrap();
                (u, l, a)
            }).collect()).unwrap_or_default()
        };
        let before = adjacency(&db);
        prop_assert_eq!(before.len(), edges.len());

        s.execute_script("alter table N add primary key(code)").unwrap();
        prop_assert_eq!(&adjacency(&db), &before);
        s.execute_script("alter table N drop ID").unwrap();
        prop_assert_eq!(&adjacency(&db), &before);

        // Dereferencing each edge by its stored key reaches the same nodes.
        let snap = db.snapshot();
        let st = &snap.state;
        for (e, l, a) in &before {
            let row = st.row(*e).unwrap();
            prop_assert_eq!(row.get("LEAVING"), st.row(*l).unwrap().get("CODE"));
            prop_assert_eq!(row.get("ARRIVING"), st.row(*a).unwrap().get("CODE"));
        }
        prop_assert!(st.dangling().next().is_none());
        let t = s.execute_script("MATCH (a:N)-[:E]->(b:N) RETURN a.code, b.code").unwrap();
        prop_assert_eq!(t[0].table().unwrap().rows.len(), before.iter().map(|(_, l, a)| (l, a)).collect::<BTreeSet<_>>().len());
    }
}

#[test]
fn multiplicity_rule_is_reported_by_the_engine() {
    // Guards the diagnostic text the shell check above relies on.
    let mut s = Session::new(Database::in_memory());
    s.execute_script(
        "[CREATE (o:O {n:1})<-[:B]-(:P {n:1})]
         alter type B set cardinality leaving 1..1 arriving 1..*",
    )
    .unwrap();
    let err = s.execute_script("CREATE (:O {n:2})").unwrap_err();
    assert_eq!(err.violations()[0].rule, Rule::Multiplicity);
    assert!(err.to_string().contains("multiplicity violation on B"), "{}", err);
    assert!(matches!(s.execute_script("MATCH (o:O) RETURN o.n").unwrap()[0], Outcome::Table(_)));
}
