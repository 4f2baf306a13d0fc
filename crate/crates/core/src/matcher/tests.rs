use crate::exec::{Outcome, Session};
use crate::{Database, Value};

const FAMILY: &str = "[CREATE (a:Person {name:'Fred Smith'})<-[:Child]-(b:Person {name:'Peter Smith'}),
(a)-[:Child]->(c:Person {name:'Mary Smith'})
-[:Child]->(d:Person {name:'Lee Smith'}),
(c)-[:Child]->(e:Person {name:'Bill Smith'})]";

fn family() -> Session {
    let mut s = Session::new(Database::in_memory());
    s.execute_script(FAMILY).unwrap();
    s
}

fn query(s: &mut Session, q: &str) -> crate::Table {
    match s.execute_script(q).unwrap().pop().unwrap() {
        Outcome::Table(t) => t,
        Outcome::Done => panic!("no table from {}", q),
    }
}

fn texts(col: Vec<&Value>) -> Vec<String> {
    col.into_iter().map(|v| v.to_text()).collect()
}

#[test]
fn descendants_in_greedy_order() {
    let mut s = family();
    let t = query(&mut s, "MATCH ({name:'Peter Smith'}) [()-[:Child]->()]+ (x) RETURN x.name");
    assert_eq!(t.headers, ["NAME"]);
    assert_eq!(texts(t.column("NAME").unwrap()), ["Lee Smith", "Bill Smith", "Mary Smith", "Fred Smith"]);
}

#[test]
fn group_variable_collects_path_nodes() {
    let mut s = family();
    let t = query(&mut s, "MATCH ({name:'Peter Smith'}) [(p)-[:Child]->()]+ ({name:x})");
    assert_eq!(t.headers, ["P", "X"]);
    let lens: Vec<usize> = t
        .column("P")
        .unwrap()
        .iter()
        .map(|v| match v {
            Value::Array(a) => a.len(),
            other => panic!("not an array: {:?}", other),
        })
        .collect();
    assert_eq!(lens, [3, 3, 2, 1]);
    assert_eq!(
        t.cells[0][0],
        "ARRAY[PERSON(ID=2,NAME=Peter Smith),PERSON(ID=1,NAME=Fred Smith),PERSON(ID=3,NAME=Mary Smith)]"
    );
    assert_eq!(t.cells[3][0], "ARRAY[PERSON(ID=2,NAME=Peter Smith)]");
}

#[test]
fn existence_check() {
    let mut s = family();
    let t = query(&mut s, "MATCH ({name:'Mary Smith'})-[:Child]->({name:'Lee Smith'})");
    assert_eq!(t.rows, [[Value::Bool(true)]]);
    let t = query(&mut s, "MATCH ({name:'Lee Smith'})-[:Child]->({name:'Mary Smith'})");
    assert_eq!(t.rows, [[Value::Bool(false)]]);
}

#[test]
fn unknown_label_is_empty() {
    let mut s = family();
    let t = query(&mut s, "MATCH (x:Robot) RETURN x.name");
    assert!(t.rows.is_empty());
}

#[test]
fn acyclic_rejects_revisits() {
    let mut s = Session::new(Database::in_memory());
    s.execute_script("[CREATE (a:N {k:1})-[:E]->(b:N {k:2})-[:E]->(a)]").unwrap();
    let t = query(&mut s, "MATCH ACYCLIC ({k:1}) [()-[:E]->()]+ (x) RETURN x.k");
    assert_eq!(texts(t.column("K").unwrap()), ["2"]);
    let t = query(&mut s, "MATCH TRAIL ({k:1}) [()-[:E]->()]+ (x) RETURN x.k");
    let mut ks = texts(t.column("K").unwrap());
    ks.sort();
    assert_eq!(ks, ["1", "2"]);
}

#[test]
fn shortest_keeps_minimum_length() {
    let mut s = Session::new(Database::in_memory());
    s.execute_script("[CREATE (a:N {k:1})-[:E]->(b:N {k:2})-[:E]->(c:N {k:3}), (a)-[:E]->(c)]").unwrap();
    let t = query(&mut s, "MATCH SHORTEST ({k:1}) [()-[:E]->()]+ ({k:3}) RETURN 1 AS one");
    assert_eq!(t.rows.len(), 1);
}

#[test]
fn selection_mode_with_comma_is_rejected() {
    let mut s = family();
    assert!(s.execute_script("MATCH SHORTEST (x), (y) RETURN x").is_err());
}

#[test]
fn where_filters_bindings() {
    let mut s = family();
    let t = query(&mut s, "MATCH (x:Person)-[:Child]->(y) WHERE y.name = 'Lee Smith' RETURN x.name");
    assert_eq!(texts(t.column("NAME").unwrap()), ["Mary Smith"]);
}

#[test]
fn then_block_updates_each_binding() {
    let mut s = family();
    s.execute_script("MATCH (x:Person {name:'Mary Smith'})-[:Child]->(y) THEN SET y.gen = 3 END").unwrap();
    let t = query(&mut s, "MATCH (x:Person {gen:3}) RETURN x.name");
    let mut n = texts(t.column("NAME").unwrap());
    n.sort();
    assert_eq!(n, ["Bill Smith", "Lee Smith"]);
}
