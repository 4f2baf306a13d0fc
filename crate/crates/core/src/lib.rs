//! Embeddable typed-graph database engine.

pub mod catalog;
pub mod db;
pub mod error;
pub mod exec;
pub mod expr;
pub mod graphset;
pub mod httpd;
pub mod matcher;
pub mod parser;
pub mod store;
pub mod value;

pub use catalog::{Catalog, Column, Multiplicity, TypeDescriptor, TypeKind};
pub use db::{Committed, Database, Transaction};
pub use exec::{Outcome, Session, Table};
pub use error::{Error, Result, Rule, Violation};
pub use value::{DataType, TypeId, Uid, Value};
