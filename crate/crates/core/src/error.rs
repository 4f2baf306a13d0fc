use std::fmt;

use thiserror::Error;

use crate::value::Uid;

pub type Result<T> = std::result::Result<T, Error>;

/// Commit-time validation rule that was violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    ColumnType,
    KeyNull,
    KeyUnique,
    Referential,
    Multiplicity,
    Check,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::ColumnType => "column type",
            Rule::KeyNull => "null key",
            Rule::KeyUnique => "key uniqueness",
            Rule::Referential => "referential integrity",
            Rule::Multiplicity => "multiplicity",
            Rule::Check => "constraint",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub type_label: String,
    pub rule: Rule,
    pub uids: Vec<Uid>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let uids: Vec<String> = self.uids.iter().map(|u| format!("#{}", u)).collect();
        write!(f, "{} violation on {} [{}]: {}", self.rule, self.type_label, uids.join(","), self.detail)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unknown type {0}")]
    UnknownType(String),

    #[error("type {0} already exists")]
    DuplicateType(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("unbound identifier {0}")]
    Unbound(String),

    #[error("unknown row #{0}")]
    UnknownRow(Uid),

    #[error("{0}")]
    Execution(String),

    #[error("commit aborted: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),

    #[error("transaction conflict: another transaction committed first")]
    Conflict,

    #[error("no transaction is open")]
    NoTransaction,

    #[error("corrupt log: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::Validation(v) => v,
            _ => &[],
        }
    }
}
