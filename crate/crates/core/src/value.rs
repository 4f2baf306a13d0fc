//! Scalar and reference values stored in rows and produced by queries.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Database-wide row identifier. Allocated monotonically, shared by nodes and edges.
pub type Uid = u64;

/// Identifier of a type descriptor in the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeId(pub u32);

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Column data types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataType {
    Integer,
    Decimal,
    String,
    Boolean,
    Date,
    Currency,
    /// A plain (non-node, non-edge) structured type from the catalog.
    Structured(TypeId),
}

impl DataType {
    /// Infers a column type from a literal value. `None` for NULL and for
    /// values that cannot be stored in a column.
    pub fn of_value(value: &Value) -> Option<DataType> {
        match value {
            Value::Int(_) => Some(DataType::Integer),
            Value::Decimal(_) => Some(DataType::Decimal),
            Value::Str(_) => Some(DataType::String),
            Value::Bool(_) => Some(DataType::Boolean),
            Value::Date(_) => Some(DataType::Date),
            Value::Currency { .. } => Some(DataType::Currency),
            _ => None,
        }
    }

    /// Parses an SQL-style type name. Structured types are resolved by the caller.
    pub fn from_sql_name(name: &str) -> Option<DataType> {
        Some(match name.to_ascii_uppercase().as_str() {
            "INT" | "INTEGER" | "BIGINT" | "SMALLINT" => DataType::Integer,
            "DECIMAL" | "NUMERIC" | "REAL" | "FLOAT" | "DOUBLE" => DataType::Decimal,
            "CHAR" | "VARCHAR" | "STRING" | "TEXT" | "NCHAR" => DataType::String,
            "BOOLEAN" | "BOOL" => DataType::Boolean,
            "DATE" => DataType::Date,
            "CURRENCY" | "MONEY" => DataType::Currency,
            _ => return None,
        })
    }

    pub fn sql_name(&self) -> String {
        match self {
            DataType::Integer => "INTEGER".into(),
            DataType::Decimal => "DECIMAL".into(),
            DataType::String => "CHAR".into(),
            DataType::Boolean => "BOOLEAN".into(),
            DataType::Date => "DATE".into(),
            DataType::Currency => "CURRENCY".into(),
            DataType::Structured(id) => format!("STRUCT{}", id),
        }
    }
}

/// A typed value. `Null` doubles as "absent" in rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Decimal(f64),
    Str(String),
    Date(NaiveDate),
    Currency { amount: f64, code: String },
    /// Instance of a structured (plain) type.
    Doc(BTreeMap<String, Value>),
    Node(Uid),
    Edge(Uid),
    Array(Vec<Value>),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Decimal(d) => Some(*d),
            Value::Currency { amount, .. } => Some(*amount),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Bool(_) => 1,
            Value::Int(_) => 2,
            Value::Decimal(_) => 3,
            Value::Str(_) => 4,
            Value::Date(_) => 5,
            Value::Currency { .. } => 6,
            Value::Doc(_) => 7,
            Value::Node(_) => 8,
            Value::Edge(_) => 9,
            Value::Array(_) => 10,
        }
    }

    /// Coerces a value for storage in a column of type `dt`.
    /// Structured columns are checked by the catalog, not here.
    pub fn coerce_to(self, dt: &DataType) -> Result<Value, Value> {
        match (dt, self) {
            (_, Value::Null) => Ok(Value::Null),
            (DataType::Integer, v @ Value::Int(_)) => Ok(v),
            (DataType::Decimal, Value::Int(i)) => Ok(Value::Decimal(i as f64)),
            (DataType::Decimal, v @ Value::Decimal(_)) => Ok(v),
            (DataType::String, v @ Value::Str(_)) => Ok(v),
            (DataType::Boolean, v @ Value::Bool(_)) => Ok(v),
            (DataType::Date, v @ Value::Date(_)) => Ok(v),
            (DataType::Date, Value::Str(s)) => {
                NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map(Value::Date).map_err(|_| Value::Str(s))
            }
            (DataType::Currency, v @ Value::Currency { .. }) => Ok(v),
            (DataType::Currency, Value::Int(i)) => Ok(Value::Currency { amount: i as f64, code: NO_CURRENCY.into() }),
            (DataType::Currency, Value::Decimal(d)) => Ok(Value::Currency { amount: d, code: NO_CURRENCY.into() }),
            (DataType::Currency, Value::Str(s)) => parse_currency(&s).ok_or(Value::Str(s)),
            (DataType::Structured(_), v @ Value::Doc(_)) => Ok(v),
            (_, v) => Err(v),
        }
    }

    /// Plain-text rendering for scalars; references render as `#uid`.
    pub fn to_text(&self) -> String {
        match self {
            Value::Null => String::new(),
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Decimal(d) => format_decimal(*d),
            Value::Str(s) => s.clone(),
            Value::Date(d) => d.format("%Y-%m-%d").to_string(),
            Value::Currency { amount, code } => format!("{:.2} {}", amount, code),
            Value::Doc(fields) => {
                let inner: Vec<String> = fields.iter().map(|(k, v)| format!("{}={}", k, v.to_text())).collect();
                format!("({})", inner.join(","))
            }
            Value::Node(u) | Value::Edge(u) => format!("#{}", u),
            Value::Array(items) => {
                let inner: Vec<String> = items.iter().map(Value::to_text).collect();
                format!("ARRAY[{}]", inner.join(","))
            }
        }
    }
}

/// ISO 4217 code for "no currency".
pub const NO_CURRENCY: &str = "XXX";

fn format_decimal(d: f64) -> String {
    if d.is_finite() && d.fract() == 0.0 && d.abs() < 1e15 {
        format!("{:.1}", d)
    } else {
        d.to_string()
    }
}

/// Parses strings like `0.04 €`, `EUR 12.50` or `3$`.
pub fn parse_currency(s: &str) -> Option<Value> {
    let s = s.trim();
    let split = s.find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+'));
    let (num, sym) = match split {
        Some(0) => {
            let pos = s.find(|c: char| c.is_ascii_digit() || c == '-' || c == '+')?;
            (s[pos..].trim(), s[..pos].trim())
        }
        Some(pos) => (s[..pos].trim(), s[pos..].trim()),
        None => (s, ""),
    };
    let amount: f64 = num.parse().ok()?;
    let code = match sym {
        "" => NO_CURRENCY.to_string(),
        "€" => "EUR".into(),
        "$" => "USD".into(),
        "£" => "GBP".into(),
        c if c.len() == 3 && c.chars().all(|ch| ch.is_ascii_alphabetic()) => c.to_ascii_uppercase(),
        _ => return None,
    };
    Some(Value::Currency { amount, code })
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural total order: values of different variants order by variant.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        use Value::*;
        match (self, other) {
            (Null, Null) => Ordering::Equal,
            (Bool(a), Bool(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Decimal(a), Decimal(b)) => a.total_cmp(b),
            (Str(a), Str(b)) => a.cmp(b),
            (Date(a), Date(b)) => a.cmp(b),
            (Currency { amount: a, code: ca }, Currency { amount: b, code: cb }) => ca.cmp(cb).then(a.total_cmp(b)),
            (Doc(a), Doc(b)) => a.cmp(b),
            (Node(a), Node(b)) | (Edge(a), Edge(b)) => a.cmp(b),
            (Array(a), Array(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Null => {}
            Value::Bool(b) => b.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Decimal(d) => d.to_bits().hash(state),
            Value::Str(s) => s.hash(state),
            Value::Date(d) => d.hash(state),
            Value::Currency { amount, code } => {
                amount.to_bits().hash(state);
                code.hash(state);
            }
            Value::Doc(m) => m.hash(state),
            Value::Node(u) | Value::Edge(u) => u.hash(state),
            Value::Array(a) => a.hash(state),
        }
    }
}
