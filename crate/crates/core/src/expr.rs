//! Expression evaluation. NULL propagates; AND, OR and NOT follow
//! three-valued logic.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::parser::ast::{BinaryOp, Expr, UnaryOp};
use crate::store::State;
use crate::value::Value;

/// Evaluates `expr`, resolving bare identifiers through `lookup`.
pub fn eval(expr: &Expr, state: &State, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<Value> {
    match expr {
        Expr::Literal(v) => Ok(v.clone()),
        Expr::Var(name) => lookup(name).ok_or_else(|| Error::Unbound(name.clone())),
        Expr::Field(base, field) => {
            let b = eval(base, state, lookup)?;
            field_of(&b, field, state)
        }
        Expr::Unary(UnaryOp::Not, e) => Ok(match eval(e, state, lookup)? {
            Value::Null => Value::Null,
            Value::Bool(b) => Value::Bool(!b),
            other => return Err(mismatch("NOT", &other)),
        }),
        Expr::Unary(UnaryOp::Neg, e) => Ok(match eval(e, state, lookup)? {
            Value::Null => Value::Null,
            Value::Int(i) => Value::Int(i.checked_neg().ok_or_else(overflow)?),
            Value::Decimal(d) => Value::Decimal(-d),
            Value::Currency { amount, code } => Value::Currency { amount: -amount, code },
            other => return Err(mismatch("-", &other)),
        }),
        Expr::IsNull { expr, negated } => Ok(Value::Bool(eval(expr, state, lookup)?.is_null() != *negated)),
        Expr::Binary(BinaryOp::And, a, b) => {
            let l = truth(eval(a, state, lookup)?)?;
            if l == Some(false) {
                return Ok(Value::Bool(false));
            }
            let r = truth(eval(b, state, lookup)?)?;
            Ok(match (l, r) {
                (_, Some(false)) => Value::Bool(false),
                (Some(true), Some(true)) => Value::Bool(true),
                _ => Value::Null,
            })
        }
        Expr::Binary(BinaryOp::Or, a, b) => {
            let l = truth(eval(a, state, lookup)?)?;
            if l == Some(true) {
                return Ok(Value::Bool(true));
            }
            let r = truth(eval(b, state, lookup)?)?;
            Ok(match (l, r) {
                (_, Some(true)) => Value::Bool(true),
                (Some(false), Some(false)) => Value::Bool(false),
                _ => Value::Null,
            })
        }
        Expr::Binary(op, a, b) => {
            let l = eval(a, state, lookup)?;
            let r = eval(b, state, lookup)?;
            binary(*op, l, r)
        }
    }
}

/// True only for `TRUE`; NULL and FALSE both reject.
pub fn holds(v: &Value) -> bool {
    matches!(v, Value::Bool(true))
}

/// Column of a node or edge, or field of a structured value.
pub fn field_of(base: &Value, field: &str, state: &State) -> Result<Value> {
    match base {
        Value::Null => Ok(Value::Null),
        Value::Node(u) | Value::Edge(u) => {
            let row = state.row(*u).ok_or(Error::UnknownRow(*u))?;
            Ok(row.get(field).clone())
        }
        Value::Doc(m) => Ok(m.get(field).cloned().unwrap_or(Value::Null)),
        other => Err(Error::TypeMismatch(format!("{} has no field {}", other.to_text(), field))),
    }
}

fn truth(v: Value) -> Result<Option<bool>> {
    match v {
        Value::Null => Ok(None),
        Value::Bool(b) => Ok(Some(b)),
        other => Err(Error::TypeMismatch(format!("expected a boolean, found {}", other.to_text()))),
    }
}

fn mismatch(op: &str, v: &Value) -> Error {
    Error::TypeMismatch(format!("operator {} not applicable to {}", op, v.to_text()))
}

fn overflow() -> Error {
    Error::Execution("integer overflow".into())
}

/// Compares two values of compatible types; `None` when either is NULL.
pub fn compare(l: &Value, r: &Value) -> Result<Option<Ordering>> {
    use Value::*;
    Ok(Some(match (l, r) {
        (Null, _) | (_, Null) => return Ok(None),
        (Int(a), Int(b)) => a.cmp(b),
        (Int(_) | Decimal(_), Int(_) | Decimal(_)) => l.as_f64().unwrap().total_cmp(&r.as_f64().unwrap()),
        (Currency { amount: a, code: ca }, Currency { amount: b, code: cb }) => {
            if ca != cb {
                return Err(Error::TypeMismatch(format!("cannot compare {} with {}", ca, cb)));
            }
            a.total_cmp(b)
        }
        (Currency { amount, .. }, Int(_) | Decimal(_)) => amount.total_cmp(&r.as_f64().unwrap()),
        (Int(_) | Decimal(_), Currency { amount, .. }) => l.as_f64().unwrap().total_cmp(amount),
        (Str(_), Str(_)) | (Bool(_), Bool(_)) | (Date(_), Date(_)) | (Node(_), Node(_)) | (Edge(_), Edge(_)) => l.cmp(r),
        (Doc(_), Doc(_)) | (Array(_), Array(_)) => l.cmp(r),
        _ => {
            return Err(Error::TypeMismatch(format!("cannot compare {} with {}", l.to_text(), r.to_text())));
        }
    }))
}

fn binary(op: BinaryOp, l: Value, r: Value) -> Result<Value> {
    use Value::*;
    let cmp = |f: fn(Ordering) -> bool| -> Result<Value> {
        Ok(compare(&l, &r)?.map_or(Null, |o| Bool(f(o))))
    };
    match op {
        BinaryOp::Eq => return cmp(|o| o == Ordering::Equal),
        BinaryOp::Ne => return cmp(|o| o != Ordering::Equal),
        BinaryOp::Lt => return cmp(|o| o == Ordering::Less),
        BinaryOp::Le => return cmp(|o| o != Ordering::Greater),
        BinaryOp::Gt => return cmp(|o| o == Ordering::Greater),
        BinaryOp::Ge => return cmp(|o| o != Ordering::Less),
        _ => {}
    }
    if l.is_null() || r.is_null() {
        return Ok(Null);
    }
    if op == BinaryOp::Concat {
        return Ok(Str(format!("{}{}", l.to_text(), r.to_text())));
    }
    let sym = op.symbol();
    match (l, r) {
        (Int(a), Int(b)) => Ok(Int(match op {
            BinaryOp::Add => a.checked_add(b),
            BinaryOp::Sub => a.checked_sub(b),
            BinaryOp::Mul => a.checked_mul(b),
            BinaryOp::Div => {
                if b == 0 {
                    return Err(Error::Execution("division by zero".into()));
                }
                a.checked_div(b)
            }
            _ => unreachable!(),
        }
        .ok_or_else(overflow)?)),
        (a @ (Int(_) | Decimal(_)), b @ (Int(_) | Decimal(_))) => {
            Ok(Decimal(arith(op, a.as_f64().unwrap(), b.as_f64().unwrap())?))
        }
        (Currency { amount: a, code: ca }, Currency { amount: b, code: cb }) => {
            if ca != cb || matches!(op, BinaryOp::Mul | BinaryOp::Div) {
                return Err(Error::TypeMismatch(format!("{} {} {} not defined", ca, sym, cb)));
            }
            Ok(Currency { amount: arith(op, a, b)?, code: ca })
        }
        (Currency { amount, code }, n @ (Int(_) | Decimal(_))) if matches!(op, BinaryOp::Mul | BinaryOp::Div) => {
            Ok(Currency { amount: arith(op, amount, n.as_f64().unwrap())?, code })
        }
        (n @ (Int(_) | Decimal(_)), Currency { amount, code }) if op == BinaryOp::Mul => {
            Ok(Currency { amount: amount * n.as_f64().unwrap(), code })
        }
        (l, _) => Err(mismatch(sym, &l)),
    }
}

fn arith(op: BinaryOp, a: f64, b: f64) -> Result<f64> {
    Ok(match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == 0.0 {
                return Err(Error::Execution("division by zero".into()));
            }
            a / b
        }
        _ => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_statement;
    use crate::parser::ast::Statement;

    fn ev(src: &str) -> Result<Value> {
        let Statement::Match(m) = parse_statement(&format!("MATCH (x) WHERE {}", src)).unwrap() else { panic!() };
        let state = State::new();
        eval(&m.where_clause.unwrap(), &state, &|n| if n == "N" { Some(Value::Null) } else { None })
    }

    #[test]
    fn three_valued_logic() {
        assert_eq!(ev("N AND FALSE").unwrap(), Value::Bool(false));
        assert_eq!(ev("N AND TRUE").unwrap(), Value::Null);
        assert_eq!(ev("N OR TRUE").unwrap(), Value::Bool(true));
        assert_eq!(ev("NOT N").unwrap(), Value::Null);
        assert_eq!(ev("N = 1").unwrap(), Value::Null);
        assert_eq!(ev("N IS NULL").unwrap(), Value::Bool(true));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(ev("1 + 2 * 3").unwrap(), Value::Int(7));
        assert_eq!(ev("1 + 0.5").unwrap(), Value::Decimal(1.5));
        assert_eq!(ev("2.50€ * 2").unwrap(), Value::Currency { amount: 5.0, code: "EUR".into() });
        assert_eq!(ev("'a' || 1").unwrap(), Value::Str("a1".into()));
        assert!(ev("1 / 0").is_err());
        assert!(ev("1€ + 1$").is_err());
    }

    #[test]
    fn comparisons() {
        assert_eq!(ev("2 > 1.5").unwrap(), Value::Bool(true));
        assert_eq!(ev("'b' >= 'a'").unwrap(), Value::Bool(true));
        assert!(ev("'b' > 1").is_err());
        assert!(matches!(ev("zz = 1"), Err(Error::Unbound(_))));
    }
}
