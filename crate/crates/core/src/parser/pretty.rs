//! Canonical text form of the syntax tree. The output reparses to an equal tree.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;
use crate::value::Value;

const RESERVED: &[&str] = &[
    "CREATE", "MATCH", "RETURN", "SET", "DELETE", "ALTER", "BEGIN", "COMMIT", "ROLLBACK", "GRANT", "SHOW", "THEN",
    "END", "WHERE", "AND", "OR", "NOT", "IS", "NULL", "TRUE", "FALSE", "AS", "TRAIL", "ACYCLIC", "SIMPLE",
    "SHORTEST", "ALL", "ANY", "CASCADE", "DATE", "ON", "TO",
];

pub(crate) struct Ident<'a>(pub &'a str);

impl Display for Ident<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let s = self.0;
        let plain = !s.is_empty()
            && s.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && s.chars().all(|c| (c.is_alphanumeric() || c == '_') && !c.is_lowercase())
            && s.to_uppercase() == s
            && !RESERVED.contains(&s);
        if plain {
            f.write_str(s)
        } else {
            write!(f, "\"{}\"", s.replace('"', "\"\""))
        }
    }
}

fn literal(v: &Value, f: &mut Formatter<'_>) -> fmt::Result {
    match v {
        Value::Null => f.write_str("NULL"),
        Value::Bool(b) => f.write_str(if *b { "TRUE" } else { "FALSE" }),
        Value::Int(i) if *i < 0 => write!(f, "({})", i),
        Value::Int(i) => write!(f, "{}", i),
        Value::Decimal(d) if *d < 0.0 => write!(f, "({:?})", d),
        Value::Decimal(d) => write!(f, "{:?}", d),
        Value::Str(s) => write!(f, "'{}'", s.replace('\'', "''")),
        Value::Date(d) => write!(f, "DATE'{}'", d.format("%Y-%m-%d")),
        Value::Currency { amount, code } => {
            let sym = match code.as_str() {
                "EUR" => "€",
                "USD" => "$",
                "GBP" => "£",
                _ => return write!(f, "'{} {}'", amount, code),
            };
            write!(f, "{:?}{}", amount, sym)
        }
        other => write!(f, "'{}'", other.to_text().replace('\'', "''")),
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => literal(v, f),
            Expr::Var(v) => write!(f, "{}", Ident(v)),
            Expr::Field(e, name) => write!(f, "{}.{}", e, Ident(name)),
            Expr::Unary(UnaryOp::Not, e) => write!(f, "(NOT {})", e),
            Expr::Unary(UnaryOp::Neg, e) => write!(f, "(-{})", e),
            Expr::Binary(op, a, b) => write!(f, "({} {} {})", a, op.symbol(), b),
            Expr::IsNull { expr, negated } => {
                write!(f, "({} IS {}NULL)", expr, if *negated { "NOT " } else { "" })
            }
        }
    }
}

fn doc(d: &Doc, f: &mut Formatter<'_>) -> fmt::Result {
    f.write_char('{')?;
    for (i, (k, v)) in d.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{}: {}", Ident(k), v)?;
    }
    f.write_char('}')
}

fn item(
    alias: &Option<String>,
    labels: &[String],
    d: &Doc,
    where_clause: &Option<Expr>,
    f: &mut Formatter<'_>,
) -> fmt::Result {
    if let Some(a) = alias {
        write!(f, "{}", Ident(a))?;
    }
    for l in labels {
        write!(f, ":{}", Ident(l))?;
    }
    if !d.is_empty() {
        if alias.is_some() || !labels.is_empty() {
            f.write_char(' ')?;
        }
        doc(d, f)?;
    }
    if let Some(w) = where_clause {
        write!(f, " WHERE {}", w)?;
    }
    Ok(())
}

impl Display for NodePattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('(')?;
        item(&self.alias, &self.labels, &self.doc, &self.where_clause, f)?;
        f.write_char(')')
    }
}

impl Display for EdgePattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self.direction {
            Direction::Right => "-[",
            Direction::Left => "<-[",
        })?;
        item(&self.alias, &self.labels, &self.doc, &self.where_clause, f)?;
        f.write_str(match self.direction {
            Direction::Right => "]->",
            Direction::Left => "]-",
        })
    }
}

impl Display for Quantifier {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Optional => f.write_char('?'),
            Quantifier::Star => f.write_char('*'),
            Quantifier::Plus => f.write_char('+'),
            Quantifier::Range { min, max: Some(max) } => write!(f, "{{{},{}}}", min, max),
            Quantifier::Range { min, max: None } => write!(f, "{{{},}}", min),
        }
    }
}

fn elements(els: &[PatternElement], f: &mut Formatter<'_>) -> fmt::Result {
    for (i, e) in els.iter().enumerate() {
        match e {
            PatternElement::Node(n) => {
                if i > 0 && matches!(els[i - 1], PatternElement::Path(_)) {
                    f.write_char(' ')?;
                }
                write!(f, "{}", n)?
            }
            PatternElement::Edge(e) => write!(f, "{}", e)?,
            PatternElement::Path(p) => {
                f.write_str(" [")?;
                elements(&p.body, f)?;
                write!(f, "]{}", p.quantifier)?;
            }
        }
    }
    Ok(())
}

impl Display for MatchPattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.mode.repetition {
            Repetition::Default => {}
            Repetition::Trail => f.write_str("TRAIL ")?,
            Repetition::Acyclic => f.write_str("ACYCLIC ")?,
            Repetition::Simple => f.write_str("SIMPLE ")?,
        }
        match self.mode.selection {
            Selection::Default => {}
            Selection::Shortest => f.write_str("SHORTEST ")?,
            Selection::All => f.write_str("ALL ")?,
            Selection::Any => f.write_str("ANY ")?,
        }
        if let Some(a) = &self.path_alias {
            write!(f, "{} = ", Ident(a))?;
        }
        elements(&self.elements, f)
    }
}

fn bounds(b: &Bounds, f: &mut Formatter<'_>) -> fmt::Result {
    match b.max {
        Some(m) => write!(f, "{}..{}", b.min, m),
        None => write!(f, "{}..*", b.min),
    }
}

fn column_def(c: &ColumnDef, f: &mut Formatter<'_>) -> fmt::Result {
    write!(f, "{} {}", Ident(&c.name), Ident(&c.type_name))?;
    if c.not_null {
        f.write_str(" NOT NULL")?;
    }
    Ok(())
}

fn list<T>(items: &[T], f: &mut Formatter<'_>, mut each: impl FnMut(&T, &mut Formatter<'_>) -> fmt::Result) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        each(it, f)?;
    }
    Ok(())
}

impl Display for Statement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Create { graphs, then } => {
                f.write_str("CREATE ")?;
                list(graphs, f, |g, f| elements(&g.elements, f))?;
                if let Some(t) = then {
                    write!(f, " THEN {}", t)?;
                }
                Ok(())
            }
            Statement::Match(m) => {
                f.write_str("MATCH ")?;
                list(&m.patterns, f, |p, f| write!(f, "{}", p))?;
                if let Some(w) = &m.where_clause {
                    write!(f, " WHERE {}", w)?;
                }
                if let Some(d) = &m.dependent {
                    // Bracket nested statements so their extent is unambiguous.
                    write!(f, " [{}]", d)?;
                }
                if !m.then_block.is_empty() {
                    f.write_str(" THEN ")?;
                    for s in &m.then_block {
                        write!(f, "{}; ", s)?;
                    }
                    f.write_str("END")?;
                }
                Ok(())
            }
            Statement::Return(items) => {
                f.write_str("RETURN ")?;
                list(items, f, |it, f| {
                    write!(f, "{}", it.expr)?;
                    if let Some(a) = &it.alias {
                        write!(f, " AS {}", Ident(a))?;
                    }
                    Ok(())
                })
            }
            Statement::Set(assignments) => {
                f.write_str("SET ")?;
                list(assignments, f, |a, f| write!(f, "{}.{} = {}", Ident(&a.target), Ident(&a.field), a.value))
            }
            Statement::Delete { targets, cascade } => {
                f.write_str("DELETE ")?;
                list(targets, f, |t, f| write!(f, "{}", Ident(t)))?;
                if *cascade {
                    f.write_str(" CASCADE")?;
                }
                Ok(())
            }
            Statement::CreateType(t) => {
                write!(f, "CREATE TYPE {}", Ident(&t.name))?;
                if let Some(u) = &t.under {
                    write!(f, " UNDER {}", Ident(u))?;
                }
                if !t.columns.is_empty() {
                    f.write_str(" AS (")?;
                    list(&t.columns, f, column_def)?;
                    f.write_char(')')?;
                }
                match &t.kind {
                    TypeKindDecl::Plain => Ok(()),
                    TypeKindDecl::Node => f.write_str(" NODETYPE"),
                    TypeKindDecl::Edge { leaving, arriving } => {
                        write!(f, " EDGETYPE(LEAVING {}, ARRIVING {})", Ident(leaving), Ident(arriving))
                    }
                }
            }
            Statement::Alter { target, action } => {
                write!(f, "ALTER TABLE {} ", Ident(target))?;
                match action {
                    AlterAction::AddPrimaryKey(cols) => {
                        f.write_str("ADD PRIMARY KEY (")?;
                        list(cols, f, |c, f| write!(f, "{}", Ident(c)))?;
                        f.write_char(')')
                    }
                    AlterAction::AddColumn(c) => {
                        f.write_str("ADD ")?;
                        column_def(c, f)
                    }
                    AlterAction::DropColumn(c) => write!(f, "DROP {}", Ident(c)),
                    AlterAction::AddCheck(e) => write!(f, "ADD CHECK ({})", e),
                    AlterAction::SetCardinality { leaving, arriving } => {
                        f.write_str("SET CARDINALITY LEAVING ")?;
                        bounds(leaving, f)?;
                        f.write_str(" ARRIVING ")?;
                        bounds(arriving, f)
                    }
                }
            }
            Statement::Begin => f.write_str("BEGIN"),
            Statement::Commit => f.write_str("COMMIT"),
            Statement::Rollback => f.write_str("ROLLBACK"),
            Statement::CreateRole(r) => write!(f, "CREATE ROLE {}", Ident(r)),
            Statement::Grant { privileges, object, grantees } => {
                f.write_str("GRANT ")?;
                list(privileges, f, |p, f| write!(f, "{}", Ident(p)))?;
                if let Some(o) = object {
                    write!(f, " ON {}", Ident(o))?;
                }
                f.write_str(" TO ")?;
                list(grantees, f, |g, f| write!(f, "{}", Ident(g)))
            }
            Statement::ShowGraphs => f.write_str("SHOW GRAPHS"),
        }
    }
}
