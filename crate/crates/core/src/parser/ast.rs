//! Statement syntax tree. Identifiers are stored case-normalized.

use serde::{Deserialize, Serialize};

use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Concat,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "OR",
            BinaryOp::And => "AND",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Concat => "||",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Concat => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Literal(Value),
    Var(String),
    Field(Box<Expr>, String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    IsNull { expr: Box<Expr>, negated: bool },
}

impl Expr {
    /// Identifiers referenced as bare variables (not field names).
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Literal(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Field(e, _) | Expr::Unary(_, e) | Expr::IsNull { expr: e, .. } => e.variables(out),
            Expr::Binary(_, a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }
}

/// Property document `{name: expr, ...}` with unique keys.
pub type Doc = Vec<(String, Expr)>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodePattern {
    pub alias: Option<String>,
    pub labels: Vec<String>,
    pub doc: Doc,
    pub where_clause: Option<Expr>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `-[...]->`: leaves the node on the left.
    Right,
    /// `<-[...]-`: leaves the node on the right.
    Left,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgePattern {
    pub direction: Direction,
    pub alias: Option<String>,
    pub labels: Vec<String>,
    pub doc: Doc,
    pub where_clause: Option<Expr>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Optional,
    Star,
    Plus,
    Range { min: u32, max: Option<u32> },
}

impl Quantifier {
    pub fn bounds(self) -> (u32, Option<u32>) {
        match self {
            Quantifier::Optional => (0, Some(1)),
            Quantifier::Star => (0, None),
            Quantifier::Plus => (1, None),
            Quantifier::Range { min, max } => (min, max),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathPattern {
    pub body: Vec<PatternElement>,
    pub quantifier: Quantifier,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PatternElement {
    Node(NodePattern),
    Edge(EdgePattern),
    Path(PathPattern),
}

/// One comma-separated graph of a CREATE statement: node, then (edge, node)*.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphPattern {
    pub elements: Vec<PatternElement>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Repetition {
    #[default]
    Default,
    Trail,
    Acyclic,
    Simple,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Selection {
    #[default]
    Default,
    Shortest,
    All,
    Any,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatchMode {
    pub repetition: Repetition,
    pub selection: Selection,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchPattern {
    pub mode: MatchMode,
    pub path_alias: Option<String>,
    pub elements: Vec<PatternElement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchStatement {
    pub patterns: Vec<MatchPattern>,
    pub where_clause: Option<Expr>,
    pub dependent: Option<Box<Statement>>,
    pub then_block: Vec<Statement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnItem {
    pub expr: Expr,
    pub alias: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub target: String,
    pub field: String,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnDef {
    pub name: String,
    /// Upper-cased SQL type name or a structured type label.
    pub type_name: String,
    pub not_null: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeKindDecl {
    Plain,
    Node,
    Edge { leaving: String, arriving: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeDefinition {
    pub name: String,
    pub under: Option<String>,
    pub columns: Vec<ColumnDef>,
    pub kind: TypeKindDecl,
}

/// `i..k` bounds; `max = None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub min: u32,
    pub max: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlterAction {
    AddPrimaryKey(Vec<String>),
    AddColumn(ColumnDef),
    DropColumn(String),
    AddCheck(Expr),
    SetCardinality { leaving: Bounds, arriving: Bounds },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Create { graphs: Vec<GraphPattern>, then: Option<Box<Statement>> },
    Match(MatchStatement),
    Return(Vec<ReturnItem>),
    Set(Vec<Assignment>),
    Delete { targets: Vec<String>, cascade: bool },
    CreateType(TypeDefinition),
    Alter { target: String, action: AlterAction },
    Begin,
    Commit,
    Rollback,
    CreateRole(String),
    Grant { privileges: Vec<String>, object: Option<String>, grantees: Vec<String> },
    ShowGraphs,
}

/// A statement with the byte range and line it was parsed from.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedStatement {
    pub statement: Statement,
    pub start: usize,
    pub end: usize,
    pub line: usize,
}
