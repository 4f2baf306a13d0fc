//! Recursive-descent parser for the graph statement language.
//!
//! The grammar extends SQL-style statements with `CREATE` graph sketches,
//! `MATCH` patterns (including quantified path patterns and match modes),
//! `CREATE TYPE`, and `ALTER TABLE|TYPE`. See `docs/grammar.md`.

pub mod ast;
pub mod lexer;
mod pretty;

use ast::*;
use lexer::{Token, TokenKind};

use crate::error::{Error, Result};
use crate::value::Value;

pub use lexer::tokenize;

/// Parses a script: zero or more statements, optionally separated by `;`.
pub fn parse_script(src: &str) -> Result<Vec<ParsedStatement>> {
    let tokens = tokenize(src)?;
    check_brackets(&tokens)?;
    let mut p = Parser { toks: tokens, pos: 0, src_len: src.len(), line_count: src.lines().count().max(1) };
    let mut out = Vec::new();
    loop {
        while p.eat(&TokenKind::Semicolon) {}
        let Some(first) = p.peek() else { break };
        let (start, line) = (first.start, first.line);
        let statement = p.statement()?;
        let end = p.toks.get(p.pos.saturating_sub(1)).map(|t| t.end).unwrap_or(start);
        if let Some(t) = p.peek() {
            if t.kind != TokenKind::Semicolon && !p.at_statement_start() {
                return Err(p.unexpected("end of statement"));
            }
        }
        out.push(ParsedStatement { statement, start, end, line });
    }
    Ok(out)
}

/// Parses exactly one statement (a trailing `;` is allowed).
pub fn parse_statement(src: &str) -> Result<Statement> {
    let mut stmts = parse_script(src)?;
    match stmts.len() {
        1 => Ok(stmts.pop().unwrap().statement),
        0 => Err(Error::Syntax { line: 1, column: 1, message: "empty statement".into() }),
        _ => {
            let s = &stmts[1];
            Err(Error::Syntax { line: s.line, column: 1, message: "expected a single statement".into() })
        }
    }
}

/// Verifies that every bracket, brace and parenthesis is closed, reporting
/// the position of the first unmatched opener.
pub fn check_brackets(tokens: &[Token]) -> Result<()> {
    let mut stack: Vec<(&Token, char)> = Vec::new();
    for t in tokens {
        let (opens, closes): (Option<char>, Option<char>) = match t.kind {
            TokenKind::LParen => (Some(')'), None),
            TokenKind::LBrace => (Some('}'), None),
            TokenKind::LBracket | TokenKind::DashBracket | TokenKind::LArrowBracket => (Some(']'), None),
            TokenKind::RParen => (None, Some(')')),
            TokenKind::RBrace => (None, Some('}')),
            TokenKind::RBracket | TokenKind::BracketArrow | TokenKind::BracketDash => (None, Some(']')),
            _ => (None, None),
        };
        if let Some(c) = opens {
            stack.push((t, c));
        }
        if let Some(c) = closes {
            match stack.pop() {
                Some((_, want)) if want == c => {}
                _ => {
                    return Err(Error::Syntax {
                        line: t.line,
                        column: t.column,
                        message: format!("unmatched '{}'", c),
                    })
                }
            }
        }
    }
    if let Some((t, c)) = stack.first() {
        return Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: format!("unterminated bracket, expected '{}'", c),
        });
    }
    Ok(())
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    src_len: usize,
    line_count: usize,
}

const STATEMENT_KEYWORDS: &[&str] =
    &["CREATE", "MATCH", "RETURN", "SET", "DELETE", "ALTER", "BEGIN", "COMMIT", "ROLLBACK", "GRANT", "SHOW"];

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_nth(&self, n: usize) -> Option<&TokenKind> {
        self.toks.get(self.pos + n).map(|t| &t.kind)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_statement_start(&self) -> bool {
        match self.peek_kind() {
            Some(TokenKind::Ident(s)) => STATEMENT_KEYWORDS.contains(&s.as_str()),
            Some(TokenKind::LBracket) => true,
            _ => false,
        }
    }

    fn unexpected(&self, expected: &str) -> Error {
        match self.peek() {
            Some(t) => Error::Syntax {
                line: t.line,
                column: t.column,
                message: format!("expected {}, found {}", expected, t.kind),
            },
            None => Error::Syntax {
                line: self.line_count,
                column: self.src_len.max(1),
                message: format!("expected {}, found end of input", expected),
            },
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{}'", lexer::punct_text(&kind))))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(kw))
        }
    }

    fn identifier(&mut self) -> Result<String> {
        match self.peek_kind() {
            Some(TokenKind::Ident(s)) | Some(TokenKind::QuotedIdent(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn at_identifier(&self) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Ident(_)) | Some(TokenKind::QuotedIdent(_)))
    }

    fn uint(&mut self) -> Result<u32> {
        match self.peek_kind() {
            Some(TokenKind::Int(i)) if *i >= 0 && *i <= u32::MAX as i64 => {
                let v = *i as u32;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.unexpected("non-negative integer")),
        }
    }

    // ---- statements -------------------------------------------------------

    fn statement(&mut self) -> Result<Statement> {
        if self.eat(&TokenKind::LBracket) {
            let s = self.statement()?;
            self.expect(TokenKind::RBracket)?;
            return Ok(s);
        }
        let Some(tok) = self.peek().cloned() else { return Err(self.unexpected("statement")) };
        let kw = match &tok.kind {
            TokenKind::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("statement keyword")),
        };
        self.pos += 1;
        match kw.as_str() {
            "CREATE" => {
                if self.eat_keyword("TYPE") {
                    self.create_type()
                } else if self.eat_keyword("ROLE") {
                    Ok(Statement::CreateRole(self.identifier()?))
                } else {
                    self.create_graph()
                }
            }
            "MATCH" => self.match_statement().map(Statement::Match),
            "RETURN" => self.return_items().map(Statement::Return),
            "SET" => self.set_statement(),
            "DELETE" => {
                let mut targets = vec![self.identifier()?];
                while self.eat(&TokenKind::Comma) {
                    targets.push(self.identifier()?);
                }
                let cascade = self.eat_keyword("CASCADE");
                Ok(Statement::Delete { targets, cascade })
            }
            "ALTER" => self.alter(),
            "BEGIN" => {
                let _ = self.eat_keyword("TRANSACTION") || self.eat_keyword("WORK");
                Ok(Statement::Begin)
            }
            "COMMIT" => {
                self.eat_keyword("WORK");
                Ok(Statement::Commit)
            }
            "ROLLBACK" => {
                self.eat_keyword("WORK");
                Ok(Statement::Rollback)
            }
            "GRANT" => self.grant(),
            "SHOW" => {
                self.expect_keyword("GRAPHS")?;
                Ok(Statement::ShowGraphs)
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("statement keyword"))
            }
        }
    }

    fn create_graph(&mut self) -> Result<Statement> {
        let mut graphs = vec![self.graph()?];
        while self.eat(&TokenKind::Comma) {
            graphs.push(self.graph()?);
        }
        let then = if self.eat_keyword("THEN") { Some(Box::new(self.statement()?)) } else { None };
        Ok(Statement::Create { graphs, then })
    }

    fn graph(&mut self) -> Result<GraphPattern> {
        let mut elements = vec![PatternElement::Node(self.node(false)?)];
        while let Some(dir) = self.edge_start() {
            let edge = self.edge_rest(dir, false)?;
            elements.push(PatternElement::Edge(edge));
            elements.push(PatternElement::Node(self.node(false)?));
        }
        Ok(GraphPattern { elements })
    }

    /// Consumes an edge opener and returns its direction.
    fn edge_start(&mut self) -> Option<Direction> {
        match (self.peek_kind(), self.peek_nth(1)) {
            (Some(TokenKind::DashBracket), _) => {
                self.pos += 1;
                Some(Direction::Right)
            }
            (Some(TokenKind::Minus), Some(TokenKind::LBracket)) => {
                self.pos += 2;
                Some(Direction::Right)
            }
            (Some(TokenKind::LArrowBracket), _) => {
                self.pos += 1;
                Some(Direction::Left)
            }
            (Some(TokenKind::LArrow), Some(TokenKind::LBracket)) => {
                self.pos += 2;
                Some(Direction::Left)
            }
            _ => None,
        }
    }

    fn edge_rest(&mut self, direction: Direction, allow_where: bool) -> Result<EdgePattern> {
        let (alias, labels, doc, where_clause) = self.item(allow_where)?;
        match direction {
            Direction::Right => match (self.peek_kind(), self.peek_nth(1)) {
                (Some(TokenKind::BracketArrow), _) => self.pos += 1,
                (Some(TokenKind::BracketDash), Some(TokenKind::Gt)) => self.pos += 2,
                (Some(TokenKind::RBracket), Some(TokenKind::Arrow)) => self.pos += 2,
                _ => return Err(self.unexpected("']->'")),
            },
            Direction::Left => match (self.peek_kind(), self.peek_nth(1)) {
                (Some(TokenKind::BracketDash), _) => self.pos += 1,
                (Some(TokenKind::RBracket), Some(TokenKind::Minus)) => self.pos += 2,
                _ => return Err(self.unexpected("']-'")),
            },
        }
        Ok(EdgePattern { direction, alias, labels, doc, where_clause })
    }

    fn node(&mut self, allow_where: bool) -> Result<NodePattern> {
        self.expect(TokenKind::LParen)?;
        let (alias, labels, doc, where_clause) = self.item(allow_where)?;
        self.expect(TokenKind::RParen)?;
        Ok(NodePattern { alias, labels, doc, where_clause })
    }

    #[allow(clippy::type_complexity)]
    fn item(&mut self, allow_where: bool) -> Result<(Option<String>, Vec<String>, Doc, Option<Expr>)> {
        let alias = if self.at_identifier() && !(allow_where && self.at_keyword("WHERE")) {
            Some(self.identifier()?)
        } else {
            None
        };
        let mut labels = Vec::new();
        while self.eat(&TokenKind::Colon) {
            labels.push(self.identifier()?);
        }
        let doc = if self.peek_kind() == Some(&TokenKind::LBrace) { self.doc()? } else { Vec::new() };
        let where_clause = if allow_where && self.eat_keyword("WHERE") { Some(self.expr()?) } else { None };
        Ok((alias, labels, doc, where_clause))
    }

    fn doc(&mut self) -> Result<Doc> {
        self.expect(TokenKind::LBrace)?;
        let mut doc: Doc = Vec::new();
        if self.eat(&TokenKind::RBrace) {
            return Ok(doc);
        }
        loop {
            let key_tok = self.peek().cloned();
            let key = match self.peek_kind() {
                Some(TokenKind::Str(s)) => {
                    let s = s.clone();
                    self.pos += 1;
                    s
                }
                _ => self.identifier()?,
            };
            if doc.iter().any(|(k, _)| *k == key) {
                let t = key_tok.unwrap();
                return Err(Error::Syntax {
                    line: t.line,
                    column: t.column,
                    message: format!("duplicate property {} in document", key),
                });
            }
            self.expect(TokenKind::Colon)?;
            let value = self.expr()?;
            doc.push((key, value));
            if self.eat(&TokenKind::Comma) {
                continue;
            }
            self.expect(TokenKind::RBrace)?;
            return Ok(doc);
        }
    }

    fn match_statement(&mut self) -> Result<MatchStatement> {
        let mut patterns = vec![self.match_pattern()?];
        while self.eat(&TokenKind::Comma) {
            patterns.push(self.match_pattern()?);
        }
        let where_clause = if self.eat_keyword("WHERE") { Some(self.expr()?) } else { None };
        let dependent = if self.at_statement_start() && !self.at_keyword("THEN") {
            Some(Box::new(self.statement()?))
        } else {
            None
        };
        let mut then_block = Vec::new();
        if self.eat_keyword("THEN") {
            loop {
                while self.eat(&TokenKind::Semicolon) {}
                if self.eat_keyword("END") {
                    break;
                }
                if self.peek().is_none() {
                    return Err(self.unexpected("END"));
                }
                then_block.push(self.statement()?);
            }
        }
        Ok(MatchStatement { patterns, where_clause, dependent, then_block })
    }

    fn match_pattern(&mut self) -> Result<MatchPattern> {
        let mut mode = MatchMode::default();
        let is_alias = |p: &Parser| matches!(p.peek_nth(1), Some(TokenKind::Eq));
        if !is_alias(self) {
            if self.eat_keyword("TRAIL") {
                mode.repetition = Repetition::Trail;
            } else if self.eat_keyword("ACYCLIC") {
                mode.repetition = Repetition::Acyclic;
            } else if self.eat_keyword("SIMPLE") {
                mode.repetition = Repetition::Simple;
            }
        }
        if !is_alias(self) {
            if self.eat_keyword("SHORTEST") {
                mode.selection = Selection::Shortest;
            } else if self.eat_keyword("ALL") {
                mode.selection = Selection::All;
            } else if self.eat_keyword("ANY") {
                mode.selection = Selection::Any;
            }
        }
        let path_alias = if self.at_identifier() && is_alias(self) {
            let a = self.identifier()?;
            self.expect(TokenKind::Eq)?;
            Some(a)
        } else {
            None
        };
        let elements = self.match_chain()?;
        Ok(MatchPattern { mode, path_alias, elements })
    }

    /// `(node) { edge (node) | [path]q [(node)] }`
    fn match_chain(&mut self) -> Result<Vec<PatternElement>> {
        let mut elements = vec![PatternElement::Node(self.node(true)?)];
        loop {
            if let Some(dir) = self.edge_start() {
                elements.push(PatternElement::Edge(self.edge_rest(dir, true)?));
                elements.push(PatternElement::Node(self.node(true)?));
            } else if self.peek_kind() == Some(&TokenKind::LBracket) && self.peek_nth(1) == Some(&TokenKind::LParen) {
                self.pos += 1;
                let body = self.match_chain()?;
                self.expect(TokenKind::RBracket)?;
                let quantifier = self.quantifier()?;
                elements.push(PatternElement::Path(PathPattern { body, quantifier }));
                if self.peek_kind() == Some(&TokenKind::LParen) {
                    elements.push(PatternElement::Node(self.node(true)?));
                }
            } else {
                return Ok(elements);
            }
        }
    }

    fn quantifier(&mut self) -> Result<Quantifier> {
        if self.eat(&TokenKind::Question) {
            return Ok(Quantifier::Optional);
        }
        if self.eat(&TokenKind::Star) {
            return Ok(Quantifier::Star);
        }
        if self.eat(&TokenKind::Plus) {
            return Ok(Quantifier::Plus);
        }
        if self.eat(&TokenKind::LBrace) {
            let min = self.uint()?;
            let max = if self.eat(&TokenKind::Comma) {
                if self.peek_kind() == Some(&TokenKind::RBrace) {
                    None
                } else {
                    Some(self.uint()?)
                }
            } else {
                Some(min)
            };
            if let Some(m) = max {
                if m < min {
                    return Err(self.unexpected(&format!("upper bound >= {}", min)));
                }
            }
            self.expect(TokenKind::RBrace)?;
            return Ok(Quantifier::Range { min, max });
        }
        Err(self.unexpected("quantifier (?, *, + or {m,n})"))
    }

    fn return_items(&mut self) -> Result<Vec<ReturnItem>> {
        let mut items = Vec::new();
        loop {
            let expr = self.expr()?;
            let alias = if self.eat_keyword("AS") { Some(self.identifier()?) } else { None };
            items.push(ReturnItem { expr, alias });
            if !self.eat(&TokenKind::Comma) {
                return Ok(items);
            }
        }
    }

    fn set_statement(&mut self) -> Result<Statement> {
        let mut assignments = Vec::new();
        loop {
            let target = self.identifier()?;
            self.expect(TokenKind::Dot)?;
            let field = self.identifier()?;
            self.expect(TokenKind::Eq)?;
            let value = self.expr()?;
            assignments.push(Assignment { target, field, value });
            if !self.eat(&TokenKind::Comma) {
                return Ok(Statement::Set(assignments));
            }
        }
    }

    fn create_type(&mut self) -> Result<Statement> {
        let name = self.identifier()?;
        let under = if self.eat_keyword("UNDER") { Some(self.identifier()?) } else { None };
        let mut columns = Vec::new();
        if self.eat_keyword("AS") {
            self.expect(TokenKind::LParen)?;
            if !self.eat(&TokenKind::RParen) {
                loop {
                    columns.push(self.column_def()?);
                    if self.eat(&TokenKind::Comma) {
                        continue;
                    }
                    self.expect(TokenKind::RParen)?;
                    break;
                }
            }
        }
        let kind = if self.eat_keyword("NODETYPE") {
            TypeKindDecl::Node
        } else if self.eat_keyword("EDGETYPE") {
            self.expect(TokenKind::LParen)?;
            self.expect_keyword("LEAVING")?;
            let leaving = self.identifier()?;
            self.expect(TokenKind::Comma)?;
            self.expect_keyword("ARRIVING")?;
            let arriving = self.identifier()?;
            self.expect(TokenKind::RParen)?;
            TypeKindDecl::Edge { leaving, arriving }
        } else {
            TypeKindDecl::Plain
        };
        Ok(Statement::CreateType(TypeDefinition { name, under, columns, kind }))
    }

    fn column_def(&mut self) -> Result<ColumnDef> {
        let name = self.identifier()?;
        let type_name = self.identifier()?;
        if self.eat(&TokenKind::LParen) {
            self.uint()?;
            self.expect(TokenKind::RParen)?;
        }
        let not_null = if self.eat_keyword("NOT") {
            self.expect_keyword("NULL")?;
            true
        } else {
            false
        };
        Ok(ColumnDef { name, type_name, not_null })
    }

    fn alter(&mut self) -> Result<Statement> {
        if !(self.eat_keyword("TABLE") || self.eat_keyword("TYPE")) {
            return Err(self.unexpected("TABLE or TYPE"));
        }
        let target = self.identifier()?;
        let action = if self.eat_keyword("ADD") {
            if self.eat_keyword("PRIMARY") {
                self.expect_keyword("KEY")?;
                AlterAction::AddPrimaryKey(self.name_list()?)
            } else if self.at_keyword("CONSTRAINT") || self.at_keyword("CHECK") {
                if self.eat_keyword("CONSTRAINT") {
                    self.identifier()?;
                }
                self.expect_keyword("CHECK")?;
                self.expect(TokenKind::LParen)?;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                AlterAction::AddCheck(e)
            } else {
                if self.at_keyword("COLUMN") && matches!(self.peek_nth(2), Some(TokenKind::Ident(_)) | Some(TokenKind::QuotedIdent(_))) {
                    self.pos += 1;
                }
                AlterAction::AddColumn(self.column_def()?)
            }
        } else if self.eat_keyword("DROP") {
            if self.at_keyword("COLUMN") && self.peek_nth(1).is_some() {
                self.pos += 1;
            }
            AlterAction::DropColumn(self.identifier()?)
        } else if self.eat_keyword("SET") {
            self.expect_keyword("CARDINALITY")?;
            self.expect_keyword("LEAVING")?;
            let leaving = self.bounds()?;
            self.expect_keyword("ARRIVING")?;
            let arriving = self.bounds()?;
            AlterAction::SetCardinality { leaving, arriving }
        } else {
            return Err(self.unexpected("ADD, DROP or SET"));
        };
        Ok(Statement::Alter { target, action })
    }

    fn bounds(&mut self) -> Result<Bounds> {
        let min = self.uint()?;
        self.expect(TokenKind::Dot)?;
        self.expect(TokenKind::Dot)?;
        let max = if self.eat(&TokenKind::Star) { None } else { Some(self.uint()?) };
        Ok(Bounds { min, max })
    }

    fn name_list(&mut self) -> Result<Vec<String>> {
        self.expect(TokenKind::LParen)?;
        let mut names = vec![self.identifier()?];
        while self.eat(&TokenKind::Comma) {
            names.push(self.identifier()?);
        }
        self.expect(TokenKind::RParen)?;
        Ok(names)
    }

    fn grant(&mut self) -> Result<Statement> {
        let mut privileges = vec![self.identifier()?];
        while self.eat(&TokenKind::Comma) {
            privileges.push(self.identifier()?);
        }
        let object = if self.eat_keyword("ON") {
            let _ = self.eat_keyword("TABLE") || self.eat_keyword("TYPE");
            Some(self.identifier()?)
        } else {
            None
        };
        self.expect_keyword("TO")?;
        let mut grantees = vec![self.identifier()?];
        while self.eat(&TokenKind::Comma) {
            grantees.push(self.identifier()?);
        }
        Ok(Statement::Grant { privileges, object, grantees })
    }

    // ---- expressions ------------------------------------------------------

    fn expr(&mut self) -> Result<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek_kind()? {
            TokenKind::Ident(s) if s == "OR" => BinaryOp::Or,
            TokenKind::Ident(s) if s == "AND" => BinaryOp::And,
            TokenKind::Eq => BinaryOp::Eq,
            TokenKind::Ne => BinaryOp::Ne,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            TokenKind::Plus => BinaryOp::Add,
            TokenKind::Minus => BinaryOp::Sub,
            TokenKind::Star => BinaryOp::Mul,
            TokenKind::Slash => BinaryOp::Div,
            TokenKind::Concat => BinaryOp::Concat,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_keyword("NOT") {
            // NOT binds looser than comparisons.
            let e = self.binary(3)?;
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(e)));
        }
        if self.eat(&TokenKind::Minus) {
            let e = self.unary()?;
            return Ok(match e {
                Expr::Literal(Value::Int(i)) => Expr::Literal(Value::Int(-i)),
                Expr::Literal(Value::Decimal(d)) => Expr::Literal(Value::Decimal(-d)),
                other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
            });
        }
        let mut e = self.primary()?;
        loop {
            if self.eat(&TokenKind::Dot) {
                let f = self.identifier()?;
                e = Expr::Field(Box::new(e), f);
            } else if self.at_keyword("IS") {
                self.pos += 1;
                let negated = self.eat_keyword("NOT");
                self.expect_keyword("NULL")?;
                e = Expr::IsNull { expr: Box::new(e), negated };
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else { return Err(self.unexpected("expression")) };
        let e = match tok.kind {
            TokenKind::Int(i) => Expr::Literal(Value::Int(i)),
            TokenKind::Decimal(d) => Expr::Literal(Value::Decimal(d)),
            TokenKind::Str(s) => Expr::Literal(Value::Str(s)),
            TokenKind::Date(d) => Expr::Literal(Value::Date(d)),
            TokenKind::Currency(amount, code) => Expr::Literal(Value::Currency { amount, code }),
            TokenKind::Ident(ref s) if s == "TRUE" => Expr::Literal(Value::Bool(true)),
            TokenKind::Ident(ref s) if s == "FALSE" => Expr::Literal(Value::Bool(false)),
            TokenKind::Ident(ref s) if s == "NULL" => Expr::Literal(Value::Null),
            TokenKind::Ident(s) | TokenKind::QuotedIdent(s) => Expr::Var(s),
            TokenKind::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(e);
            }
            _ => return Err(self.unexpected("expression")),
        };
        self.pos += 1;
        Ok(e)
    }
}
