//! Hand-written tokenizer. Unquoted identifiers fold to upper case,
//! double-quoted identifiers are kept exactly.

use std::fmt;

use chrono::NaiveDate;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    /// Unquoted identifier: folded text plus whether it may act as a keyword.
    Ident(String),
    QuotedIdent(String),
    Str(String),
    Int(i64),
    Decimal(f64),
    Currency(f64, String),
    Date(NaiveDate),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semicolon,
    Dot,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Question,
    Concat,
    /// `-[`
    DashBracket,
    /// `<-[`
    LArrowBracket,
    /// `<-`
    LArrow,
    /// `]->`
    BracketArrow,
    /// `]-`
    BracketDash,
    /// `->`
    Arrow,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        match self {
            Ident(s) => write!(f, "identifier {}", s),
            QuotedIdent(s) => write!(f, "identifier \"{}\"", s),
            Str(s) => write!(f, "string '{}'", s),
            Int(i) => write!(f, "{}", i),
            Decimal(d) => write!(f, "{}", d),
            Currency(a, c) => write!(f, "{} {}", a, c),
            Date(d) => write!(f, "DATE'{}'", d),
            other => f.write_str(punct_text(other)),
        }
    }
}

pub(crate) fn punct_text(kind: &TokenKind) -> &'static str {
    use TokenKind::*;
    match kind {
        LParen => "(",
        RParen => ")",
        LBrace => "{",
        RBrace => "}",
        LBracket => "[",
        RBracket => "]",
        Comma => ",",
        Colon => ":",
        Semicolon => ";",
        Dot => ".",
        Eq => "=",
        Ne => "<>",
        Lt => "<",
        Le => "<=",
        Gt => ">",
        Ge => ">=",
        Plus => "+",
        Minus => "-",
        Star => "*",
        Slash => "/",
        Question => "?",
        Concat => "||",
        DashBracket => "-[",
        LArrowBracket => "<-[",
        LArrow => "<-",
        BracketArrow => "]->",
        BracketDash => "]-",
        Arrow => "->",
        _ => "",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte range of the lexeme in the source.
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl Token {
    /// True when this is an unquoted identifier equal to `kw` (upper case).
    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.kind, TokenKind::Ident(s) if s == kw)
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

/// Splits `src` into tokens, skipping whitespace and `//` / `/* */` comments.
pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer { src, pos: 0, line: 1, line_start: 0 };
    let mut out = Vec::new();
    while let Some(tok) = lx.next_token()? {
        out.push(tok);
    }
    Ok(out)
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
        Some(c)
    }

    fn column(&self) -> usize {
        self.src[self.line_start..self.pos].chars().count() + 1
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Syntax { line, column, message: message.into() }
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let (line, col) = (self.line, self.column());
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(self.error(line, col, "unterminated comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>> {
        self.skip_trivia()?;
        let start = self.pos;
        let (line, column) = (self.line, self.column());
        let Some(c) = self.peek() else { return Ok(None) };
        let kind = match c {
            '\'' => TokenKind::Str(self.quoted('\'', line, column)?),
            '"' => TokenKind::QuotedIdent(self.quoted('"', line, column)?),
            c if c.is_ascii_digit() => self.number(line, column)?,
            c if c.is_alphabetic() || c == '_' => {
                while matches!(self.peek(), Some(ch) if ch.is_alphanumeric() || ch == '_') {
                    self.bump();
                }
                let word = self.src[start..self.pos].to_uppercase();
                if word == "DATE" {
                    if let Some(date) = self.try_date_literal(line, column)? {
                        return Ok(Some(Token { kind: TokenKind::Date(date), start, end: self.pos, line, column }));
                    }
                }
                TokenKind::Ident(word)
            }
            _ => self.punct(line, column)?,
        };
        Ok(Some(Token { kind, start, end: self.pos, line, column }))
    }

    fn try_date_literal(&mut self, line: usize, column: usize) -> Result<Option<NaiveDate>> {
        let save = (self.pos, self.line, self.line_start);
        while matches!(self.peek(), Some(' ') | Some('\t')) {
            self.bump();
        }
        if self.peek() != Some('\'') {
            (self.pos, self.line, self.line_start) = save;
            return Ok(None);
        }
        let text = self.quoted('\'', line, column)?;
        NaiveDate::parse_from_str(&text, "%Y-%m-%d")
            .map(Some)
            .map_err(|_| self.error(line, column, format!("invalid date literal '{}'", text)))
    }

    fn quoted(&mut self, q: char, line: usize, column: usize) -> Result<String> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                Some(c) if c == q => {
                    if self.peek() == Some(q) {
                        self.bump();
                        s.push(q);
                    } else {
                        return Ok(s);
                    }
                }
                Some(c) => s.push(c),
                None => {
                    let what = if q == '\'' { "string" } else { "quoted identifier" };
                    return Err(self.error(line, column, format!("unterminated {}", what)));
                }
            }
        }
    }

    fn number(&mut self, line: usize, column: usize) -> Result<TokenKind> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let mut decimal = false;
        if self.peek() == Some('.') && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit()) {
            decimal = true;
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        let text = &self.src[start..self.pos];
        let code = match self.peek() {
            Some('€') => Some("EUR"),
            Some('$') => Some("USD"),
            Some('£') => Some("GBP"),
            _ => None,
        };
        if let Some(code) = code {
            self.bump();
            let amount: f64 = text.parse().map_err(|_| self.error(line, column, "bad number"))?;
            return Ok(TokenKind::Currency(amount, code.to_string()));
        }
        if decimal {
            text.parse().map(TokenKind::Decimal).map_err(|_| self.error(line, column, "bad number"))
        } else {
            text.parse()
                .map(TokenKind::Int)
                .map_err(|_| self.error(line, column, format!("integer literal {} out of range", text)))
        }
    }

    fn punct(&mut self, line: usize, column: usize) -> Result<TokenKind> {
        use TokenKind::*;
        let rest = &self.src[self.pos..];
        let table: &[(&str, TokenKind)] = &[
            ("<-[", LArrowBracket),
            ("]->", BracketArrow),
            ("<>", Ne),
            ("<=", Le),
            (">=", Ge),
            ("!=", Ne),
            ("||", Concat),
            ("-[", DashBracket),
            ("<-", LArrow),
            ("]-", BracketDash),
            ("->", Arrow),
            ("(", LParen),
            (")", RParen),
            ("{", LBrace),
            ("}", RBrace),
            ("[", LBracket),
            ("]", RBracket),
            (",", Comma),
            (":", Colon),
            (";", Semicolon),
            (".", Dot),
            ("=", Eq),
            ("<", Lt),
            (">", Gt),
            ("+", Plus),
            ("-", Minus),
            ("*", Star),
            ("/", Slash),
            ("?", Question),
        ];
        for (text, kind) in table {
            if rest.starts_with(text) {
                for _ in 0..text.len() {
                    self.bump();
                }
                return Ok(kind.clone());
            }
        }
        let c = self.peek().unwrap_or(' ');
        Err(self.error(line, column, format!("unexpected character '{}'", c)))
    }
}
