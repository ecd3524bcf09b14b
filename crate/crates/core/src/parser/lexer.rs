//! Tokenizer shared by hypothesis text and grammar terminals.
//!
//! Matching operators longest-first keeps `<=` from splitting into `<` `=`.
//! Characters that start no known token become [`TokenKind::Sym`], so any
//! terminal string in a grammar file can be tokenized.

use std::fmt;

use chrono::{NaiveDate, NaiveDateTime};

use super::ParseError;
use crate::ast::{OpKind, Scalar, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Str(String),
    Number(f64),
    Date(NaiveDateTime),
    Bool(bool),
    Op(OpKind),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Amp,
    Bang,
    Dot,
    Sym(char),
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Str(_) => "string".into(),
            TokenKind::Number(_) => "number".into(),
            TokenKind::Date(_) => "date".into(),
            TokenKind::Bool(_) => "boolean".into(),
            other => format!("`{other}`"),
        }
    }

    /// Equality used when matching grammar terminals: identifiers compare
    /// case-insensitively, like attribute and function lookup.
    pub fn matches(&self, other: &TokenKind) -> bool {
        match (self, other) {
            (TokenKind::Ident(a), TokenKind::Ident(b)) => a.eq_ignore_ascii_case(b),
            (a, b) => a == b,
        }
    }

    pub fn from_scalar(s: &Scalar) -> TokenKind {
        match s {
            Scalar::Number(n) => TokenKind::Number(*n),
            Scalar::Str(s) => TokenKind::Str(s.clone()),
            Scalar::Date(d) => TokenKind::Date(*d),
            Scalar::Bool(b) => TokenKind::Bool(*b),
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => crate::ast::write_ident(f, s),
            TokenKind::Str(s) => Scalar::Str(s.clone()).fmt(f),
            TokenKind::Number(n) => write!(f, "{n}"),
            TokenKind::Date(d) => Scalar::Date(*d).fmt(f),
            TokenKind::Bool(b) => write!(f, "{b}"),
            TokenKind::Op(op) => f.write_str(op.symbol()),
            TokenKind::LParen => f.write_str("("),
            TokenKind::RParen => f.write_str(")"),
            TokenKind::LBracket => f.write_str("["),
            TokenKind::RBracket => f.write_str("]"),
            TokenKind::LBrace => f.write_str("{"),
            TokenKind::RBrace => f.write_str("}"),
            TokenKind::Comma => f.write_str(","),
            TokenKind::Amp => f.write_str("&"),
            TokenKind::Bang => f.write_str("!"),
            TokenKind::Dot => f.write_str("."),
            TokenKind::Sym(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer { src, pos: 0, out: Vec::new() }.run()
}

/// Render tokens as readable text that tokenizes back to the same sequence.
pub fn render_tokens<'a, I>(tokens: I) -> String
where
    I: IntoIterator<Item = &'a TokenKind>,
{
    let mut out = String::new();
    let mut prev: Option<&TokenKind> = None;
    for t in tokens {
        if let Some(p) = prev {
            if needs_space(p, t) {
                out.push(' ');
            }
        }
        out.push_str(&t.to_string());
        prev = Some(t);
    }
    out
}

fn needs_space(prev: &TokenKind, next: &TokenKind) -> bool {
    use TokenKind::*;
    match (prev, next) {
        (Op(_), _) | (_, Op(_)) => true,
        (LParen | LBracket | LBrace | Bang | Dot, _) => false,
        (_, RParen | RBracket | RBrace | Comma | Dot) => false,
        (Ident(_), LParen | LBracket) => false,
        (RParen | RBracket, LBracket) => false,
        _ => true,
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    out: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        self.out.push(Token { kind, span: Span::new(start, self.pos) });
    }

    fn error(&self, start: usize, expected: &str, message: impl Into<String>) -> ParseError {
        let end = self.pos.max(start + 1).min(self.src.len());
        ParseError::new(Span::new(start, end), vec![expected.into()], message)
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.pos += c.len_utf8();
                continue;
            }
            if c == '\'' || c == '"' {
                let s = self.string(c)?;
                self.push(TokenKind::Str(s), start);
                continue;
            }
            if c == '`' {
                let s = self.quoted_ident()?;
                self.push(TokenKind::Ident(s), start);
                continue;
            }
            if c == '@' {
                let d = self.date()?;
                self.push(TokenKind::Date(d), start);
                continue;
            }
            if c.is_ascii_digit()
                || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
                || (c == '-' && self.starts_number(1))
            {
                let n = self.number()?;
                self.push(TokenKind::Number(n), start);
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                self.word(start);
                continue;
            }
            if let Some((op, len)) = self.operator() {
                self.pos += len;
                self.push(TokenKind::Op(op), start);
                continue;
            }
            self.pos += c.len_utf8();
            let kind = match c {
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '[' => TokenKind::LBracket,
                ']' => TokenKind::RBracket,
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                ',' => TokenKind::Comma,
                '&' => TokenKind::Amp,
                '!' => TokenKind::Bang,
                '.' => TokenKind::Dot,
                // prefix subtraction `-(a, b)` and negation `-(a)` name a function
                '-' => TokenKind::Ident("-".into()),
                other => TokenKind::Sym(other),
            };
            self.push(kind, start);
        }
        Ok(self.out)
    }

    fn starts_number(&self, offset: usize) -> bool {
        match self.peek_at(offset) {
            Some(d) if d.is_ascii_digit() => true,
            Some('.') => self.peek_at(offset + 1).is_some_and(|d| d.is_ascii_digit()),
            _ => false,
        }
    }

    fn operator(&self) -> Option<(OpKind, usize)> {
        const OPS: [(&str, OpKind); 13] = [
            ("<=", OpKind::Le),
            (">=", OpKind::Ge),
            ("!=", OpKind::Neq),
            ("==", OpKind::Eq),
            ("=", OpKind::Eq),
            ("<", OpKind::Lt),
            (">", OpKind::Gt),
            ("~", OpKind::RegexMatch),
            ("≤", OpKind::Le),
            ("≥", OpKind::Ge),
            ("≠", OpKind::Neq),
            ("∈", OpKind::In),
            ("∉", OpKind::NotIn),
        ];
        let rest = self.rest();
        OPS.iter().find(|(s, _)| rest.starts_with(s)).map(|(s, op)| (*op, s.len()))
    }

    fn word(&mut self, start: usize) {
        let bytes = self.src.as_bytes();
        let word_byte = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
        while self.pos < bytes.len() {
            let b = bytes[self.pos];
            if word_byte(b) || (b == b'-' && self.pos + 1 < bytes.len() && word_byte(bytes[self.pos + 1])) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        let kind = match text {
            "in" => TokenKind::Op(OpKind::In),
            "true" => TokenKind::Bool(true),
            "false" => TokenKind::Bool(false),
            "not" => {
                let after = &self.src[self.pos..];
                let trimmed = after.trim_start();
                let gap = after.len() - trimmed.len();
                let follows_in = gap > 0
                    && trimmed.starts_with("in")
                    && !trimmed[2..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_');
                if follows_in {
                    self.pos += gap + 2;
                    TokenKind::Op(OpKind::NotIn)
                } else {
                    TokenKind::Ident(text.into())
                }
            }
            _ => TokenKind::Ident(text.into()),
        };
        self.push(kind, start);
    }

    fn string(&mut self, quote: char) -> Result<String, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(self.error(start, "closing quote", "unterminated string literal"));
            };
            self.pos += c.len_utf8();
            match c {
                '\\' => {
                    let Some(e) = self.peek() else {
                        return Err(self.error(start, "closing quote", "unterminated string literal"));
                    };
                    self.pos += e.len_utf8();
                    out.push(e);
                }
                c if c == quote => return Ok(out),
                c => out.push(c),
            }
        }
    }

    fn quoted_ident(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let s = self.string('`')?;
        if s.is_empty() {
            return Err(self.error(start, "identifier", "empty quoted identifier"));
        }
        Ok(s)
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        if bytes[self.pos] == b'-' {
            self.pos += 1;
        }
        let digits = |lx: &mut Self| {
            while lx.pos < bytes.len() && bytes[lx.pos].is_ascii_digit() {
                lx.pos += 1;
            }
        };
        digits(self);
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        self.src[start..self.pos]
            .parse::<f64>()
            .map_err(|e| self.error(start, "number", format!("invalid number: {e}")))
    }

    fn date(&mut self) -> Result<NaiveDateTime, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len()
            && (bytes[self.pos].is_ascii_digit() || b"-:T".contains(&bytes[self.pos]))
        {
            self.pos += 1;
        }
        let text = &self.src[start + 1..self.pos];
        parse_date_literal(text).ok_or_else(|| {
            self.error(start, "date like @2015-05-01 or @2015-05-01T07:50:00", "invalid date literal")
        })
    }
}

fn parse_date_literal(text: &str) -> Option<NaiveDateTime> {
    if let Ok(d) = NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S") {
        return Some(d);
    }
    if let Ok(d) = NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M") {
        return Some(d);
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d").ok().and_then(|d| d.and_hms_opt(0, 0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn longest_operator_first() {
        assert_eq!(
            kinds("a<=b"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Op(OpKind::Le),
                TokenKind::Ident("b".into())
            ]
        );
        assert_eq!(kinds("≠ ∈ ∉"), kinds("!= in not in"));
    }

    #[test]
    fn hyphenated_identifiers_and_prefix_minus() {
        assert_eq!(
            kinds("Car-id=523"),
            vec![
                TokenKind::Ident("Car-id".into()),
                TokenKind::Op(OpKind::Eq),
                TokenKind::Number(523.0)
            ]
        );
        assert_eq!(kinds("-(a, b)")[0], TokenKind::Ident("-".into()));
        assert_eq!(kinds("-0.75"), vec![TokenKind::Number(-0.75)]);
    }

    #[test]
    fn strings_dates_and_symbols() {
        assert_eq!(kinds(r#"'it\'s' "x""#), vec![
            TokenKind::Str("it's".into()),
            TokenKind::Str("x".into()),
        ]);
        let d = NaiveDate::from_ymd_opt(2015, 5, 1).unwrap().and_hms_opt(7, 50, 0).unwrap();
        assert_eq!(kinds("@2015-05-01T07:50"), vec![TokenKind::Date(d)]);
        assert_eq!(kinds("2 * x")[1], TokenKind::Sym('*'));
        assert!(tokenize("'open").is_err());
    }

    #[test]
    fn not_without_in_is_an_identifier() {
        assert_eq!(kinds("not"), vec![TokenKind::Ident("not".into())]);
        assert_eq!(kinds("not inx")[0], TokenKind::Ident("not".into()));
    }

    #[test]
    fn rendering_round_trips() {
        for src in [
            "KL(cost, price) < 10",
            "(mod(count(), 2) = 1)[Gate-name~'^entrance' & Car-id=523]",
            "Hour not in [0, 7)",
            "!(Car-type~'ranger')",
        ] {
            let toks = kinds(src);
            let text = render_tokens(&toks);
            assert_eq!(kinds(&text), toks, "{text}");
        }
    }
}
