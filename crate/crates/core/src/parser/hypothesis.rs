use std::collections::BTreeSet;

use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;
use crate::ast::{
    cmp_scalar, Clause, ConstValue, Conjunct, Expr, ExprKind, Hypothesis, Interval, OpKind,
    Predicate, Scalar, Span,
};

/// Parse one hypothesis statement.
pub fn parse_hypothesis(text: &str) -> Result<Hypothesis, ParseError> {
    let tokens = tokenize(text)?;
    Parser::new(&tokens, text.len()).hypothesis()
}

/// Parse a hypothesis from an already tokenized sentence.
pub fn parse_hypothesis_tokens(tokens: &[Token]) -> Result<Hypothesis, ParseError> {
    let end = tokens.last().map_or(0, |t| t.span.end);
    Parser::new(tokens, end).hypothesis()
}

/// Parse a bare expression such as `AVG(Calories)[Brand='Post']`.
///
/// Expressions are queries, not hypotheses: they have a value but no verdict.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens, text.len());
    let result = p.expr().and_then(|e| p.eof().map(|_| e));
    p.finish(result)
}

enum Fail {
    Soft,
    Hard(ParseError),
}

type PResult<T> = Result<T, Fail>;

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    src_len: usize,
    furthest: usize,
    expected: BTreeSet<String>,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], src_len: usize) -> Self {
        Parser { toks, pos: 0, src_len, furthest: 0, expected: BTreeSet::new() }
    }

    fn hypothesis(mut self) -> Result<Hypothesis, ParseError> {
        let result = self.clauses();
        self.finish(result)
    }

    fn finish<T>(&mut self, result: PResult<T>) -> Result<T, ParseError> {
        match result {
            Ok(v) => Ok(v),
            Err(Fail::Hard(e)) => Err(e),
            Err(Fail::Soft) => {
                let span = self.span_at(self.furthest);
                let found = self
                    .toks
                    .get(self.furthest)
                    .map_or("end of input".to_string(), |t| t.kind.describe());
                let mut expected: Vec<String> = self.expected.iter().cloned().collect();
                if expected.is_empty() {
                    expected.push("hypothesis".into());
                }
                Err(ParseError::new(span, expected, format!("unexpected {found}")))
            }
        }
    }

    fn span_at(&self, idx: usize) -> Span {
        match self.toks.get(idx) {
            Some(t) => t.span,
            None => Span::new(self.src_len, self.src_len),
        }
    }

    fn hard(&self, span: Span, expected: &str, message: impl Into<String>) -> Fail {
        Fail::Hard(ParseError::new(span, vec![expected.into()], message))
    }

    fn peek(&self) -> Option<&'t TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn note(&mut self, what: &str) {
        if self.pos > self.furthest {
            self.furthest = self.pos;
            self.expected.clear();
        }
        if self.pos == self.furthest {
            self.expected.insert(what.to_string());
        }
    }

    fn eat(&mut self, kind: &TokenKind, what: &str) -> PResult<Span> {
        if self.peek() == Some(kind) {
            let span = self.toks[self.pos].span;
            self.pos += 1;
            Ok(span)
        } else {
            self.note(what);
            Err(Fail::Soft)
        }
    }

    fn eof(&mut self) -> PResult<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.note("end of input");
            Err(Fail::Soft)
        }
    }

    fn start_span(&self) -> Span {
        self.span_at(self.pos)
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            Span::new(0, 0)
        } else {
            self.toks[self.pos - 1].span
        }
    }

    /// Ordered choice helper: restore the position when `f` fails softly.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let save = self.pos;
        let r = f(self);
        if matches!(r, Err(Fail::Soft)) {
            self.pos = save;
        }
        r
    }

    fn clauses(&mut self) -> PResult<Hypothesis> {
        let mut clauses = vec![self.clause()?];
        loop {
            if self.peek() == Some(&TokenKind::Amp) {
                self.pos += 1;
                clauses.push(self.clause()?);
            } else {
                self.note("`&`");
                break;
            }
        }
        self.eof()?;
        Ok(Hypothesis { clauses })
    }

    fn clause(&mut self) -> PResult<Clause> {
        match self.attempt(Self::paren_clause) {
            Err(Fail::Soft) => {}
            other => return other,
        }
        let start = self.start_span();
        let (lhs, op, rhs) = self.comparison()?;
        let pred = self.opt_pred()?;
        Ok(Clause { lhs, op, rhs, pred, span: start.join(self.prev_span()) })
    }

    fn paren_clause(&mut self) -> PResult<Clause> {
        let start = self.eat(&TokenKind::LParen, "`(`")?;
        let (lhs, op, rhs) = self.comparison()?;
        self.eat(&TokenKind::RParen, "`)`")?;
        let pred = self.opt_pred()?;
        Ok(Clause { lhs, op, rhs, pred, span: start.join(self.prev_span()) })
    }

    fn comparison(&mut self) -> PResult<(Expr, OpKind, Expr)> {
        let lhs = self.expr()?;
        let op = self.op()?;
        let rhs = self.expr()?;
        Ok((lhs, op, rhs))
    }

    fn op(&mut self) -> PResult<OpKind> {
        match self.peek() {
            Some(TokenKind::Op(op)) => {
                self.pos += 1;
                Ok(*op)
            }
            _ => {
                self.note("operator");
                Err(Fail::Soft)
            }
        }
    }

    fn opt_pred(&mut self) -> PResult<Option<Predicate>> {
        if self.peek() != Some(&TokenKind::LBracket) {
            self.note("`[`");
            return Ok(None);
        }
        let start = self.start_span();
        self.pos += 1;
        let mut pred = self.pred()?;
        self.eat(&TokenKind::RBracket, "`]`")?;
        pred.span = start.join(self.prev_span());
        Ok(Some(pred))
    }

    fn pred(&mut self) -> PResult<Predicate> {
        let start = self.start_span();
        let mut conjuncts = vec![self.conjunct()?];
        while self.peek() == Some(&TokenKind::Amp) {
            self.pos += 1;
            conjuncts.push(self.conjunct()?);
        }
        if self.peek() != Some(&TokenKind::RBracket) {
            self.note("`&`");
        }
        Ok(Predicate { conjuncts, span: start.join(self.prev_span()) })
    }

    fn conjunct(&mut self) -> PResult<Conjunct> {
        let start = self.start_span();
        if self.peek() == Some(&TokenKind::Bang) {
            self.pos += 1;
            let mut c = if self.peek() == Some(&TokenKind::LParen) {
                self.pos += 1;
                let c = self.condition()?;
                self.eat(&TokenKind::RParen, "`)`")?;
                c
            } else {
                self.condition()?
            };
            c.negated = true;
            c.span = start.join(self.prev_span());
            return Ok(c);
        }
        self.note("`!`");
        self.condition()
    }

    fn condition(&mut self) -> PResult<Conjunct> {
        let start = self.start_span();
        let attr = self.ident("attribute")?;
        let op = self.op()?;
        let value = self.expr()?;
        Ok(Conjunct { negated: false, attr, op, value, span: start.join(self.prev_span()) })
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                Ok(name.clone())
            }
            _ => {
                self.note(what);
                Err(Fail::Soft)
            }
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        match self.attempt(Self::call) {
            Err(Fail::Soft) => {}
            other => return other,
        }
        match self.attempt(Self::constant) {
            Err(Fail::Soft) => {}
            other => return other,
        }
        self.var()
    }

    fn call(&mut self) -> PResult<Expr> {
        let start = self.start_span();
        let name = self.ident("function name")?;
        self.eat(&TokenKind::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.peek() != Some(&TokenKind::RParen) {
            args.push(self.expr()?);
            while self.peek() == Some(&TokenKind::Comma) {
                self.pos += 1;
                args.push(self.expr()?);
            }
        }
        self.eat(&TokenKind::RParen, "`)`")?;
        let pred = self.opt_pred()?;
        Ok(Expr { kind: ExprKind::Call { name, args, pred }, span: start.join(self.prev_span()) })
    }

    fn var(&mut self) -> PResult<Expr> {
        let start = self.start_span();
        let name = self.ident("attribute")?;
        if self.peek() == Some(&TokenKind::Dot) {
            // `r2.cost` is shorthand for `cost[id=2]`
            self.pos += 1;
            let attr = self.ident("attribute")?;
            let span = start.join(self.prev_span());
            let row = name
                .strip_prefix('r')
                .and_then(|d| d.parse::<u64>().ok())
                .ok_or_else(|| self.hard(start, "row reference like `r2`", "row references are written r<N>"))?;
            let cond = Conjunct {
                negated: false,
                attr: "id".into(),
                op: OpKind::Eq,
                value: Expr { kind: ExprKind::Const(ConstValue::number(row as f64)), span },
                span,
            };
            let pred = Predicate { conjuncts: vec![cond], span };
            return Ok(Expr { kind: ExprKind::Var { attr, pred: Some(pred) }, span });
        }
        let pred = self.opt_pred()?;
        Ok(Expr { kind: ExprKind::Var { attr: name, pred }, span: start.join(self.prev_span()) })
    }

    fn constant(&mut self) -> PResult<Expr> {
        let start = self.start_span();
        let value = match self.peek() {
            Some(TokenKind::LBracket | TokenKind::LParen) => ConstValue::Interval(self.interval()?),
            Some(TokenKind::LBrace) => ConstValue::Array(self.array()?),
            _ => ConstValue::Scalar(self.scalar()?),
        };
        Ok(Expr { kind: ExprKind::Const(value), span: start.join(self.prev_span()) })
    }

    fn scalar(&mut self) -> PResult<Scalar> {
        let s = match self.peek() {
            Some(TokenKind::Number(n)) => Scalar::Number(*n),
            Some(TokenKind::Str(s)) => Scalar::Str(s.clone()),
            Some(TokenKind::Date(d)) => Scalar::Date(*d),
            Some(TokenKind::Bool(b)) => Scalar::Bool(*b),
            _ => {
                self.note("constant");
                return Err(Fail::Soft);
            }
        };
        self.pos += 1;
        Ok(s)
    }

    fn interval(&mut self) -> PResult<Interval> {
        let start = self.start_span();
        let lo_closed = match self.peek() {
            Some(TokenKind::LBracket) => true,
            Some(TokenKind::LParen) => false,
            _ => {
                self.note("interval");
                return Err(Fail::Soft);
            }
        };
        self.pos += 1;
        let lo = self.scalar()?;
        self.eat(&TokenKind::Comma, "`,`")?;
        let hi = self.scalar()?;
        let hi_closed = match self.peek() {
            Some(TokenKind::RBracket) => true,
            Some(TokenKind::RParen) => false,
            _ => {
                self.note("`]` or `)`");
                return Err(Fail::Soft);
            }
        };
        self.pos += 1;
        let span = start.join(self.prev_span());
        let ordered = matches!(lo, Scalar::Number(_) | Scalar::Date(_))
            && cmp_scalar(&lo, &hi).is_some_and(|o| o.is_le());
        if !ordered {
            return Err(self.hard(
                span,
                "interval with lo <= hi",
                "interval bounds must be numbers or dates of one kind with lo <= hi",
            ));
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    fn array(&mut self) -> PResult<Vec<Scalar>> {
        let start = self.eat(&TokenKind::LBrace, "`{`")?;
        let mut items = vec![self.scalar()?];
        while self.peek() == Some(&TokenKind::Comma) {
            self.pos += 1;
            items.push(self.scalar()?);
        }
        self.eat(&TokenKind::RBrace, "`}`")?;
        if items.iter().any(|s| !s.same_kind(&items[0])) {
            return Err(self.hard(
                start.join(self.prev_span()),
                "array of one scalar kind",
                "array elements must share a kind",
            ));
        }
        Ok(items)
    }
}
