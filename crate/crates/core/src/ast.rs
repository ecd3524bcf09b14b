//! Abstract syntax of hypotheses and the canonical printer.
//!
//! A hypothesis is a flat conjunction of clauses `lhs op rhs [pred]`. Every
//! node carries a [`Span`] into the source text it was parsed from; spans are
//! ignored by equality so that two trees compare structurally.

use std::fmt;

use chrono::{NaiveDateTime, Timelike};
use serde::Serialize;

/// Byte range into the source text.
///
/// Spans never take part in equality: two nodes parsed from differently
/// formatted text compare equal when their structure is the same.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

/// Comparison operators usable in clauses and predicate conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OpKind {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    RegexMatch,
    In,
    NotIn,
}

impl OpKind {
    pub const ALL: [OpKind; 9] = [
        OpKind::Eq,
        OpKind::Neq,
        OpKind::Lt,
        OpKind::Le,
        OpKind::Gt,
        OpKind::Ge,
        OpKind::RegexMatch,
        OpKind::In,
        OpKind::NotIn,
    ];

    /// ASCII spelling used by the printer.
    pub fn symbol(self) -> &'static str {
        match self {
            OpKind::Eq => "=",
            OpKind::Neq => "!=",
            OpKind::Lt => "<",
            OpKind::Le => "<=",
            OpKind::Gt => ">",
            OpKind::Ge => ">=",
            OpKind::RegexMatch => "~",
            OpKind::In => "in",
            OpKind::NotIn => "not in",
        }
    }

    pub fn is_word(self) -> bool {
        matches!(self, OpKind::In | OpKind::NotIn)
    }

    pub fn is_ordering(self) -> bool {
        matches!(self, OpKind::Lt | OpKind::Le | OpKind::Gt | OpKind::Ge)
    }

    pub fn is_membership(self) -> bool {
        matches!(self, OpKind::In | OpKind::NotIn)
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A single scalar constant or cell value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Str(String),
    Date(NaiveDateTime),
    Bool(bool),
}

impl Scalar {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Scalar::Number(_) => "number",
            Scalar::Str(_) => "string",
            Scalar::Date(_) => "date",
            Scalar::Bool(_) => "boolean",
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Scalar::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn same_kind(&self, other: &Scalar) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Number(n) => write!(f, "{n}"),
            Scalar::Str(s) => write_quoted(f, s),
            Scalar::Date(d) => write_date(f, d),
            Scalar::Bool(b) => write!(f, "{b}"),
        }
    }
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("'")?;
    for c in s.chars() {
        match c {
            '\'' => f.write_str("\\'")?,
            '\\' => f.write_str("\\\\")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("'")
}

fn write_date(f: &mut fmt::Formatter<'_>, d: &NaiveDateTime) -> fmt::Result {
    if d.time().num_seconds_from_midnight() == 0 && d.time().nanosecond() == 0 {
        write!(f, "@{}", d.format("%Y-%m-%d"))
    } else {
        write!(f, "@{}", d.format("%Y-%m-%dT%H:%M:%S"))
    }
}

/// A range constant such as `[0, 7)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    /// True when `v` lies inside the interval. Bounds and value must share a kind.
    pub fn contains(&self, v: &Scalar) -> bool {
        let (Some(lo), Some(hi)) = (cmp_scalar(v, &self.lo), cmp_scalar(v, &self.hi)) else {
            return false;
        };
        let above = if self.lo_closed { lo.is_ge() } else { lo.is_gt() };
        let below = if self.hi_closed { hi.is_le() } else { hi.is_lt() };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Ordering between two scalars of the same kind; `None` across kinds.
pub fn cmp_scalar(a: &Scalar, b: &Scalar) -> Option<std::cmp::Ordering> {
    match (a, b) {
        (Scalar::Number(x), Scalar::Number(y)) => x.partial_cmp(y),
        (Scalar::Str(x), Scalar::Str(y)) => Some(x.cmp(y)),
        (Scalar::Date(x), Scalar::Date(y)) => Some(x.cmp(y)),
        (Scalar::Bool(x), Scalar::Bool(y)) => Some(x.cmp(y)),
        _ => None,
    }
}

/// Constants written inside a hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ConstValue {
    Scalar(Scalar),
    Array(Vec<Scalar>),
    Interval(Interval),
}

impl ConstValue {
    pub fn number(n: f64) -> Self {
        ConstValue::Scalar(Scalar::Number(n))
    }

    pub fn string(s: impl Into<String>) -> Self {
        ConstValue::Scalar(Scalar::Str(s.into()))
    }
}

impl fmt::Display for ConstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstValue::Scalar(s) => s.fmt(f),
            ConstValue::Interval(i) => i.fmt(f),
            ConstValue::Array(items) => {
                f.write_str("{")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    item.fmt(f)?;
                }
                f.write_str("}")
            }
        }
    }
}

/// One condition inside a predicate: `attr op value`, optionally negated.
///
/// The value is normally a constant; a scalar-valued expression such as
/// `MAX(AwardsWon)` is also accepted and is evaluated over the predicate's
/// base rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conjunct {
    pub negated: bool,
    pub attr: String,
    pub op: OpKind,
    pub value: Expr,
    #[serde(skip)]
    pub span: Span,
}

/// A conjunction of conditions restricting rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Predicate {
    pub conjuncts: Vec<Conjunct>,
    #[serde(skip)]
    pub span: Span,
}

impl Predicate {
    pub fn new(conjuncts: Vec<Conjunct>) -> Self {
        Predicate { conjuncts, span: Span::default() }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            c.fmt(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!(")?;
        }
        write_ident(f, &self.attr)?;
        if self.op.is_word() {
            write!(f, " {} ", self.op)?;
        } else {
            self.op.fmt(f)?;
        }
        self.value.fmt(f)?;
        if self.negated {
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expr {
    pub kind: ExprKind,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExprKind {
    /// `name(args)[pred]`; the optional predicate narrows the rows the call sees.
    Call {
        name: String,
        args: Vec<Expr>,
        pred: Option<Predicate>,
    },
    /// `attr[pred]`: the column restricted to matching rows.
    Var { attr: String, pred: Option<Predicate> },
    Const(ConstValue),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Call { name: name.into(), args, pred: None })
    }

    pub fn var(attr: impl Into<String>) -> Self {
        Expr::new(ExprKind::Var { attr: attr.into(), pred: None })
    }

    pub fn constant(c: ConstValue) -> Self {
        Expr::new(ExprKind::Const(c))
    }

    pub fn with_pred(mut self, p: Predicate) -> Self {
        match &mut self.kind {
            ExprKind::Call { pred, .. } | ExprKind::Var { pred, .. } => *pred = Some(p),
            ExprKind::Const(_) => {}
        }
        self
    }

    /// Number of leaves: attribute references, constants and nullary calls.
    pub fn leaf_count(&self) -> usize {
        match &self.kind {
            ExprKind::Call { args, .. } if !args.is_empty() => {
                args.iter().map(Expr::leaf_count).sum()
            }
            _ => 1,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Call { name, args, pred } => {
                write_ident(f, name)?;
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.fmt(f)?;
                }
                f.write_str(")")?;
                if let Some(p) = pred {
                    write!(f, "[{p}]")?;
                }
                Ok(())
            }
            ExprKind::Var { attr, pred } => {
                write_ident(f, attr)?;
                if let Some(p) = pred {
                    write!(f, "[{p}]")?;
                }
                Ok(())
            }
            ExprKind::Const(c) => c.fmt(f),
        }
    }
}

/// `lhs op rhs`, optionally restricted by a hypothesis-level predicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clause {
    pub lhs: Expr,
    pub op: OpKind,
    pub rhs: Expr,
    pub pred: Option<Predicate>,
    #[serde(skip)]
    pub span: Span,
}

impl Clause {
    pub fn new(lhs: Expr, op: OpKind, rhs: Expr) -> Self {
        Clause { lhs, op, rhs, pred: None, span: Span::default() }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pred {
            Some(p) => write!(f, "({} {} {})[{}]", self.lhs, self.op, self.rhs, p),
            None => write!(f, "{} {} {}", self.lhs, self.op, self.rhs),
        }
    }
}

/// A hypothesis statement: a non-empty conjunction of clauses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub clauses: Vec<Clause>,
}

impl Hypothesis {
    pub fn leaf_count(&self) -> usize {
        self.clauses.iter().map(|c| c.lhs.leaf_count() + c.rhs.leaf_count()).sum()
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            c.fmt(f)?;
        }
        Ok(())
    }
}

/// Canonical surface text of a hypothesis.
pub fn pretty_print(h: &Hypothesis) -> String {
    h.to_string()
}

pub(crate) const KEYWORDS: [&str; 4] = ["in", "not", "true", "false"];

/// True when `name` can be written without backquotes.
pub fn is_bare_ident(name: &str) -> bool {
    if name == "-" {
        return true;
    }
    if KEYWORDS.contains(&name) {
        return false;
    }
    let mut segments = name.split('-');
    let Some(first) = segments.next() else {
        return false;
    };
    let mut chars = first.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    let word = |c: char| c.is_ascii_alphanumeric() || c == '_';
    chars.all(word) && segments.all(|s| !s.is_empty() && s.chars().all(word))
}

pub(crate) fn write_ident(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_bare_ident(name) {
        f.write_str(name)
    } else {
        f.write_str("`")?;
        for c in name.chars() {
            if c == '`' || c == '\\' {
                f.write_str("\\")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("`")
    }
}
