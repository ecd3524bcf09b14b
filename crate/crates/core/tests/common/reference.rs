//! A slow, direct interpreter used as an oracle for the evaluator.
//!
//! It shares only the AST and the table's cell storage with the library.
//! Selections are plain row lists rebuilt by scanning every row, and each
//! comparison is written out case by case.

use std::cmp::Ordering;

use hypogram::ast::{Clause, ConstValue, Expr, ExprKind, Hypothesis, OpKind, Predicate, Scalar};
use hypogram::dataset::{AttrType, Table};
use hypogram::evaluator::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    True,
    False,
    Vacuous,
    Error,
}

impl Answer {
    pub fn name(self) -> &'static str {
        match self {
            Answer::True => "true",
            Answer::False => "false",
            Answer::Vacuous => "vacuous",
            Answer::Error => "error",
        }
    }
}

#[derive(Debug, Clone)]
enum V {
    One(Scalar, bool),
    Col { rows: Vec<usize>, vals: Vec<Scalar>, ty: AttrType },
    List(Vec<Scalar>),
    Range(hypogram::ast::Interval),
}

enum Halt {
    Empty,
    Bad,
}

type R<T> = Result<T, Halt>;

fn ty_of(s: &Scalar) -> AttrType {
    match s {
        Scalar::Number(_) => AttrType::Number,
        Scalar::Str(_) => AttrType::String,
        Scalar::Date(_) => AttrType::Date,
        Scalar::Bool(_) => AttrType::Boolean,
    }
}

fn close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= 1e-9 * scale
}

fn same(a: &Scalar, b: &Scalar, loose: bool) -> bool {
    if let (Scalar::Number(x), Scalar::Number(y)) = (a, b) {
        if loose {
            return close(*x, *y);
        }
        return x == y;
    }
    a == b
}

fn order(a: &Scalar, b: &Scalar) -> Option<Ordering> {
    match (a, b) {
        (Scalar::Number(x), Scalar::Number(y)) => x.partial_cmp(y),
        (Scalar::Str(x), Scalar::Str(y)) => Some(x.cmp(y)),
        (Scalar::Date(x), Scalar::Date(y)) => Some(x.cmp(y)),
        (Scalar::Bool(x), Scalar::Bool(y)) => Some(x.cmp(y)),
        _ => None,
    }
}

fn holds(op: OpKind, a: &Scalar, b: &Scalar, loose: bool) -> bool {
    match op {
        OpKind::Eq => same(a, b, loose),
        OpKind::Neq => ty_of(a) == ty_of(b) && !same(a, b, loose),
        OpKind::Lt | OpKind::Le | OpKind::Gt | OpKind::Ge => {
            if loose && same(a, b, true) {
                return op == OpKind::Le || op == OpKind::Ge;
            }
            match (op, order(a, b)) {
                (_, None) => false,
                (OpKind::Lt, Some(o)) => o == Ordering::Less,
                (OpKind::Le, Some(o)) => o != Ordering::Greater,
                (OpKind::Gt, Some(o)) => o == Ordering::Greater,
                (_, Some(o)) => o != Ordering::Less,
            }
        }
        _ => false,
    }
}

fn inside(iv: &hypogram::ast::Interval, v: &Scalar) -> bool {
    let lo = order(v, &iv.lo);
    let hi = order(v, &iv.hi);
    let (Some(lo), Some(hi)) = (lo, hi) else { return false };
    let above = lo == Ordering::Greater || (iv.lo_closed && lo == Ordering::Equal);
    let below = hi == Ordering::Less || (iv.hi_closed && hi == Ordering::Equal);
    above && below
}

/// A row test `cell op rhs`, or `Bad` when the two sides cannot be compared.
type RowTest = Box<dyn Fn(&Scalar) -> bool>;

fn row_test(op: OpKind, rhs: &V, lhs_ty: AttrType, loose: bool) -> R<RowTest> {
    match (op, rhs) {
        (OpKind::RegexMatch, V::One(Scalar::Str(p), _)) if lhs_ty == AttrType::String => {
            let re = regex::Regex::new(p).map_err(|_| Halt::Bad)?;
            Ok(Box::new(move |c: &Scalar| matches!(c, Scalar::Str(s) if re.is_match(s))))
        }
        (OpKind::RegexMatch, _) => Err(Halt::Bad),
        (OpKind::In | OpKind::NotIn, V::Range(iv)) if ty_of(&iv.lo) == lhs_ty => {
            let iv = iv.clone();
            let want = op == OpKind::In;
            Ok(Box::new(move |c: &Scalar| inside(&iv, c) == want))
        }
        (OpKind::In | OpKind::NotIn, V::List(items)) if items.iter().take(1).all(|s| ty_of(s) == lhs_ty) => {
            let items = items.clone();
            let want = op == OpKind::In;
            Ok(Box::new(move |c: &Scalar| items.iter().any(|i| same(c, i, loose)) == want))
        }
        (OpKind::In | OpKind::NotIn, _) => Err(Halt::Bad),
        (_, V::One(s, _)) => {
            if ty_of(s) != lhs_ty || (lhs_ty == AttrType::Boolean && !matches!(op, OpKind::Eq | OpKind::Neq)) {
                return Err(Halt::Bad);
            }
            let s = s.clone();
            Ok(Box::new(move |c: &Scalar| holds(op, c, &s, loose)))
        }
        _ => Err(Halt::Bad),
    }
}

/// The library's verdict on `text`, in the same vocabulary.
pub fn library(text: &str, t: &Table) -> Answer {
    let h = hypogram::parser::parse_hypothesis(text).unwrap();
    match hypogram::evaluator::eval_hypothesis(&h, t) {
        Ok(o) => match o.verdict {
            Verdict::True => Answer::True,
            Verdict::False => Answer::False,
            Verdict::Vacuous => Answer::Vacuous,
        },
        Err(_) => Answer::Error,
    }
}

/// The reference verdict on `text`.
pub fn reference(text: &str, t: &Table) -> Answer {
    Reference { t }.answer(&hypogram::parser::parse_hypothesis(text).unwrap())
}

pub struct Reference<'a> {
    pub t: &'a Table,
}

impl Reference<'_> {
    pub fn answer(&self, h: &Hypothesis) -> Answer {
        let mut verdicts = Vec::new();
        for c in &h.clauses {
            match self.clause(c) {
                Ok(b) => verdicts.push(if b { Answer::True } else { Answer::False }),
                Err(Halt::Empty) => verdicts.push(Answer::Vacuous),
                Err(Halt::Bad) => return Answer::Error,
            }
        }
        if verdicts.contains(&Answer::Vacuous) {
            Answer::Vacuous
        } else if verdicts.contains(&Answer::False) {
            Answer::False
        } else {
            Answer::True
        }
    }

    fn every_row(&self) -> Vec<usize> {
        (0..self.t.row_count()).collect()
    }

    fn select(&self, p: &Predicate, base: &[usize]) -> R<Vec<usize>> {
        let mut rhs = Vec::new();
        for cj in &p.conjuncts {
            rhs.push(match &cj.value.kind {
                ExprKind::Const(c) => (constant(c), false),
                _ => match self.expr(&cj.value, base)? {
                    V::One(s, computed) => (V::One(s, false), computed),
                    _ => return Err(Halt::Bad),
                },
            });
        }
        let mut tests = Vec::new();
        for (cj, (value, loose)) in p.conjuncts.iter().zip(&rhs) {
            let col = self.t.schema().index_of(&cj.attr).ok_or(Halt::Bad)?;
            let ty = self.t.schema().attrs[col].ty;
            tests.push((col, cj.negated, row_test(cj.op, value, ty, *loose)?));
        }
        Ok(base
            .iter()
            .copied()
            .filter(|&r| tests.iter().all(|(col, neg, test)| test(&self.t.cell(r, *col)) != *neg))
            .collect())
    }

    fn clause(&self, c: &Clause) -> R<bool> {
        let rows = match &c.pred {
            Some(p) => self.select(p, &self.every_row())?,
            None => self.every_row(),
        };
        let l = self.expr(&c.lhs, &rows)?;
        let r = self.expr(&c.rhs, &rows)?;
        compare(c.op, l, r)
    }

    fn expr(&self, e: &Expr, rows: &[usize]) -> R<V> {
        match &e.kind {
            ExprKind::Const(c) => Ok(constant(c)),
            ExprKind::Var { attr, pred } => {
                let col = self.t.schema().index_of(attr).ok_or(Halt::Bad)?;
                let rows = match pred {
                    Some(p) => self.select(p, rows)?,
                    None => rows.to_vec(),
                };
                let vals = rows.iter().map(|&r| self.t.cell(r, col)).collect();
                Ok(V::Col { rows, vals, ty: self.t.schema().attrs[col].ty })
            }
            ExprKind::Call { name, args, pred } => {
                let rows = match pred {
                    Some(p) => self.select(p, rows)?,
                    None => rows.to_vec(),
                };
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.expr(a, &rows)?);
                }
                apply(name, vals, rows.len())
            }
        }
    }
}

fn constant(c: &ConstValue) -> V {
    match c {
        ConstValue::Scalar(s) => V::One(s.clone(), false),
        ConstValue::Array(a) => V::List(a.clone()),
        ConstValue::Interval(i) => V::Range(i.clone()),
    }
}

fn numbers(v: &V) -> R<(Vec<usize>, Vec<f64>)> {
    match v {
        V::Col { rows, vals, .. } => {
            let mut out = Vec::new();
            for x in vals {
                match x {
                    Scalar::Number(n) => out.push(*n),
                    _ => return Err(Halt::Bad),
                }
            }
            Ok((rows.clone(), out))
        }
        V::One(Scalar::Number(n), _) => Ok((vec![], vec![*n])),
        _ => Err(Halt::Bad),
    }
}

fn num(x: f64) -> R<V> {
    if x.is_finite() {
        Ok(V::One(Scalar::Number(x), true))
    } else {
        Err(Halt::Bad)
    }
}

fn apply(name: &str, args: Vec<V>, rows: usize) -> R<V> {
    let upper = name.to_ascii_uppercase();
    let arity = args.len();
    let first = |args: &[V]| -> R<Vec<f64>> {
        let (_, xs) = numbers(&args[0])?;
        if xs.is_empty() {
            Err(Halt::Empty)
        } else {
            Ok(xs)
        }
    };
    match (upper.as_str(), arity) {
        ("COUNT", 0) => num(rows as f64),
        ("MOD", 2) => match (&args[0], &args[1]) {
            (V::One(Scalar::Number(a), _), V::One(Scalar::Number(b), _)) if *b != 0.0 => num(((a % b) + b) % b),
            _ => Err(Halt::Bad),
        },
        ("AVG", 1) => {
            let xs = first(&args)?;
            num(xs.iter().sum::<f64>() / xs.len() as f64)
        }
        ("SUM", 1) => num(first(&args)?.iter().sum()),
        ("MAX", 1) => num(first(&args)?.into_iter().reduce(f64::max).unwrap()),
        ("MIN", 1) => num(first(&args)?.into_iter().reduce(f64::min).unwrap()),
        ("CORR", 2) => {
            let (ra, x) = numbers(&args[0])?;
            let (rb, y) = numbers(&args[1])?;
            if ra != rb || x.len() != y.len() {
                return Err(Halt::Bad);
            }
            if x.is_empty() {
                return Err(Halt::Empty);
            }
            let n = x.len() as f64;
            let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
            let mut sxy = 0.0;
            let mut sxx = 0.0;
            let mut syy = 0.0;
            for i in 0..x.len() {
                sxy += (x[i] - mx) * (y[i] - my);
                sxx += (x[i] - mx).powi(2);
                syy += (y[i] - my).powi(2);
            }
            if sxx == 0.0 || syy == 0.0 {
                return Err(Halt::Bad);
            }
            num(sxy / (sxx * syy).sqrt())
        }
        _ => panic!("reference interpreter does not implement {name}/{arity}"),
    }
}

fn compare(op: OpKind, l: V, r: V) -> R<bool> {
    let loose = matches!(l, V::One(_, true)) || matches!(r, V::One(_, true));
    let all = |vals: &[Scalar], f: &dyn Fn(&Scalar) -> bool| -> R<bool> {
        if vals.is_empty() {
            Err(Halt::Empty)
        } else {
            Ok(vals.iter().all(f))
        }
    };
    let word = matches!(op, OpKind::In | OpKind::NotIn | OpKind::RegexMatch);
    match (&l, &r) {
        (V::One(a, _), V::One(..) | V::List(_) | V::Range(_)) => {
            let test = row_test(op, &r, ty_of(a), loose)?;
            Ok(test(a))
        }
        (V::Col { vals, ty, .. }, V::One(..) | V::List(_) | V::Range(_)) => {
            let test = row_test(op, &r, *ty, loose)?;
            all(vals, &|x| test(x))
        }
        (V::One(a, _), V::Col { vals, ty, .. }) => {
            if word || ty_of(a) != *ty {
                return Err(Halt::Bad);
            }
            all(vals, &|x| holds(op, a, x, loose))
        }
        (V::Col { rows: ra, vals: a, ty: ta }, V::Col { rows: rb, vals: b, ty: tb }) => {
            if ra != rb || word || ta != tb {
                return Err(Halt::Bad);
            }
            if a.is_empty() {
                return Err(Halt::Empty);
            }
            Ok(a.iter().zip(b).all(|(x, y)| holds(op, x, y, loose)))
        }
        _ => Err(Halt::Bad),
    }
}
