//! Type checking and evaluation of hypotheses against a table.
//!
//! Comparisons between a column and anything else are universally
//! quantified: the clause holds only if it holds for every selected row.
//! A clause with nothing to quantify over, or an aggregate over no rows, is
//! [`Verdict::Vacuous`] rather than true.

mod typecheck;

use serde::Serialize;
use thiserror::Error;

use crate::ast::{Clause, ConstValue, Expr, ExprKind, Hypothesis, OpKind, Predicate, Scalar};
use crate::dataset::{self, AttrType, CompiledTest, Condition, DataError, RowMask, Table};
use crate::funcs::{self, CallContext, FuncError, FunctionConfig, Value, Vector};

pub use typecheck::{typecheck, IssueKind, TypeIssue, TypeReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Vacuous,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Vacuous => "vacuous",
        }
    }

    /// Conjunction: any vacuous clause makes the whole vacuous, then any
    /// false clause makes it false.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Vacuous, _) | (_, Verdict::Vacuous) => Verdict::Vacuous,
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            _ => Verdict::True,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{name}: {error}")]
    Function { name: String, error: FuncError },
    #[error("row alignment: {0}")]
    RowAlignment(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("type error: {0}")]
    Type(String),
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Report vacuous clauses as true (classical empty-set semantics).
    pub vacuous_as_true: bool,
    /// Largest trace kept, in nodes.
    pub trace_cap: usize,
    pub functions: FunctionConfig,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { vacuous_as_true: false, trace_cap: 10_000, functions: FunctionConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseResult {
    pub clause: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One evaluated node. Expression leaves of the hypothesis are leaves here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceNode {
    pub node: &'static str,
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TraceNode::size).sum::<usize>()
    }

    pub fn leaf_count(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(TraceNode::leaf_count).sum()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalOutcome {
    pub verdict: Verdict,
    pub clauses: Vec<ClauseResult>,
    pub trace: Option<TraceNode>,
    pub trace_elided: bool,
}

impl EvalOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }
}

/// Evaluate with default options.
pub fn eval_hypothesis(h: &Hypothesis, t: &Table) -> Result<EvalOutcome, EvalError> {
    eval_hypothesis_with(h, t, &EvalOptions::default())
}

pub fn eval_hypothesis_with(h: &Hypothesis, t: &Table, opts: &EvalOptions) -> Result<EvalOutcome, EvalError> {
    let ev = Evaluator { table: t, config: &opts.functions };
    let mut verdict = Verdict::True;
    let mut clauses = Vec::with_capacity(h.clauses.len());
    let mut nodes = Vec::with_capacity(h.clauses.len());
    for c in &h.clauses {
        let (mut v, note, node) = ev.clause(c)?;
        if v == Verdict::Vacuous && opts.vacuous_as_true {
            v = Verdict::True;
        }
        verdict = verdict.and(v);
        clauses.push(ClauseResult { clause: c.to_string(), verdict: v, note });
        nodes.push(node);
    }
    let root = TraceNode {
        node: "hypothesis",
        text: h.to_string(),
        value: Some(verdict.as_str().into()),
        rows: None,
        children: nodes,
    };
    let (trace, trace_elided) = if root.size() > opts.trace_cap { (None, true) } else { (Some(root), false) };
    Ok(EvalOutcome { verdict, clauses, trace, trace_elided })
}

/// Value of an expression over the rows in `ctx`; `None` when it aggregates
/// over no rows.
pub fn eval_expr(e: &Expr, t: &Table, ctx: &RowMask, config: &FunctionConfig) -> Result<Option<Value>, EvalError> {
    let ev = Evaluator { table: t, config };
    match ev.expr(e, ctx) {
        Ok((v, _)) => Ok(Some(v)),
        Err(Stop::Vacuous(_)) => Ok(None),
        Err(Stop::Error(e)) => Err(e),
    }
}

enum Stop {
    Vacuous(String),
    Error(EvalError),
}

impl From<EvalError> for Stop {
    fn from(e: EvalError) -> Self {
        Stop::Error(e)
    }
}

impl From<DataError> for Stop {
    fn from(e: DataError) -> Self {
        Stop::Error(EvalError::Data(e))
    }
}

pub(crate) struct Evaluator<'a> {
    pub(crate) table: &'a Table,
    pub(crate) config: &'a FunctionConfig,
}

const SHOWN_VALUES: usize = 12;

fn summarize(v: &Value) -> String {
    match v {
        Value::Vector(vec) if vec.values.len() > SHOWN_VALUES => {
            let head: Vec<String> = vec.values[..SHOWN_VALUES].iter().map(|s| s.to_string()).collect();
            format!("[{}, ... ({} values)]", head.join(", "), vec.values.len())
        }
        other => other.to_string(),
    }
}

impl Evaluator<'_> {
    fn clause(&self, c: &Clause) -> Result<(Verdict, Option<String>, TraceNode), EvalError> {
        let all = self.table.all_rows();
        let outcome = (|| -> Result<(Verdict, TraceNode, TraceNode, usize), Stop> {
            let ctx = match &c.pred {
                Some(p) => self.restrict(p, &all)?,
                None => all.clone(),
            };
            let (l, ln) = self.expr(&c.lhs, &ctx)?;
            let (r, rn) = self.expr(&c.rhs, &ctx)?;
            let v = compare(c.op, &l, &r)?;
            Ok((v, ln, rn, ctx.len()))
        })();
        let node = |verdict: Verdict, children: Vec<TraceNode>, rows: Option<usize>| TraceNode {
            node: "clause",
            text: c.to_string(),
            value: Some(verdict.as_str().into()),
            rows,
            children,
        };
        match outcome {
            Ok((v, ln, rn, rows)) => {
                let note = (v == Verdict::Vacuous).then(|| "no rows to compare".to_string());
                Ok((v, note, node(v, vec![ln, rn], Some(rows))))
            }
            Err(Stop::Vacuous(why)) => {
                // keep leaf structure so the trace still mirrors the clause
                let children = vec![skeleton(&c.lhs), skeleton(&c.rhs)];
                Ok((Verdict::Vacuous, Some(why), node(Verdict::Vacuous, children, None)))
            }
            Err(Stop::Error(e)) => Err(e),
        }
    }

    /// Rows of `base` matching `p`. Computed conjunct values are evaluated
    /// over `base` first.
    fn restrict(&self, p: &Predicate, base: &RowMask) -> Result<RowMask, Stop> {
        let mut conds = Vec::with_capacity(p.conjuncts.len());
        for cj in &p.conjuncts {
            let (value, tolerant) = match &cj.value.kind {
                ExprKind::Const(v) => (v.clone(), false),
                _ => {
                    let (v, _) = self.expr(&cj.value, base)?;
                    match v {
                        Value::Scalar { value, computed } => (ConstValue::Scalar(value), computed),
                        Value::Model(m) => (ConstValue::Scalar(Scalar::Number(m.r_squared)), true),
                        other => {
                            return Err(EvalError::Type(format!(
                                "condition on `{}` needs a single value, got {}",
                                cj.attr,
                                other.kind_name()
                            ))
                            .into())
                        }
                    }
                }
            };
            conds.push(Condition { negated: cj.negated, attr: cj.attr.clone(), op: cj.op, value, tolerant });
        }
        Ok(dataset::filter(self.table, &conds, base)?)
    }

    fn expr(&self, e: &Expr, ctx: &RowMask) -> Result<(Value, TraceNode), Stop> {
        match &e.kind {
            ExprKind::Const(c) => {
                let v = Value::from_const(c);
                let node = TraceNode { node: "const", text: e.to_string(), value: Some(v.to_string()), rows: None, children: vec![] };
                Ok((v, node))
            }
            ExprKind::Var { attr, pred } => {
                let col = self
                    .table
                    .schema()
                    .index_of(attr)
                    .ok_or_else(|| DataError::UnknownAttribute(attr.clone()))?;
                let mask = match pred {
                    Some(p) => self.restrict(p, ctx)?,
                    None => ctx.clone(),
                };
                let column = self.table.column(col);
                let v = Value::Vector(Vector {
                    rows: mask.rows().to_vec(),
                    values: mask.rows().iter().map(|&r| column.get(r)).collect(),
                    kind: column.ty(),
                    computed: false,
                });
                let node = TraceNode { node: "var", text: e.to_string(), value: Some(summarize(&v)), rows: Some(mask.len()), children: vec![] };
                Ok((v, node))
            }
            ExprKind::Call { name, args, pred } => {
                let fctx = match pred {
                    Some(p) => self.restrict(p, ctx)?,
                    None => ctx.clone(),
                };
                let mut vals = Vec::with_capacity(args.len());
                let mut children = Vec::with_capacity(args.len());
                for a in args {
                    let (v, n) = self.expr(a, &fctx)?;
                    vals.push(v);
                    children.push(n);
                }
                let cctx = CallContext { rows: fctx.len(), config: self.config };
                let v = match funcs::call(name, &vals, &cctx) {
                    Ok(v) => v,
                    Err(FuncError::EmptyOperand) => return Err(Stop::Vacuous(format!("{name} over no rows"))),
                    Err(FuncError::RowAlignment) => {
                        return Err(EvalError::RowAlignment(format!("arguments of {name} select different rows")).into())
                    }
                    Err(error) => return Err(EvalError::Function { name: name.clone(), error }.into()),
                };
                let node = TraceNode { node: "call", text: e.to_string(), value: Some(summarize(&v)), rows: Some(fctx.len()), children };
                Ok((v, node))
            }
        }
    }
}

fn skeleton(e: &Expr) -> TraceNode {
    let (node, children) = match &e.kind {
        ExprKind::Call { args, .. } => ("call", args.iter().map(skeleton).collect()),
        ExprKind::Var { .. } => ("var", vec![]),
        ExprKind::Const(_) => ("const", vec![]),
    };
    TraceNode { node, text: e.to_string(), value: None, rows: None, children }
}

fn as_comparable(v: &Value) -> Value {
    match v {
        Value::Model(m) => Value::Scalar { value: Scalar::Number(m.r_squared), computed: true },
        other => other.clone(),
    }
}

fn verdict_of(all: bool, n: usize) -> Verdict {
    if n == 0 {
        Verdict::Vacuous
    } else if all {
        Verdict::True
    } else {
        Verdict::False
    }
}

fn compare(op: OpKind, l: &Value, r: &Value) -> Result<Verdict, Stop> {
    let l = as_comparable(l);
    let r = as_comparable(r);
    let tolerant = l.is_computed() || r.is_computed();
    let type_err = |msg: String| Stop::Error(EvalError::Type(msg));
    let rhs_const = match &r {
        Value::Scalar { value, .. } => Some(ConstValue::Scalar(value.clone())),
        Value::Array(a) => Some(ConstValue::Array(a.clone())),
        Value::Interval(i) => Some(ConstValue::Interval(i.clone())),
        _ => None,
    };
    let lhs_kind = match &l {
        Value::Scalar { value, .. } => AttrType::of(value),
        Value::Vector(v) => v.kind,
        other => return Err(type_err(format!("`{op}` cannot take {} on the left", other.kind_name()))),
    };
    let direct = |c: &ConstValue| -> Result<CompiledTest, Stop> {
        CompiledTest::new(op, c, lhs_kind, tolerant).map_err(|e| Stop::Error(EvalError::Data(e)))
    };
    match (&l, &r) {
        (Value::Scalar { value, .. }, _) if rhs_const.is_some() => {
            let test = direct(rhs_const.as_ref().expect("checked"))?;
            Ok(if test.holds(value) { Verdict::True } else { Verdict::False })
        }
        (Value::Vector(v), _) if rhs_const.is_some() => {
            let test = direct(rhs_const.as_ref().expect("checked"))?;
            Ok(verdict_of(v.values.iter().all(|x| test.holds(x)), v.values.len()))
        }
        (Value::Scalar { value, .. }, Value::Vector(v)) => {
            if op.is_membership() || op == OpKind::RegexMatch || AttrType::of(value) != v.kind {
                return Err(type_err(format!("`{op}` cannot compare {} with {}", l.kind_name(), r.kind_name())));
            }
            let ok = v.values.iter().all(|x| dataset::compare_scalars(op, value, x, tolerant));
            Ok(verdict_of(ok, v.values.len()))
        }
        (Value::Vector(a), Value::Vector(b)) => {
            if a.rows != b.rows {
                return Err(EvalError::RowAlignment(format!(
                    "the two sides select {} and {} rows that are not the same",
                    a.rows.len(),
                    b.rows.len()
                ))
                .into());
            }
            if op.is_membership() || op == OpKind::RegexMatch || a.kind != b.kind {
                return Err(type_err(format!("`{op}` cannot compare {} with {}", l.kind_name(), r.kind_name())));
            }
            let ok = a.values.iter().zip(&b.values).all(|(x, y)| dataset::compare_scalars(op, x, y, tolerant));
            Ok(verdict_of(ok, a.values.len()))
        }
        _ => Err(type_err(format!("`{op}` cannot compare {} with {}", l.kind_name(), r.kind_name()))),
    }
}
