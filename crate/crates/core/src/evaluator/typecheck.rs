use serde::Serialize;

use crate::ast::{Clause, ConstValue, Expr, ExprKind, Hypothesis, OpKind, Predicate, Scalar, Span};
use crate::dataset::{AttrType, RowMask, Table};
use crate::funcs::{self, FunctionConfig, ParamKind, ResultKind, Value};

use super::{Evaluator, Stop};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    UnknownAttribute,
    UnknownFunction,
    Arity,
    ParamKind,
    OperatorType,
    RowAlignment,
    InvalidRegex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeIssue {
    pub kind: IssueKind,
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeReport {
    pub ok: bool,
    pub issues: Vec<TypeIssue>,
}

impl TypeReport {
    pub fn has(&self, kind: IssueKind) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }
}

/// Static shape of an expression.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Ty {
    Scalar(AttrType),
    Vector(AttrType),
    Model,
    Array(AttrType),
    Interval(AttrType),
    Unknown,
}

impl Ty {
    /// Element kind for comparisons. Models compare as their r-squared.
    fn elem(self) -> Option<AttrType> {
        match self {
            Ty::Scalar(k) | Ty::Vector(k) => Some(k),
            Ty::Model => Some(AttrType::Number),
            _ => None,
        }
    }

    fn describe(self) -> String {
        match self {
            Ty::Scalar(k) => format!("{k} scalar"),
            Ty::Vector(k) => format!("{k} column"),
            Ty::Model => "model".into(),
            Ty::Array(k) => format!("{k} array"),
            Ty::Interval(k) => format!("{k} interval"),
            Ty::Unknown => "unknown".into(),
        }
    }
}

fn const_ty(c: &ConstValue) -> Ty {
    match c {
        ConstValue::Scalar(s) => Ty::Scalar(AttrType::of(s)),
        ConstValue::Array(items) => items.first().map_or(Ty::Unknown, |s| Ty::Array(AttrType::of(s))),
        ConstValue::Interval(iv) => Ty::Interval(AttrType::of(&iv.lo)),
    }
}

/// Check every name, arity, argument kind and operator in `h` against the
/// table's schema and the function registry. Row alignment of two column
/// operands is checked by computing both row sets on `t`.
pub fn typecheck(h: &Hypothesis, t: &Table) -> TypeReport {
    let mut ck = Checker { table: t, issues: Vec::new() };
    for c in &h.clauses {
        ck.clause(c);
    }
    TypeReport { ok: ck.issues.is_empty(), issues: ck.issues }
}

struct Checker<'a> {
    table: &'a Table,
    issues: Vec<TypeIssue>,
}

impl Checker<'_> {
    fn issue(&mut self, kind: IssueKind, span: Span, message: String) {
        self.issues.push(TypeIssue { kind, span, message });
    }

    fn clause(&mut self, c: &Clause) {
        if let Some(p) = &c.pred {
            self.pred(p);
        }
        let before = self.issues.len();
        let lt = self.expr(&c.lhs);
        let rt = self.expr(&c.rhs);
        self.operator(c.op, lt, &c.rhs, rt, c.span);
        if self.issues.len() == before && matches!(lt, Ty::Vector(_)) && matches!(rt, Ty::Vector(_)) {
            self.alignment(c);
        }
    }

    fn alignment(&mut self, c: &Clause) {
        let config = FunctionConfig::default();
        let ev = Evaluator { table: self.table, config: &config };
        let all = self.table.all_rows();
        let ctx = match &c.pred {
            Some(p) => match ev.restrict(p, &all) {
                Ok(m) => m,
                Err(_) => return,
            },
            None => all,
        };
        let rows = |e: &Expr| -> Option<Vec<usize>> {
            match ev.expr(e, &ctx) {
                Ok((Value::Vector(v), _)) => Some(v.rows),
                Ok(_) | Err(Stop::Vacuous(_)) | Err(Stop::Error(_)) => None,
            }
        };
        if let (Some(l), Some(r)) = (rows(&c.lhs), rows(&c.rhs)) {
            if l != r {
                let ids = |rs: Vec<usize>| RowMask(rs).ids(self.table);
                let msg = format!(
                    "operands do not refer to the same records: `{}` selects ids {:?}, `{}` selects ids {:?}; \
                     use a hypothesis-level predicate",
                    c.lhs,
                    ids(l),
                    c.rhs,
                    ids(r)
                );
                self.issue(IssueKind::RowAlignment, c.span, msg);
            }
        }
    }

    fn operator(&mut self, op: OpKind, lt: Ty, rhs: &Expr, rt: Ty, span: Span) {
        if lt == Ty::Unknown || rt == Ty::Unknown {
            return;
        }
        let Some(lk) = lt.elem() else {
            self.issue(IssueKind::OperatorType, span, format!("`{op}` cannot take a {} on the left", lt.describe()));
            return;
        };
        match op {
            OpKind::RegexMatch => {
                if lk != AttrType::String {
                    self.issue(IssueKind::OperatorType, span, format!("`~` applies only to strings, got {}", lt.describe()));
                }
                match &rhs.kind {
                    ExprKind::Const(ConstValue::Scalar(Scalar::Str(p))) => self.regex(p, rhs.span),
                    _ => self.issue(
                        IssueKind::OperatorType,
                        span,
                        format!("`~` needs a string pattern constant, got {}", rt.describe()),
                    ),
                }
            }
            OpKind::In | OpKind::NotIn => match rt {
                Ty::Interval(k) if k == AttrType::String || k == AttrType::Boolean => {
                    self.issue(IssueKind::OperatorType, span, format!("interval on {k}s has no order"))
                }
                Ty::Interval(k) | Ty::Array(k) if k != lk => {
                    self.issue(IssueKind::OperatorType, span, format!("{} tested against {}", rt.describe(), lt.describe()))
                }
                Ty::Interval(_) | Ty::Array(_) => {}
                _ => self.issue(
                    IssueKind::OperatorType,
                    span,
                    format!("`{op}` needs an interval or array on the right, got {}", rt.describe()),
                ),
            },
            _ => match rt.elem() {
                Some(rk) if rk != lk => {
                    self.issue(IssueKind::OperatorType, span, format!("{} compared with {}", lt.describe(), rt.describe()))
                }
                Some(AttrType::Boolean) if op.is_ordering() => {
                    self.issue(IssueKind::OperatorType, span, format!("`{op}` does not order booleans"))
                }
                Some(_) => {}
                None => self.issue(
                    IssueKind::OperatorType,
                    span,
                    format!("`{op}` cannot compare with a {}", rt.describe()),
                ),
            },
        }
    }

    fn regex(&mut self, pattern: &str, span: Span) {
        if let Err(e) = regex::Regex::new(pattern) {
            self.issue(IssueKind::InvalidRegex, span, format!("invalid pattern '{pattern}': {e}"));
        }
    }

    fn pred(&mut self, p: &Predicate) {
        for cj in &p.conjuncts {
            let vt = self.expr(&cj.value);
            let Some(idx) = self.table.schema().index_of(&cj.attr) else {
                self.issue(IssueKind::UnknownAttribute, cj.span, format!("unknown attribute `{}`", cj.attr));
                continue;
            };
            let at = Ty::Vector(self.table.column(idx).ty());
            let vt = match vt {
                Ty::Vector(_) => {
                    self.issue(
                        IssueKind::OperatorType,
                        cj.value.span,
                        format!("condition on `{}` needs a single value, got {}", cj.attr, vt.describe()),
                    );
                    Ty::Unknown
                }
                other => other,
            };
            self.operator(cj.op, at, &cj.value, vt, cj.span);
        }
    }

    fn expr(&mut self, e: &Expr) -> Ty {
        match &e.kind {
            ExprKind::Const(c) => const_ty(c),
            ExprKind::Var { attr, pred } => {
                if let Some(p) = pred {
                    self.pred(p);
                }
                match self.table.schema().index_of(attr) {
                    Some(i) => Ty::Vector(self.table.column(i).ty()),
                    None => {
                        self.issue(IssueKind::UnknownAttribute, e.span, format!("unknown attribute `{attr}`"));
                        Ty::Unknown
                    }
                }
            }
            ExprKind::Call { name, args, pred } => {
                if let Some(p) = pred {
                    self.pred(p);
                }
                let tys: Vec<Ty> = args.iter().map(|a| self.expr(a)).collect();
                let Some(sig) = funcs::lookup(name) else {
                    self.issue(IssueKind::UnknownFunction, e.span, format!("unknown function `{name}`"));
                    return Ty::Unknown;
                };
                let Some(params) = sig.params_for(args.len()) else {
                    let arities: Vec<String> = sig.arities().iter().map(|a| a.to_string()).collect();
                    self.issue(
                        IssueKind::Arity,
                        e.span,
                        format!("{} takes {} argument(s), got {}", sig.name, arities.join(" or "), args.len()),
                    );
                    return Ty::Unknown;
                };
                for ((arg, ty), want) in args.iter().zip(&tys).zip(params) {
                    if !accepts(*want, *ty) {
                        self.issue(
                            IssueKind::ParamKind,
                            arg.span,
                            format!("{} expected, got {}", want.name(), ty.describe()),
                        );
                    }
                }
                match sig.result {
                    ResultKind::ScalarNumber => Ty::Scalar(AttrType::Number),
                    ResultKind::VectorNumber => Ty::Vector(AttrType::Number),
                    ResultKind::Model => Ty::Model,
                    ResultKind::SameAsInput => {
                        if tys.iter().any(|t| matches!(t, Ty::Vector(_))) {
                            Ty::Vector(AttrType::Number)
                        } else {
                            Ty::Scalar(AttrType::Number)
                        }
                    }
                }
            }
        }
    }
}

fn accepts(want: ParamKind, got: Ty) -> bool {
    use AttrType::Number;
    match (want, got) {
        (_, Ty::Unknown) => true,
        (ParamKind::Model, t) => t == Ty::Model,
        (ParamKind::VectorNumber, t) => matches!(t, Ty::Vector(Number) | Ty::Scalar(Number)),
        (ParamKind::ScalarNumber, t) => matches!(t, Ty::Scalar(Number) | Ty::Model),
        (ParamKind::Numeric, t) => matches!(t, Ty::Scalar(Number) | Ty::Vector(Number) | Ty::Model),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_csv;
    use crate::parser::parse_hypothesis;

    fn relation1() -> Table {
        load_csv(
            "id,month,market,cost,price\n1,1,US,1,10\n2,2,US,2,11\n3,3,US,3,13\n4,4,US,4,12\n5,1,EU,5,14\n6,2,EU,6,15\n",
            r#"{"attrs":[{"name":"id","type":"number"},{"name":"month","type":"number"},{"name":"market","type":"string"},{"name":"cost","type":"number"},{"name":"price","type":"number"}]}"#,
        )
        .unwrap()
    }

    fn check(src: &str) -> TypeReport {
        typecheck(&parse_hypothesis(src).unwrap(), &relation1())
    }

    #[test]
    fn string_column_into_numeric_slot() {
        let r = check("KL(market, price) < 1");
        assert!(!r.ok);
        assert_eq!(r.issues.len(), 1);
        assert_eq!(r.issues[0].kind, IssueKind::ParamKind);
        assert_eq!(r.issues[0].message, "vector-number expected, got string column");
    }

    #[test]
    fn misaligned_rows() {
        let r = check("cost[market='US'] < price[market='EU']");
        assert!(r.has(IssueKind::RowAlignment), "{r:?}");
        assert!(check("(cost < price)[market='US']").ok);
        // different predicates that select the same rows are fine
        assert!(check("cost[market='US'] < price[id<5]").ok);
    }

    #[test]
    fn names_and_arity() {
        assert!(check("AVG(profit) > 1").has(IssueKind::UnknownAttribute));
        assert!(check("MEDIAN(cost) > 1").has(IssueKind::UnknownFunction));
        assert!(check("AVG(cost, price) > 1").has(IssueKind::Arity));
        assert!(check("count(cost) > 1").has(IssueKind::Arity));
        assert!(check("cost[region='US'] > 1").has(IssueKind::UnknownAttribute));
    }

    #[test]
    fn operator_types() {
        assert!(check("cost ~ '^1'").has(IssueKind::OperatorType));
        assert!(check("market = 1").has(IssueKind::OperatorType));
        assert!(check("cost in {'a'}").has(IssueKind::OperatorType));
        assert!(check("market ~ '('").has(IssueKind::InvalidRegex));
        assert!(check("market ~ '^U' & cost in [1, 6] & market in {'US', 'EU'}").ok);
        assert!(check("SRES(fit_LM(cost, price), cost, price) in [-2, 2]").ok);
        assert!(check("SRES(cost, cost, price) in [-2, 2]").has(IssueKind::ParamKind));
    }

    #[test]
    fn report_ok_iff_no_issues() {
        for src in ["2 = 2", "AVG(cost) < 10", "count() > 9 [market='US']", "CORR(month, cost) > 0.5"] {
            let r = check(src);
            assert!(r.ok && r.issues.is_empty(), "{src}");
        }
    }
}
