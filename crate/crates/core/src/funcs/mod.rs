//! The registered function library.
//!
//! Every function has a fixed signature so the type checker can reject calls
//! before evaluation. Lookup is case-insensitive and a few aliases (`KS`,
//! `LM`, `fit`) map onto primary names.

pub mod stats;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{ConstValue, Interval, Scalar};
use crate::dataset::AttrType;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuncError {
    #[error("no rows to aggregate")]
    EmptyOperand,
    #[error("division by zero")]
    DivideByZero,
    #[error("degenerate variance")]
    DegenerateVariance,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("operands select different rows")]
    RowAlignment,
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Kind(String),
    #[error("result is not finite")]
    NonFinite,
}

/// A fitted linear model `y = slope * x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Model {
    pub kind: &'static str,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(slope={}, intercept={}, r2={})", self.kind, self.slope, self.intercept, self.r_squared)
    }
}

/// A column restricted to some rows. `rows` are table positions, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    pub rows: Vec<usize>,
    pub values: Vec<Scalar>,
    pub kind: AttrType,
    /// Values came out of a computation rather than from cells.
    pub computed: bool,
}

impl Vector {
    pub fn numbers(&self) -> Option<Vec<f64>> {
        self.values.iter().map(Scalar::as_number).collect()
    }
}

/// Runtime values.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar { value: Scalar, computed: bool },
    Vector(Vector),
    Model(Model),
    Array(Vec<Scalar>),
    Interval(Interval),
}

impl Value {
    pub fn number(n: f64) -> Value {
        Value::Scalar { value: Scalar::Number(n), computed: true }
    }

    pub fn from_const(c: &ConstValue) -> Value {
        match c {
            ConstValue::Scalar(s) => Value::Scalar { value: s.clone(), computed: false },
            ConstValue::Array(a) => Value::Array(a.clone()),
            ConstValue::Interval(i) => Value::Interval(i.clone()),
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            Value::Scalar { value, .. } => format!("scalar {}", value.kind_name()),
            Value::Vector(v) => format!("{} column", v.kind),
            Value::Model(_) => "model".into(),
            Value::Array(_) => "array".into(),
            Value::Interval(_) => "interval".into(),
        }
    }

    pub fn is_computed(&self) -> bool {
        match self {
            Value::Scalar { computed, .. } => *computed,
            Value::Vector(v) => v.computed,
            Value::Model(_) => true,
            Value::Array(_) | Value::Interval(_) => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar { value, .. } => value.fmt(f),
            Value::Vector(v) => {
                f.write_str("[")?;
                for (i, x) in v.values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    x.fmt(f)?;
                }
                f.write_str("]")
            }
            Value::Model(m) => m.fmt(f),
            Value::Array(a) => ConstValue::Array(a.clone()).fmt(f),
            Value::Interval(i) => i.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamKind {
    VectorNumber,
    ScalarNumber,
    /// A number or a numeric column.
    Numeric,
    Model,
}

impl ParamKind {
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::VectorNumber => "vector-number",
            ParamKind::ScalarNumber => "scalar-number",
            ParamKind::Numeric => "number or vector-number",
            ParamKind::Model => "model",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResultKind {
    ScalarNumber,
    VectorNumber,
    Model,
    /// Scalar for scalar arguments, vector if any argument is a vector.
    SameAsInput,
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionSignature {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    /// Accepted argument lists; most functions have exactly one.
    pub params: &'static [&'static [ParamKind]],
    pub result: ResultKind,
    pub summary: &'static str,
}

impl FunctionSignature {
    pub fn arities(&self) -> Vec<usize> {
        self.params.iter().map(|p| p.len()).collect()
    }

    pub fn params_for(&self, arity: usize) -> Option<&'static [ParamKind]> {
        self.params.iter().copied().find(|p| p.len() == arity)
    }
}

impl fmt::Display for FunctionSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let result = match self.result {
            ResultKind::ScalarNumber => "scalar-number",
            ResultKind::VectorNumber => "vector-number",
            ResultKind::Model => "model",
            ResultKind::SameAsInput => "same as input",
        };
        for (i, ps) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            let args: Vec<&str> = ps.iter().map(|p| p.name()).collect();
            write!(f, "{}({}) -> {}", self.name, args.join(", "), result)?;
        }
        if !self.aliases.is_empty() {
            write!(f, "    aliases: {}", self.aliases.join(", "))?;
        }
        Ok(())
    }
}

use ParamKind::{Model as M, Numeric as N, ScalarNumber as S, VectorNumber as V};

const REGISTRY: &[FunctionSignature] = &[
    FunctionSignature { name: "AVG", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "mean" },
    FunctionSignature { name: "SUM", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "sum" },
    FunctionSignature { name: "MAX", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "largest value" },
    FunctionSignature { name: "MIN", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "smallest value" },
    FunctionSignature { name: "STDEV", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "standard deviation (population unless configured)" },
    FunctionSignature { name: "VAR", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "variance (population unless configured)" },
    FunctionSignature { name: "count", aliases: &[], params: &[&[]], result: ResultKind::ScalarNumber, summary: "rows in the current context" },
    FunctionSignature { name: "mod", aliases: &[], params: &[&[S, S]], result: ResultKind::ScalarNumber, summary: "floored modulo" },
    FunctionSignature { name: "ABS", aliases: &[], params: &[&[N]], result: ResultKind::SameAsInput, summary: "absolute value" },
    FunctionSignature { name: "-", aliases: &[], params: &[&[N], &[N, N]], result: ResultKind::SameAsInput, summary: "negation or difference" },
    FunctionSignature { name: "CORR", aliases: &[], params: &[&[V, V]], result: ResultKind::ScalarNumber, summary: "Pearson correlation of aligned rows" },
    FunctionSignature { name: "KL", aliases: &[], params: &[&[V, V]], result: ResultKind::ScalarNumber, summary: "KL divergence of binned distributions" },
    FunctionSignature { name: "EMD", aliases: &[], params: &[&[V, V]], result: ResultKind::ScalarNumber, summary: "earth mover's distance of binned distributions" },
    FunctionSignature { name: "KS_normal", aliases: &["KS"], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "K-S p-value against a fitted normal" },
    FunctionSignature { name: "fit_LM", aliases: &["LM", "fit"], params: &[&[V, V]], result: ResultKind::Model, summary: "least-squares line; compares as its r-squared" },
    FunctionSignature { name: "SRES", aliases: &[], params: &[&[M, V, V]], result: ResultKind::VectorNumber, summary: "standardized residuals" },
    FunctionSignature { name: "fit_Gaussian", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "K-S distance to a moment-fitted normal" },
    FunctionSignature { name: "fit_Powerlaw", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "K-S distance to an MLE power law" },
    FunctionSignature { name: "fit_Linear", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "K-S distance to a uniform over [min, max]" },
    FunctionSignature { name: "fit_Kmeans", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "k-means within/total sum of squares" },
    FunctionSignature { name: "fit_Hierarchical", aliases: &[], params: &[&[V]], result: ResultKind::ScalarNumber, summary: "complete-linkage within/total sum of squares" },
];

pub fn registry() -> &'static [FunctionSignature] {
    REGISTRY
}

pub fn lookup(name: &str) -> Option<&'static FunctionSignature> {
    REGISTRY
        .iter()
        .find(|f| f.name.eq_ignore_ascii_case(name) || f.aliases.iter().any(|a| a.eq_ignore_ascii_case(name)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StdevMode {
    #[default]
    Population,
    Sample,
}

/// Tunables for the function library.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FunctionConfig {
    /// Histogram bins for KL and EMD.
    pub bins: usize,
    /// Additive smoothing for histogram probabilities.
    pub epsilon: f64,
    /// Cluster count for fit_Kmeans and fit_Hierarchical.
    pub k: usize,
    pub stdev: StdevMode,
}

impl Default for FunctionConfig {
    fn default() -> Self {
        FunctionConfig { bins: 10, epsilon: 1e-9, k: 3, stdev: StdevMode::Population }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl FunctionConfig {
    /// Load from a `.toml` or `.json` file.
    pub fn load(path: &Path) -> Result<FunctionConfig, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
        let cfg: FunctionConfig = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| ConfigError::Parse { path: shown.clone(), message: e.to_string() })?
        } else {
            toml::from_str(&text).map_err(|e| ConfigError::Parse { path: shown.clone(), message: e.to_string() })?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.bins == 0 {
            return Err(ConfigError::Invalid("bins must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(ConfigError::Invalid("k must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(ConfigError::Invalid("epsilon must be a finite non-negative number".into()));
        }
        Ok(())
    }
}

/// What a call sees besides its arguments.
#[derive(Debug, Clone, Copy)]
pub struct CallContext<'a> {
    /// Rows selected by the governing predicates; `count()` returns this.
    pub rows: usize,
    pub config: &'a FunctionConfig,
}

fn numeric_vector(v: &Value, name: &str) -> Result<(Vec<usize>, Vec<f64>), FuncError> {
    match v {
        Value::Vector(vec) => match vec.numbers() {
            Some(n) => Ok((vec.rows.clone(), n)),
            None => Err(FuncError::Kind(format!("{name}: vector-number expected, got {} column", vec.kind))),
        },
        Value::Scalar { value: Scalar::Number(n), .. } => Ok((Vec::new(), vec![*n])),
        other => Err(FuncError::Kind(format!("{name}: vector-number expected, got {}", other.kind_name()))),
    }
}

fn scalar_number(v: &Value, name: &str) -> Result<f64, FuncError> {
    match v {
        Value::Scalar { value: Scalar::Number(n), .. } => Ok(*n),
        Value::Model(m) => Ok(m.r_squared),
        other => Err(FuncError::Kind(format!("{name}: scalar-number expected, got {}", other.kind_name()))),
    }
}

/// Shared rows and the two numeric columns over them.
type Aligned = (Vec<usize>, Vec<f64>, Vec<f64>);

fn aligned(a: &Value, b: &Value, name: &str) -> Result<Aligned, FuncError> {
    let (ra, xa) = numeric_vector(a, name)?;
    let (rb, xb) = numeric_vector(b, name)?;
    if ra != rb || xa.len() != xb.len() {
        return Err(FuncError::RowAlignment);
    }
    Ok((ra, xa, xb))
}

fn nonempty(v: Vec<f64>) -> Result<Vec<f64>, FuncError> {
    if v.is_empty() {
        Err(FuncError::EmptyOperand)
    } else {
        Ok(v)
    }
}

fn finite(x: f64) -> Result<Value, FuncError> {
    if x.is_finite() {
        Ok(Value::number(x))
    } else {
        Err(FuncError::NonFinite)
    }
}

/// Apply `f` to a number or element-wise to a numeric column.
fn map_numeric(v: &Value, name: &str, f: impl Fn(f64) -> f64) -> Result<Value, FuncError> {
    match v {
        Value::Vector(vec) => {
            let (rows, xs) = numeric_vector(v, name)?;
            Ok(Value::Vector(Vector {
                rows,
                values: xs.into_iter().map(|x| Scalar::Number(f(x))).collect(),
                kind: vec.kind,
                computed: true,
            }))
        }
        other => finite(f(scalar_number(other, name)?)),
    }
}

fn difference(a: &Value, b: &Value) -> Result<Value, FuncError> {
    match (a, b) {
        (Value::Vector(_), Value::Vector(_)) => {
            let (rows, x, y) = aligned(a, b, "-")?;
            let values = x.iter().zip(&y).map(|(p, q)| Scalar::Number(p - q)).collect();
            Ok(Value::Vector(Vector { rows, values, kind: AttrType::Number, computed: true }))
        }
        (Value::Vector(_), _) => {
            let y = scalar_number(b, "-")?;
            map_numeric(a, "-", |x| x - y)
        }
        (_, Value::Vector(_)) => {
            let x = scalar_number(a, "-")?;
            map_numeric(b, "-", |y| x - y)
        }
        _ => finite(scalar_number(a, "-")? - scalar_number(b, "-")?),
    }
}

/// Call a registered function. Argument kinds are re-checked here so the
/// dispatcher is safe to use without the type checker.
pub fn call(name: &str, args: &[Value], ctx: &CallContext) -> Result<Value, FuncError> {
    let sig = lookup(name).ok_or_else(|| FuncError::Kind(format!("unknown function `{name}`")))?;
    if sig.params_for(args.len()).is_none() {
        return Err(FuncError::Kind(format!("{} takes {:?} arguments, got {}", sig.name, sig.arities(), args.len())));
    }
    let cfg = ctx.config;
    let one = |i: usize| numeric_vector(&args[i], sig.name).map(|(_, v)| v);
    match sig.name {
        "AVG" => finite(stats::mean(&nonempty(one(0)?)?)),
        "SUM" => finite(nonempty(one(0)?)?.iter().sum()),
        "MAX" => finite(nonempty(one(0)?)?.into_iter().fold(f64::NEG_INFINITY, f64::max)),
        "MIN" => finite(nonempty(one(0)?)?.into_iter().fold(f64::INFINITY, f64::min)),
        "STDEV" => finite(stats::variance(&one(0)?, cfg.stdev == StdevMode::Sample)?.sqrt()),
        "VAR" => finite(stats::variance(&one(0)?, cfg.stdev == StdevMode::Sample)?),
        "count" => Ok(Value::number(ctx.rows as f64)),
        "mod" => {
            let a = scalar_number(&args[0], "mod")?;
            let b = scalar_number(&args[1], "mod")?;
            if b == 0.0 {
                return Err(FuncError::DivideByZero);
            }
            finite(a - b * (a / b).floor())
        }
        "ABS" => map_numeric(&args[0], "ABS", f64::abs),
        "-" if args.len() == 1 => map_numeric(&args[0], "-", |x| -x),
        "-" => difference(&args[0], &args[1]),
        "CORR" => {
            let (_, x, y) = aligned(&args[0], &args[1], "CORR")?;
            finite(stats::pearson(&nonempty(x)?, &y)?)
        }
        "KL" | "EMD" => {
            let x = nonempty(one(0)?)?;
            let y = nonempty(one(1)?)?;
            let (p, q, width) = stats::histograms(&x, &y, cfg.bins, cfg.epsilon);
            finite(if sig.name == "KL" { stats::kl(&p, &q) } else { stats::emd(&p, &q, width) })
        }
        "KS_normal" => finite(stats::ks_normal_pvalue(&nonempty(one(0)?)?)?),
        "fit_LM" => {
            let (_, x, y) = aligned(&args[0], &args[1], "fit_LM")?;
            let fit = stats::least_squares(&nonempty(x)?, &y)?;
            Ok(Value::Model(Model { kind: "linear", slope: fit.slope, intercept: fit.intercept, r_squared: fit.r_squared }))
        }
        "SRES" => {
            let Value::Model(m) = &args[0] else {
                return Err(FuncError::Kind(format!("SRES: model expected, got {}", args[0].kind_name())));
            };
            let (rows, x, y) = aligned(&args[1], &args[2], "SRES")?;
            let fit = stats::LinearFit { slope: m.slope, intercept: m.intercept, r_squared: m.r_squared };
            let r = stats::standardized_residuals(&fit, &nonempty(x)?, &y)?;
            Ok(Value::Vector(Vector {
                rows,
                values: r.into_iter().map(Scalar::Number).collect(),
                kind: AttrType::Number,
                computed: true,
            }))
        }
        "fit_Gaussian" => finite(stats::gaussian_loss(&one(0)?)?),
        "fit_Powerlaw" => finite(stats::powerlaw_loss(&one(0)?)?),
        "fit_Linear" => finite(stats::uniform_loss(&one(0)?)?),
        "fit_Kmeans" => finite(stats::kmeans_loss(&one(0)?, cfg.k)?),
        "fit_Hierarchical" => finite(stats::hierarchical_loss(&one(0)?, cfg.k)?),
        other => unreachable!("registered function `{other}` has no implementation"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(xs: &[f64]) -> Value {
        Value::Vector(Vector {
            rows: (0..xs.len()).collect(),
            values: xs.iter().map(|x| Scalar::Number(*x)).collect(),
            kind: AttrType::Number,
            computed: false,
        })
    }

    fn num(v: Value) -> f64 {
        match v {
            Value::Scalar { value: Scalar::Number(n), .. } => n,
            other => panic!("{other:?}"),
        }
    }

    fn run(name: &str, args: &[Value]) -> Result<Value, FuncError> {
        call(name, args, &CallContext { rows: 3, config: &FunctionConfig::default() })
    }

    #[test]
    fn lookup_is_case_insensitive_with_aliases() {
        assert_eq!(lookup("avg").unwrap().name, "AVG");
        assert_eq!(lookup("Corr").unwrap().name, "CORR");
        assert_eq!(lookup("KS").unwrap().name, "KS_normal");
        assert_eq!(lookup("fit").unwrap().name, "fit_LM");
        assert!(lookup("monotonic_corr").is_none());
        let mut names: Vec<String> = registry().iter().map(|f| f.name.to_ascii_lowercase()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), registry().len());
    }

    #[test]
    fn aggregates() {
        assert!((num(run("AVG", &[vector(&[8.6, 8.8])]).unwrap()) - 8.7).abs() < 1e-12);
        assert_eq!(num(run("MAX", &[vector(&[9.1, 8.7, 7.6])]).unwrap()), 9.1);
        assert_eq!(num(run("AVG", &[vector(&[4.5])]).unwrap()), 4.5);
        assert_eq!(run("AVG", &[vector(&[])]), Err(FuncError::EmptyOperand));
        assert_eq!(num(run("STDEV", &[vector(&[1.0, 3.0])]).unwrap()), 1.0);
        assert_eq!(num(run("count", &[]).unwrap()), 3.0);
    }

    #[test]
    fn sample_stdev_switch() {
        let cfg = FunctionConfig { stdev: StdevMode::Sample, ..FunctionConfig::default() };
        let v = call("STDEV", &[vector(&[1.0, 3.0])], &CallContext { rows: 0, config: &cfg }).unwrap();
        assert!((num(v) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn modulo_and_minus() {
        assert_eq!(num(run("mod", &[Value::number(7.0), Value::number(2.0)]).unwrap()), 1.0);
        assert_eq!(num(run("mod", &[Value::number(6.0), Value::number(2.0)]).unwrap()), 0.0);
        assert_eq!(num(run("mod", &[Value::number(-1.0), Value::number(2.0)]).unwrap()), 1.0);
        assert_eq!(run("mod", &[Value::number(1.0), Value::number(0.0)]), Err(FuncError::DivideByZero));
        let range = run("-", &[Value::number(150.0), Value::number(90.0)]).unwrap();
        assert_eq!(num(range), 60.0);
        assert_eq!(num(run("ABS", &[Value::number(-3.0)]).unwrap()), 3.0);
        assert_eq!(num(run("-", &[Value::number(2.5)]).unwrap()), -2.5);
    }

    #[test]
    fn elementwise_difference_needs_alignment() {
        let a = vector(&[1.0, 2.0]);
        let mut b = vector(&[0.5, 0.5]);
        match run("-", &[a.clone(), b.clone()]).unwrap() {
            Value::Vector(v) => assert_eq!(v.values, vec![Scalar::Number(0.5), Scalar::Number(1.5)]),
            other => panic!("{other:?}"),
        }
        if let Value::Vector(v) = &mut b {
            v.rows = vec![5, 6];
        }
        assert_eq!(run("-", &[a, b]), Err(FuncError::RowAlignment));
    }

    #[test]
    fn correlation() {
        let x = vector(&[1.0, 2.0, 4.0, 7.0]);
        let neg = vector(&[-1.0, -2.0, -4.0, -7.0]);
        assert!((num(run("CORR", &[x.clone(), x.clone()]).unwrap()) - 1.0).abs() < 1e-12);
        assert!((num(run("CORR", &[x.clone(), neg]).unwrap()) + 1.0).abs() < 1e-12);
        assert_eq!(run("CORR", &[x, vector(&[2.0, 2.0, 2.0, 2.0])]), Err(FuncError::DegenerateVariance));
    }

    #[test]
    fn distances_vanish_on_identical_inputs() {
        let x = vector(&[0.3, 1.5, 2.2, 9.0, 4.4]);
        assert_eq!(num(run("KL", &[x.clone(), x.clone()]).unwrap()), 0.0);
        assert_eq!(num(run("EMD", &[x.clone(), x]).unwrap()), 0.0);
    }

    #[test]
    fn small_samples_are_rejected() {
        assert!(matches!(run("KS_normal", &[vector(&[1.0, 2.0])]), Err(FuncError::Precondition(_))));
        assert_eq!(run("fit_Gaussian", &[vector(&[1.0, 1.0, 1.0])]), Err(FuncError::DegenerateVariance));
        assert!(matches!(run("fit_Powerlaw", &[vector(&[1.0, -1.0, 2.0])]), Err(FuncError::DomainError(_))));
    }

    #[test]
    fn config_files() {
        let dir = std::env::temp_dir().join(format!("hypogram-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let toml_path = dir.join("f.toml");
        std::fs::write(&toml_path, "bins = 4\nstdev = \"sample\"\n").unwrap();
        let cfg = FunctionConfig::load(&toml_path).unwrap();
        assert_eq!((cfg.bins, cfg.k, cfg.stdev), (4, 3, StdevMode::Sample));
        let json_path = dir.join("f.json");
        std::fs::write(&json_path, r#"{"k": 0}"#).unwrap();
        assert!(matches!(FunctionConfig::load(&json_path), Err(ConfigError::Invalid(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
