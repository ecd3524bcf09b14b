//! Single-table relational data: a schema, typed columns and a unique `id`.

use std::cmp::Ordering;
use std::fmt;

use chrono::{NaiveDate, NaiveDateTime};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{cmp_scalar, ConstValue, OpKind, Predicate, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrType {
    Number,
    String,
    Date,
    Boolean,
}

impl AttrType {
    pub fn name(self) -> &'static str {
        match self {
            AttrType::Number => "number",
            AttrType::String => "string",
            AttrType::Date => "date",
            AttrType::Boolean => "boolean",
        }
    }

    /// Kind of a scalar, as an attribute type.
    pub fn of(s: &Scalar) -> AttrType {
        match s {
            Scalar::Number(_) => AttrType::Number,
            Scalar::Str(_) => AttrType::String,
            Scalar::Date(_) => AttrType::Date,
            Scalar::Bool(_) => AttrType::Boolean,
        }
    }
}

impl fmt::Display for AttrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: AttrType,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("duplicate id {0}")]
    DuplicateId(f64),
    #[error("missing value in row {row}, attribute `{attr}`")]
    MissingValue { row: usize, attr: String },
    #[error("row {row}, attribute `{attr}`: cannot parse {text:?} as {ty}")]
    TypeParseError { row: usize, attr: String, ty: AttrType, text: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("invalid regular expression {pattern:?}: {message}")]
    InvalidRegex { pattern: String, message: String },
    #[error("predicate value for `{0}` is not a constant")]
    NonConstantValue(String),
    #[error("csv: {0}")]
    Csv(String),
}

/// Attribute names and types. Always contains a numeric `id`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schema {
    pub attrs: Vec<Attribute>,
}

impl Schema {
    pub fn new(attrs: Vec<Attribute>) -> Result<Schema, DataError> {
        for (i, a) in attrs.iter().enumerate() {
            if attrs[..i].iter().any(|b| b.name == a.name) {
                return Err(DataError::SchemaMismatch(format!("attribute `{}` declared twice", a.name)));
            }
        }
        match attrs.iter().find(|a| a.name == "id") {
            Some(a) if a.ty == AttrType::Number => Ok(Schema { attrs }),
            Some(a) => Err(DataError::SchemaMismatch(format!("`id` must be a number, declared {}", a.ty))),
            None => Err(DataError::SchemaMismatch("no `id` attribute".into())),
        }
    }

    /// Position of an attribute: exact name first, then a unique
    /// case-insensitive match.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.attrs.iter().position(|a| a.name == name) {
            return Some(i);
        }
        let mut hits = self.attrs.iter().enumerate().filter(|(_, a)| a.name.eq_ignore_ascii_case(name));
        match (hits.next(), hits.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    pub fn attr(&self, name: &str) -> Option<&Attribute> {
        self.index_of(name).map(|i| &self.attrs[i])
    }

    /// Every attribute except `id`, in declaration order.
    pub fn data_attrs(&self) -> impl Iterator<Item = &Attribute> {
        self.attrs.iter().filter(|a| a.name != "id")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Number(Vec<f64>),
    Str(Vec<String>),
    Date(Vec<NaiveDateTime>),
    Bool(Vec<bool>),
}

impl Column {
    fn empty(ty: AttrType) -> Column {
        match ty {
            AttrType::Number => Column::Number(Vec::new()),
            AttrType::String => Column::Str(Vec::new()),
            AttrType::Date => Column::Date(Vec::new()),
            AttrType::Boolean => Column::Bool(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Number(v) => v.len(),
            Column::Str(v) => v.len(),
            Column::Date(v) => v.len(),
            Column::Bool(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ty(&self) -> AttrType {
        match self {
            Column::Number(_) => AttrType::Number,
            Column::Str(_) => AttrType::String,
            Column::Date(_) => AttrType::Date,
            Column::Bool(_) => AttrType::Boolean,
        }
    }

    pub fn get(&self, row: usize) -> Scalar {
        match self {
            Column::Number(v) => Scalar::Number(v[row]),
            Column::Str(v) => Scalar::Str(v[row].clone()),
            Column::Date(v) => Scalar::Date(v[row]),
            Column::Bool(v) => Scalar::Bool(v[row]),
        }
    }

    fn push(&mut self, s: Scalar) {
        match (self, s) {
            (Column::Number(v), Scalar::Number(x)) => v.push(x),
            (Column::Str(v), Scalar::Str(x)) => v.push(x),
            (Column::Date(v), Scalar::Date(x)) => v.push(x),
            (Column::Bool(v), Scalar::Bool(x)) => v.push(x),
            _ => unreachable!("cells are parsed to the column type"),
        }
    }
}

/// An immutable relation. Rows are addressed by position; `id` holds the
/// user-visible row identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    schema: Schema,
    columns: Vec<Column>,
    rows: usize,
}

impl Table {
    pub fn new(schema: Schema, columns: Vec<Column>) -> Result<Table, DataError> {
        if columns.len() != schema.attrs.len() {
            return Err(DataError::SchemaMismatch(format!(
                "{} columns for {} attributes",
                columns.len(),
                schema.attrs.len()
            )));
        }
        let rows = columns.first().map_or(0, Column::len);
        for (a, c) in schema.attrs.iter().zip(&columns) {
            if c.ty() != a.ty {
                return Err(DataError::SchemaMismatch(format!("column `{}` holds {} values, declared {}", a.name, c.ty(), a.ty)));
            }
            if c.len() != rows {
                return Err(DataError::SchemaMismatch(format!("column `{}` has {} rows, expected {rows}", a.name, c.len())));
            }
        }
        let t = Table { schema, columns, rows };
        let mut ids: Vec<f64> = (0..rows).map(|r| t.id(r)).collect();
        ids.sort_by(f64::total_cmp);
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(DataError::DuplicateId(w[0]));
        }
        Ok(t)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn column(&self, idx: usize) -> &Column {
        &self.columns[idx]
    }

    pub fn column_by_name(&self, name: &str) -> Option<&Column> {
        self.schema.index_of(name).map(|i| &self.columns[i])
    }

    pub fn cell(&self, row: usize, col: usize) -> Scalar {
        self.columns[col].get(row)
    }

    pub fn id(&self, row: usize) -> f64 {
        let idx = self.schema.index_of("id").expect("schema has id");
        match &self.columns[idx] {
            Column::Number(v) => v[row],
            _ => unreachable!("id is numeric"),
        }
    }

    pub fn all_rows(&self) -> RowMask {
        RowMask((0..self.rows).collect())
    }

    /// Distinct values of a column in ascending order.
    pub fn distinct(&self, col: usize) -> Vec<Scalar> {
        let mut vals: Vec<Scalar> = (0..self.rows).map(|r| self.cell(r, col)).collect();
        vals.sort_by(|a, b| cmp_scalar(a, b).unwrap_or(Ordering::Equal));
        vals.dedup();
        vals
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.schema.attrs.iter().map(|a| a.name.as_str())).expect("in-memory write");
        for r in 0..self.rows {
            let rec: Vec<String> = (0..self.columns.len())
                .map(|c| match self.cell(r, c) {
                    Scalar::Number(n) => format!("{n}"),
                    Scalar::Str(s) => s,
                    Scalar::Date(d) => d.format("%Y-%m-%d %H:%M:%S").to_string(),
                    Scalar::Bool(b) => b.to_string(),
                })
                .collect();
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Schema sidecar for a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SchemaFile {
    pub attrs: Vec<Attribute>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_format: Option<String>,
    #[serde(default)]
    pub synthesize_id: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub drop_incomplete_rows: bool,
}

/// Load a CSV table described by a JSON schema sidecar.
pub fn load_csv(csv_text: &str, schema_json: &str) -> Result<Table, DataError> {
    let schema: SchemaFile = serde_json::from_str(schema_json)
        .map_err(|e| DataError::SchemaMismatch(format!("schema sidecar: {e}")))?;
    load_csv_with(csv_text, &schema, LoadOptions::default())
}

pub fn load_csv_with(csv_text: &str, sidecar: &SchemaFile, opts: LoadOptions) -> Result<Table, DataError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let mut attrs = Vec::new();
    if sidecar.synthesize_id {
        if header.iter().any(|h| h == "id") {
            return Err(DataError::SchemaMismatch("`synthesize_id` is set but the CSV has an `id` column".into()));
        }
        attrs.push(Attribute { name: "id".into(), ty: AttrType::Number });
    }
    for h in &header {
        match sidecar.attrs.iter().find(|a| &a.name == h) {
            Some(a) => attrs.push(a.clone()),
            None if h == "id" => attrs.push(Attribute { name: "id".into(), ty: AttrType::Number }),
            None => return Err(DataError::SchemaMismatch(format!("column `{h}` has no declared type"))),
        }
    }
    for a in &sidecar.attrs {
        let synthesized = sidecar.synthesize_id && a.name == "id";
        if !synthesized && !header.contains(&a.name) {
            return Err(DataError::SchemaMismatch(format!("declared attribute `{}` is not a CSV column", a.name)));
        }
    }
    let schema = Schema::new(attrs)?;
    let offset = usize::from(sidecar.synthesize_id);
    let mut columns: Vec<Column> = schema.attrs.iter().map(|a| Column::empty(a.ty)).collect();

    let mut kept = 0usize;
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| DataError::Csv(e.to_string()))?;
        let row = line + 1;
        if rec.len() != header.len() {
            return Err(DataError::SchemaMismatch(format!("row {row} has {} fields, header has {}", rec.len(), header.len())));
        }
        if rec.iter().any(|f| f.trim().is_empty()) {
            if opts.drop_incomplete_rows {
                continue;
            }
            let col = rec.iter().position(|f| f.trim().is_empty()).expect("found above");
            return Err(DataError::MissingValue { row, attr: header[col].clone() });
        }
        let mut cells = Vec::with_capacity(schema.attrs.len());
        if sidecar.synthesize_id {
            cells.push(Scalar::Number((kept + 1) as f64));
        }
        for (i, field) in rec.iter().enumerate() {
            let attr = &schema.attrs[i + offset];
            let cell = parse_cell(field.trim(), attr.ty, sidecar.date_format.as_deref()).ok_or_else(|| {
                DataError::TypeParseError { row, attr: attr.name.clone(), ty: attr.ty, text: field.to_string() }
            })?;
            cells.push(cell);
        }
        for (c, cell) in columns.iter_mut().zip(cells) {
            c.push(cell);
        }
        kept += 1;
    }
    Table::new(schema, columns)
}

fn parse_cell(text: &str, ty: AttrType, date_format: Option<&str>) -> Option<Scalar> {
    match ty {
        AttrType::Number => text.parse::<f64>().ok().filter(|n| n.is_finite()).map(Scalar::Number),
        AttrType::String => Some(Scalar::Str(text.to_string())),
        AttrType::Boolean => match text.to_ascii_lowercase().as_str() {
            "true" | "t" | "yes" | "1" => Some(Scalar::Bool(true)),
            "false" | "f" | "no" | "0" => Some(Scalar::Bool(false)),
            _ => None,
        },
        AttrType::Date => parse_date(text, date_format).map(Scalar::Date),
    }
}

fn parse_date(text: &str, format: Option<&str>) -> Option<NaiveDateTime> {
    let formats: &[&str] = match format {
        Some(f) => &[f],
        None => &["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d"],
    };
    for f in formats {
        if let Ok(d) = NaiveDateTime::parse_from_str(text, f) {
            return Some(d);
        }
        if let Ok(d) = NaiveDate::parse_from_str(text, f) {
            return d.and_hms_opt(0, 0, 0);
        }
    }
    None
}

/// Row positions selected from a table, ascending and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RowMask(pub Vec<usize>);

impl RowMask {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rows(&self) -> &[usize] {
        &self.0
    }

    pub fn intersect(&self, other: &RowMask) -> RowMask {
        let (mut i, mut j, mut out) = (0, 0, Vec::new());
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        RowMask(out)
    }

    pub fn is_subset(&self, other: &RowMask) -> bool {
        self.intersect(other).len() == self.len()
    }

    /// The table ids of the selected rows.
    pub fn ids(&self, t: &Table) -> Vec<f64> {
        self.0.iter().map(|&r| t.id(r)).collect()
    }
}

/// A predicate conjunct whose value has already been computed.
#[derive(Debug, Clone)]
pub struct Condition {
    pub negated: bool,
    pub attr: String,
    pub op: OpKind,
    pub value: ConstValue,
    /// Compare with a relative tolerance (value came from a computation).
    pub tolerant: bool,
}

/// Rows of `base` satisfying every conjunct of `p`. Conjunct values must be
/// constants; computed values go through [`filter`].
pub fn eval_predicate(t: &Table, p: &Predicate, base: &RowMask) -> Result<RowMask, DataError> {
    let conds = p
        .conjuncts
        .iter()
        .map(|c| match &c.value.kind {
            crate::ast::ExprKind::Const(v) => Ok(Condition {
                negated: c.negated,
                attr: c.attr.clone(),
                op: c.op,
                value: v.clone(),
                tolerant: false,
            }),
            _ => Err(DataError::NonConstantValue(c.attr.clone())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    filter(t, &conds, base)
}

pub fn filter(t: &Table, conds: &[Condition], base: &RowMask) -> Result<RowMask, DataError> {
    let mut mask = base.clone();
    for c in conds {
        let col = t.schema().index_of(&c.attr).ok_or_else(|| DataError::UnknownAttribute(c.attr.clone()))?;
        let test = CompiledTest::new(c.op, &c.value, t.schema().attrs[col].ty, c.tolerant)?;
        let mut keep = Vec::with_capacity(mask.len());
        for &r in mask.rows() {
            if test.holds(&t.cell(r, col)) != c.negated {
                keep.push(r);
            }
        }
        mask = RowMask(keep);
    }
    Ok(mask)
}

/// Relative tolerance used whenever a computed number takes part in `=`.
pub const TOLERANCE: f64 = 1e-9;

pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * 1f64.max(a.abs()).max(b.abs())
}

/// A comparison against a fixed right-hand side, checked for type
/// compatibility once and then applied to many cells.
#[derive(Debug, Clone)]
pub struct CompiledTest {
    op: OpKind,
    rhs: Rhs,
    tolerant: bool,
}

#[derive(Debug, Clone)]
enum Rhs {
    Scalar(Scalar),
    Regex(Regex),
    Interval(crate::ast::Interval),
    Array(Vec<Scalar>),
}

impl CompiledTest {
    pub fn new(op: OpKind, rhs: &ConstValue, lhs_ty: AttrType, tolerant: bool) -> Result<CompiledTest, DataError> {
        let mismatch = |what: String| Err(DataError::TypeMismatch(what));
        let rhs = match (op, rhs) {
            (OpKind::RegexMatch, ConstValue::Scalar(Scalar::Str(p))) => {
                if lhs_ty != AttrType::String {
                    return mismatch(format!("`~` needs a string operand, got {lhs_ty}"));
                }
                Rhs::Regex(Regex::new(p).map_err(|e| DataError::InvalidRegex {
                    pattern: p.clone(),
                    message: e.to_string(),
                })?)
            }
            (OpKind::RegexMatch, other) => return mismatch(format!("`~` needs a string pattern, got {}", const_kind(other))),
            (OpKind::In | OpKind::NotIn, ConstValue::Interval(iv)) => {
                if AttrType::of(&iv.lo) != lhs_ty {
                    return mismatch(format!("interval of {} tested against {lhs_ty}", AttrType::of(&iv.lo)));
                }
                Rhs::Interval(iv.clone())
            }
            (OpKind::In | OpKind::NotIn, ConstValue::Array(items)) => {
                if items.first().is_some_and(|s| AttrType::of(s) != lhs_ty) {
                    return mismatch(format!("array of {} tested against {lhs_ty}", AttrType::of(&items[0])));
                }
                Rhs::Array(items.clone())
            }
            (OpKind::In | OpKind::NotIn, ConstValue::Scalar(s)) => {
                return mismatch(format!("`{op}` needs an interval or array, got {}", s.kind_name()))
            }
            (_, ConstValue::Scalar(s)) => {
                if AttrType::of(s) != lhs_ty {
                    return mismatch(format!("{lhs_ty} compared with {}", s.kind_name()));
                }
                if lhs_ty == AttrType::Boolean && op.is_ordering() {
                    return mismatch(format!("`{op}` does not order booleans"));
                }
                Rhs::Scalar(s.clone())
            }
            (_, other) => return mismatch(format!("`{op}` cannot compare with {}", const_kind(other))),
        };
        Ok(CompiledTest { op, rhs, tolerant })
    }

    pub fn holds(&self, cell: &Scalar) -> bool {
        match &self.rhs {
            Rhs::Regex(re) => matches!(cell, Scalar::Str(s) if re.is_match(s)),
            Rhs::Interval(iv) => iv.contains(cell) == (self.op == OpKind::In),
            Rhs::Array(items) => {
                let found = items.iter().any(|i| scalar_eq(cell, i, self.tolerant));
                found == (self.op == OpKind::In)
            }
            Rhs::Scalar(s) => compare_scalars(self.op, cell, s, self.tolerant),
        }
    }
}

fn const_kind(c: &ConstValue) -> &'static str {
    match c {
        ConstValue::Scalar(s) => s.kind_name(),
        ConstValue::Array(_) => "array",
        ConstValue::Interval(_) => "interval",
    }
}

pub fn scalar_eq(a: &Scalar, b: &Scalar, tolerant: bool) -> bool {
    match (a, b) {
        (Scalar::Number(x), Scalar::Number(y)) if tolerant => approx_eq(*x, *y),
        _ => a == b,
    }
}

/// Ordering comparison of two scalars of one kind. Mixed kinds are false.
pub fn compare_scalars(op: OpKind, a: &Scalar, b: &Scalar, tolerant: bool) -> bool {
    match op {
        OpKind::Eq => scalar_eq(a, b, tolerant),
        OpKind::Neq => a.same_kind(b) && !scalar_eq(a, b, tolerant),
        OpKind::Lt | OpKind::Le | OpKind::Gt | OpKind::Ge => {
            if tolerant && scalar_eq(a, b, true) {
                return matches!(op, OpKind::Le | OpKind::Ge);
            }
            match cmp_scalar(a, b) {
                Some(o) => match op {
                    OpKind::Lt => o.is_lt(),
                    OpKind::Le => o.is_le(),
                    OpKind::Gt => o.is_gt(),
                    _ => o.is_ge(),
                },
                None => false,
            }
        }
        OpKind::RegexMatch | OpKind::In | OpKind::NotIn => false,
    }
}
