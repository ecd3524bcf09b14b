//! Binding a grammar to a dataset.

use std::collections::BTreeMap;

use super::grammar::{base_name, is_copy, Alternative, GrammarSpec, Provenance, Symbol};
use super::SpaceError;
use crate::ast::{cmp_scalar, OpKind, Scalar};
use crate::dataset::{AttrType, Table};
use crate::funcs;
use crate::parser::lexer::TokenKind;

#[derive(Debug, Clone)]
pub struct GroundOptions {
    /// Replace observed numeric values with this many evenly spaced edges.
    pub bins: Option<usize>,
    /// Operators an `op` rule may use.
    pub operators: Vec<OpKind>,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { bins: None, operators: OpKind::ALL.to_vec() }
    }
}

pub fn ground(g: &GrammarSpec, t: &Table) -> Result<GrammarSpec, SpaceError> {
    ground_with(g, t, &GroundOptions::default())
}

fn term(tokens: Vec<TokenKind>) -> Alternative {
    Alternative::new(vec![Symbol::terminal(tokens)])
}

fn single_token(alt: &Alternative) -> Option<&TokenKind> {
    match alt.symbols.as_slice() {
        [Symbol::Terminal { tokens, .. }] if tokens.len() == 1 => Some(&tokens[0]),
        _ => None,
    }
}

fn is_builtin(alt: &Alternative) -> bool {
    matches!(alt.symbols.as_slice(), [Symbol::Builtin(_)])
}

pub fn ground_with(g: &GrammarSpec, t: &Table, opts: &GroundOptions) -> Result<GrammarSpec, SpaceError> {
    let attrs: Vec<String> = t.schema().data_attrs().map(|a| a.name.clone()).collect();
    if attrs.is_empty() {
        return Err(SpaceError::EmptyTable);
    }
    let compared = compared_attributes(g, t);
    let mut out = g.clone();
    for (name, alts) in out.rules.iter_mut() {
        let base = base_name(name);
        let mut next = Vec::with_capacity(alts.len());
        if let Some(cols) = compared.get(name.as_str()) {
            let values = domain(t, cols, opts.bins);
            let observed = |tok: &TokenKind| values.iter().any(|v| TokenKind::from_scalar(v).matches(tok));
            let mut added = false;
            for alt in alts.iter() {
                if is_builtin(alt) {
                    if !added {
                        next.extend(values.iter().map(|v| term(vec![TokenKind::from_scalar(v)])));
                        added = true;
                    }
                } else if let Some(tok) = single_token(alt).filter(|t| is_scalar_token(t)) {
                    if observed(tok) {
                        next.push(alt.clone());
                    }
                } else {
                    next.push(alt.clone());
                }
            }
        } else if base == "attr" {
            let mut added = false;
            for alt in alts.iter() {
                if is_builtin(alt) {
                    if !added {
                        next.extend(attrs.iter().map(|a| term(vec![TokenKind::Ident(a.clone())])));
                        added = true;
                    }
                } else if let Some(tok) = single_token(alt) {
                    let name = match tok {
                        TokenKind::Ident(s) | TokenKind::Str(s) => Some(s),
                        _ => None,
                    };
                    if name.is_some_and(|n| t.schema().index_of(n).is_some()) {
                        next.push(alt.clone());
                    }
                } else {
                    next.push(alt.clone());
                }
            }
        } else if base == "func" {
            let mut added = false;
            for alt in alts.iter() {
                if is_builtin(alt) {
                    if !added {
                        for f in funcs::registry() {
                            next.push(term(vec![TokenKind::Ident(f.name.to_string())]));
                            next.extend(f.aliases.iter().map(|a| term(vec![TokenKind::Ident(a.to_string())])));
                        }
                        added = true;
                    }
                } else if let Some(TokenKind::Ident(f)) = single_token(alt) {
                    if funcs::lookup(f).is_some() {
                        next.push(alt.clone());
                    }
                } else {
                    next.push(alt.clone());
                }
            }
        } else if base == "op" {
            let mut added = false;
            for alt in alts.iter() {
                if is_builtin(alt) {
                    if !added {
                        next.extend(opts.operators.iter().map(|op| term(vec![TokenKind::Op(*op)])));
                        added = true;
                    }
                } else if let Some(TokenKind::Op(op)) = single_token(alt) {
                    if opts.operators.contains(op) {
                        next.push(alt.clone());
                    }
                } else {
                    next.push(alt.clone());
                }
            }
        } else {
            continue;
        }
        *alts = next;
    }
    if matches!(out.provenance, Provenance::H | Provenance::Custom) {
        out.provenance = Provenance::HD;
    }
    Ok(out)
}

fn is_scalar_token(t: &TokenKind) -> bool {
    matches!(t, TokenKind::Number(_) | TokenKind::Str(_) | TokenKind::Date(_) | TokenKind::Bool(_))
}

/// Sorted values a copy may take: the distinct values shared by every
/// attribute it is compared with, or bin edges for numbers.
fn domain(t: &Table, cols: &[usize], bins: Option<usize>) -> Vec<Scalar> {
    let mut values: Option<Vec<Scalar>> = None;
    for &c in cols {
        let d = t.distinct(c);
        values = Some(match values {
            None => d,
            Some(v) => v.into_iter().filter(|x| d.contains(x)).collect(),
        });
    }
    let values = values.unwrap_or_default();
    match bins {
        Some(b) if b > 0 && cols.iter().all(|&c| t.column(c).ty() == AttrType::Number) && !values.is_empty() => {
            let nums: Vec<f64> = values.iter().filter_map(Scalar::as_number).collect();
            let (lo, hi) = (nums[0], nums[nums.len() - 1]);
            let mut edges: Vec<Scalar> = if b == 1 || lo == hi {
                vec![Scalar::Number(lo)]
            } else {
                (0..b).map(|i| Scalar::Number(lo + (hi - lo) * i as f64 / (b - 1) as f64)).collect()
            };
            edges.sort_by(|a, b| cmp_scalar(a, b).unwrap_or(std::cmp::Ordering::Equal));
            edges.dedup();
            edges
        }
        _ => values,
    }
}

/// Copies that appear right after `attr op` or right before `op attr` in a
/// terminal, keyed by copy name with the compared column indices.
fn compared_attributes(g: &GrammarSpec, t: &Table) -> BTreeMap<String, Vec<usize>> {
    let mut out: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut note = |copy: &str, attr: &str| {
        if let Some(i) = t.schema().index_of(attr) {
            let v = out.entry(copy.to_string()).or_default();
            if !v.contains(&i) {
                v.push(i);
            }
        }
    };
    fn visit(syms: &[Symbol], note: &mut dyn FnMut(&str, &str)) {
        for (i, s) in syms.iter().enumerate() {
            match s {
                Symbol::NonTerminal(n) if is_copy(n) => {
                    if let Some(Symbol::Terminal { tokens, .. }) = i.checked_sub(1).map(|j| &syms[j]) {
                        if let [.., TokenKind::Ident(a), TokenKind::Op(_)] = tokens.as_slice() {
                            note(n, a);
                        }
                    }
                    if let Some(Symbol::Terminal { tokens, .. }) = syms.get(i + 1) {
                        if let [TokenKind::Op(_), TokenKind::Ident(a), ..] = tokens.as_slice() {
                            note(n, a);
                        }
                    }
                }
                Symbol::Group { alternatives, .. } => {
                    for a in alternatives {
                        visit(&a.symbols, note);
                    }
                }
                _ => {}
            }
        }
    }
    for alts in g.rules.values() {
        for alt in alts {
            visit(&alt.symbols, &mut note);
        }
    }
    out.retain(|name, _| g.rules.contains_key(name));
    out
}
