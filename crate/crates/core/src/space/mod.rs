//! Grammars as hypothesis spaces.
//!
//! A grammar's language is the set of hypotheses it can derive. Every
//! occurrence of one copy (`const1`) inside a sentence derives the same
//! text, so copies tie parts of a hypothesis together.
//!
//! Sizes count derivations. For grammars in which no sentence has two
//! derivations, which is every grammar written to describe a space, this
//! is the number of distinct hypotheses.

mod count;
mod enumerate;
pub mod grammar;
mod ground;
mod member;

use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::Serializer;
use serde::Serialize;
use thiserror::Error;

use crate::ast::Hypothesis;
use crate::dataset::Table;
use crate::evaluator::typecheck;
use crate::parser::lexer::{render_tokens, tokenize, TokenKind};
use crate::parser::{parse_grammar, parse_hypothesis_tokens, ParseError};

pub use grammar::{Alternative, Builtin, GrammarSpec, Provenance, Repeat, Symbol};
pub use ground::{ground, ground_with, GroundOptions};

/// Largest space enumerated by default.
pub const DEFAULT_LIMIT: usize = 100_000;
/// Default bound on how often one nonterminal may nest inside itself.
pub const DEFAULT_DEPTH: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceSize {
    Exact(BigUint),
    /// Names of the builtins, recursive rules and repetitions that make the
    /// space infinite.
    Unbounded(Vec<String>),
}

impl SpaceSize {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            SpaceSize::Exact(n) => Some(n),
            SpaceSize::Unbounded(_) => None,
        }
    }
}

impl fmt::Display for SpaceSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSize::Exact(n) => write!(f, "{n}"),
            SpaceSize::Unbounded(items) => write!(f, "unbounded ({})", items.join(", ")),
        }
    }
}

impl Serialize for SpaceSize {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SpaceSize::Exact(n) => match n.to_u64() {
                Some(v) => s.serialize_u64(v),
                None => s.serialize_str(&n.to_string()),
            },
            SpaceSize::Unbounded(_) => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("space has {size} sentences, above the limit of {limit}")]
    TooLarge { size: BigUint, limit: usize },
    #[error("space is unbounded: {}", .0.join(", "))]
    Unbounded(Vec<String>),
    #[error("sentence `{sentence}` is not a hypothesis: {error}")]
    NotAHypothesis { sentence: String, error: ParseError },
    #[error("grammar uses {0} copies; at most 64 are supported")]
    TooManyCopies(usize),
    #[error("table has no attributes besides id")]
    EmptyTable,
}

/// The unrestricted grammar of all hypotheses.
pub fn base_grammar() -> GrammarSpec {
    static BASE: OnceLock<GrammarSpec> = OnceLock::new();
    BASE.get_or_init(|| parse_grammar(include_str!("base.hg")).expect("base grammar parses")).clone()
}

/// Number of sentences, or why there are infinitely many.
pub fn size(g: &GrammarSpec) -> SpaceSize {
    let items = count::unbounded_items(g, false);
    if !items.is_empty() {
        return SpaceSize::Unbounded(items);
    }
    finite_count(g, 1)
}

/// Number of sentences when no nonterminal nests more than `depth` times
/// within itself and repetitions run at most `depth` times.
pub fn bounded_size(g: &GrammarSpec, depth: u8) -> SpaceSize {
    let items = count::unbounded_items(g, true);
    if !items.is_empty() {
        return SpaceSize::Unbounded(items);
    }
    finite_count(g, depth)
}

fn finite_count(g: &GrammarSpec, depth: u8) -> SpaceSize {
    match count::Counter::new(g, depth) {
        Ok(mut c) => SpaceSize::Exact(c.total()),
        Err(SpaceError::TooManyCopies(n)) => SpaceSize::Unbounded(vec![format!("{n} copies")]),
        Err(_) => unreachable!("only copy overflow is reported"),
    }
}

fn checked_size(g: &GrammarSpec, depth: u8, limit: usize) -> Result<BigUint, SpaceError> {
    match bounded_size(g, depth) {
        SpaceSize::Unbounded(items) => Err(SpaceError::Unbounded(items)),
        SpaceSize::Exact(n) if n > BigUint::from(limit) => Err(SpaceError::TooLarge { size: n, limit }),
        SpaceSize::Exact(n) => Ok(n),
    }
}

/// Every sentence as tokens, in alternative-index order.
pub fn enumerate_tokens(g: &GrammarSpec, limit: usize, depth: u8) -> Result<Vec<Vec<TokenKind>>, SpaceError> {
    checked_size(g, depth, limit)?;
    let mut out = Vec::new();
    let mut emit = |toks: &[TokenKind]| {
        out.push(toks.to_vec());
        ControlFlow::Continue(())
    };
    enumerate::Walker::new(g, depth, &mut emit).run();
    Ok(out)
}

/// Canonical hypothesis text when the sentence parses as one, otherwise
/// the tokens joined with canonical spacing.
pub fn sentence_text(toks: &[TokenKind]) -> String {
    match to_hypothesis(toks) {
        Ok(h) => h.to_string(),
        Err(_) => render_tokens(toks),
    }
}

/// Every sentence as text.
pub fn enumerate_sentences(g: &GrammarSpec, limit: usize, depth: u8) -> Result<Vec<String>, SpaceError> {
    Ok(enumerate_tokens(g, limit, depth)?.iter().map(|t| sentence_text(t)).collect())
}

fn to_hypothesis(toks: &[TokenKind]) -> Result<Hypothesis, SpaceError> {
    let text = render_tokens(toks);
    // re-lex the rendering so spans point into the text
    let tokens = tokenize(&text).map_err(|error| SpaceError::NotAHypothesis { sentence: text.clone(), error })?;
    parse_hypothesis_tokens(&tokens).map_err(|error| SpaceError::NotAHypothesis { sentence: text, error })
}

/// Every sentence parsed as a hypothesis.
pub fn enumerate(g: &GrammarSpec, limit: usize) -> Result<Vec<Hypothesis>, SpaceError> {
    enumerate_with_depth(g, limit, DEFAULT_DEPTH)
}

pub fn enumerate_with_depth(g: &GrammarSpec, limit: usize, depth: u8) -> Result<Vec<Hypothesis>, SpaceError> {
    enumerate_tokens(g, limit, depth)?.iter().map(|t| to_hypothesis(t)).collect()
}

/// Up to `k` distinct sentences drawn uniformly without replacement.
pub fn sample_tokens(g: &GrammarSpec, k: usize, seed: u64, depth: u8) -> Result<Vec<Vec<TokenKind>>, SpaceError> {
    let items = count::unbounded_items(g, true);
    if !items.is_empty() {
        return Err(SpaceError::Unbounded(items));
    }
    let mut counter = count::Counter::new(g, depth)?;
    let n = counter.total();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranks = distinct_ranks(&n, k, &mut rng);
    Ok(ranks.into_iter().map(|r| counter.unrank(r)).collect())
}

pub fn sample_sentences(g: &GrammarSpec, k: usize, seed: u64, depth: u8) -> Result<Vec<String>, SpaceError> {
    Ok(sample_tokens(g, k, seed, depth)?.iter().map(|t| sentence_text(t)).collect())
}

pub fn sample(g: &GrammarSpec, k: usize, seed: u64) -> Result<Vec<Hypothesis>, SpaceError> {
    sample_tokens(g, k, seed, DEFAULT_DEPTH)?.iter().map(|t| to_hypothesis(t)).collect()
}

/// Threshold under which ranks come from a partial shuffle of `0..n`.
const SHUFFLE_MAX: u64 = 1 << 20;

fn distinct_ranks(n: &BigUint, k: usize, rng: &mut ChaCha8Rng) -> Vec<BigUint> {
    if n.is_zero() || k == 0 {
        return Vec::new();
    }
    if let Some(small) = n.to_u64().filter(|&v| v <= SHUFFLE_MAX) {
        let mut pool: Vec<u64> = (0..small).collect();
        let take = k.min(pool.len());
        for i in 0..take {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        return pool[..take].iter().map(|&r| BigUint::from(r)).collect();
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let r = uniform_below(n, rng);
        if seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out
}

/// A uniform integer in `0..n` by rejection on random bytes.
fn uniform_below(n: &BigUint, rng: &mut ChaCha8Rng) -> BigUint {
    let bits = n.bits();
    let len = bits.div_ceil(8) as usize;
    let spare = (len as u64) * 8 - bits;
    let mut buf = vec![0u8; len];
    loop {
        rng.fill(buf.as_mut_slice());
        // big-endian: the spare high bits sit in the first byte
        buf[0] &= 0xff >> spare;
        let r = BigUint::from_bytes_be(&buf);
        if &r < n {
            return r;
        }
    }
}

/// Whether `g` derives the token sequence.
pub fn member_tokens(g: &GrammarSpec, toks: &[TokenKind]) -> bool {
    member::recognizes(g, toks)
}

/// Whether `g` derives `text`. With a table, the text must also parse as a
/// hypothesis that type-checks against it.
pub fn member_text(g: &GrammarSpec, text: &str, t: Option<&Table>) -> bool {
    let Ok(tokens) = tokenize(text) else {
        return false;
    };
    let kinds: Vec<TokenKind> = tokens.iter().map(|t| t.kind.clone()).collect();
    if !member::recognizes(g, &kinds) {
        return false;
    }
    match t {
        None => true,
        Some(t) => parse_hypothesis_tokens(&tokens).is_ok_and(|h| typecheck(&h, t).ok),
    }
}

/// Membership of a parsed hypothesis, through its canonical text.
pub fn member(g: &GrammarSpec, h: &Hypothesis, t: Option<&Table>) -> bool {
    member_text(g, &h.to_string(), t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Containment {
    /// Whether every sentence of the left grammar is in the right one.
    pub subset: bool,
    pub left: SpaceSize,
    pub right: SpaceSize,
    /// The reverse inclusion, when the right side is small enough to check.
    pub superset: Option<bool>,
    pub counterexample: Option<String>,
}

impl Containment {
    pub fn equal(&self) -> Option<bool> {
        self.superset.map(|s| s && self.subset)
    }
}

/// Is `g1 ⊆ g2`? `g1` must be finite; `g2` may be infinite.
pub fn contains(g1: &GrammarSpec, g2: &GrammarSpec, limit: usize) -> Result<Containment, SpaceError> {
    let n = checked_exact(g1, limit)?;
    let left = enumerate_tokens(g1, limit, 1)?;
    let missing = left.iter().find(|s| !member::recognizes(g2, s));
    let right = size(g2);
    let superset = match &right {
        SpaceSize::Exact(m) if *m <= BigUint::from(limit) => {
            let r = enumerate_tokens(g2, limit, 1)?;
            Some(r.iter().all(|s| member::recognizes(g1, s)))
        }
        _ => None,
    };
    Ok(Containment {
        subset: missing.is_none(),
        left: SpaceSize::Exact(n),
        right,
        superset,
        counterexample: missing.map(|s| sentence_text(s)),
    })
}

fn checked_exact(g: &GrammarSpec, limit: usize) -> Result<BigUint, SpaceError> {
    match size(g) {
        SpaceSize::Unbounded(items) => Err(SpaceError::Unbounded(items)),
        SpaceSize::Exact(n) if n > BigUint::from(limit) => Err(SpaceError::TooLarge { size: n, limit }),
        SpaceSize::Exact(n) => Ok(n),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Intersection {
    pub card_left: SpaceSize,
    pub card_right: SpaceSize,
    pub card_intersection: usize,
    pub sentences: Vec<String>,
}

/// Sentences in both grammars, found by enumerating the smaller finite one.
pub fn intersect(g1: &GrammarSpec, g2: &GrammarSpec, limit: usize) -> Result<Intersection, SpaceError> {
    let (s1, s2) = (size(g1), size(g2));
    let fits = |s: &SpaceSize| s.exact().filter(|n| **n <= BigUint::from(limit)).cloned();
    let (finite, other) = match (fits(&s1), fits(&s2)) {
        (Some(a), Some(b)) => {
            if a <= b {
                (g1, g2)
            } else {
                (g2, g1)
            }
        }
        (Some(_), None) => (g1, g2),
        (None, Some(_)) => (g2, g1),
        (None, None) => {
            return Err(match (&s1, &s2) {
                (SpaceSize::Unbounded(a), SpaceSize::Unbounded(_)) => SpaceError::Unbounded(a.clone()),
                (SpaceSize::Exact(n), _) | (_, SpaceSize::Exact(n)) => SpaceError::TooLarge { size: n.clone(), limit },
            })
        }
    };
    let mut seen = HashSet::new();
    let mut sentences = Vec::new();
    for toks in enumerate_tokens(finite, limit, 1)? {
        if member::recognizes(other, &toks) {
            let text = sentence_text(&toks);
            if seen.insert(text.clone()) {
                sentences.push(text);
            }
        }
    }
    Ok(Intersection { card_left: s1, card_right: s2, card_intersection: sentences.len(), sentences })
}
