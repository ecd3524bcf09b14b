//! Sentence counting and unranking.
//!
//! A sentence is a skeleton, in which every copy occurrence is a leaf, plus
//! one expansion per copy the sentence uses. Counts are therefore kept per
//! set of copies used (a bitmask), and [`Counter::join`] multiplies in the
//! number of ways to bind the copies still pending.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::grammar::{is_copy, GrammarSpec, Repeat, Symbol};
use super::SpaceError;
use crate::parser::lexer::TokenKind;

pub(crate) type Set = u64;
pub(crate) type CountMap = BTreeMap<Set, BigUint>;

/// Stack occurrences per non-copy nonterminal.
type State = Vec<u8>;

fn unit() -> CountMap {
    BTreeMap::from([(0, BigUint::one())])
}

fn add_into(acc: &mut CountMap, m: &CountMap) {
    for (k, v) in m {
        *acc.entry(*k).or_default() += v;
    }
}

fn conv(a: &CountMap, b: &CountMap) -> CountMap {
    let mut out = CountMap::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            *out.entry(ka | kb).or_default() += va * vb;
        }
    }
    out
}

/// Why a grammar has no finite sentence count. Items are sorted names.
pub(crate) fn unbounded_items(g: &GrammarSpec, allow_recursion: bool) -> Vec<String> {
    let reach = reachable(g);
    let mut items = BTreeSet::new();
    for name in &reach {
        for alt in g.alternatives(name) {
            scan(&alt.symbols, &mut |s| match s {
                Symbol::Builtin(b) => {
                    items.insert(b.name().to_string());
                }
                Symbol::Group { repeat: Repeat::ZeroOrMore | Repeat::OneOrMore, .. } if !allow_recursion => {
                    items.insert(name.clone());
                }
                _ => {}
            });
        }
    }
    let copy_cycles = cyclic(g, &reach, true);
    items.extend(copy_cycles);
    if !allow_recursion {
        items.extend(cyclic(g, &reach, false));
    }
    items.into_iter().collect()
}

fn scan(syms: &[Symbol], f: &mut dyn FnMut(&Symbol)) {
    for s in syms {
        f(s);
        if let Symbol::Group { alternatives, .. } = s {
            for a in alternatives {
                scan(&a.symbols, f);
            }
        }
    }
}

fn refs(g: &GrammarSpec, name: &str) -> Vec<String> {
    let mut out = Vec::new();
    for alt in g.alternatives(name) {
        scan(&alt.symbols, &mut |s| {
            if let Symbol::NonTerminal(n) = s {
                out.push(n.clone());
            }
        });
    }
    out
}

fn reachable(g: &GrammarSpec) -> Vec<String> {
    let mut seen = vec![g.start.clone()];
    let mut i = 0;
    while i < seen.len() {
        for n in refs(g, &seen[i].clone()) {
            if !seen.contains(&n) {
                seen.push(n);
            }
        }
        i += 1;
    }
    seen
}

/// Nonterminals lying on a cycle. With `copies` set, only copies count as
/// nodes and plain nonterminals are walked through, since a copy expanding
/// into itself has no finite binding.
fn cyclic(g: &GrammarSpec, reach: &[String], copies: bool) -> Vec<String> {
    let nodes: Vec<&String> = reach.iter().filter(|n| !copies || is_copy(n)).collect();
    let succ = |n: &str| -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = refs(g, n);
        let mut seen = BTreeSet::new();
        while let Some(m) = stack.pop() {
            if !seen.insert(m.clone()) {
                continue;
            }
            if !copies || is_copy(&m) {
                out.insert(m);
            } else {
                stack.extend(refs(g, &m));
            }
        }
        out
    };
    let edges: HashMap<&str, BTreeSet<String>> = nodes.iter().map(|n| (n.as_str(), succ(n))).collect();
    let mut out = Vec::new();
    for n in &nodes {
        // n is cyclic if it can reach itself
        let mut stack: Vec<String> = edges[n.as_str()].iter().cloned().collect();
        let mut seen = BTreeSet::new();
        while let Some(m) = stack.pop() {
            if m == **n {
                out.push(m);
                break;
            }
            if seen.insert(m.clone()) {
                if let Some(e) = edges.get(m.as_str()) {
                    stack.extend(e.iter().cloned());
                }
            }
        }
    }
    out
}

/// Output of unranking before copies are substituted.
#[derive(Debug, Clone)]
pub(crate) enum Piece {
    Tok(TokenKind),
    Copy(usize),
}

pub(crate) struct Counter<'g> {
    g: &'g GrammarSpec,
    depth: u8,
    nts: HashMap<&'g str, usize>,
    copies: Vec<&'g str>,
    copy_ids: HashMap<&'g str, usize>,
    seq_memo: HashMap<(usize, usize, State), Rc<CountMap>>,
    nt_memo: HashMap<(usize, State), Rc<CountMap>>,
    rep_memo: HashMap<(usize, u8, u8, State), Rc<CountMap>>,
    join_memo: HashMap<(Set, Set), BigUint>,
}

impl<'g> Counter<'g> {
    /// Callers must first check [`unbounded_items`] is empty.
    pub(crate) fn new(g: &'g GrammarSpec, depth: u8) -> Result<Self, SpaceError> {
        let mut nts = HashMap::new();
        let mut copies = Vec::new();
        let mut copy_ids = HashMap::new();
        for name in g.rules.keys() {
            if is_copy(name) {
                copy_ids.insert(name.as_str(), copies.len());
                copies.push(name.as_str());
            } else {
                let id = nts.len();
                nts.insert(name.as_str(), id);
            }
        }
        if copies.len() > Set::BITS as usize {
            return Err(SpaceError::TooManyCopies(copies.len()));
        }
        Ok(Counter {
            g,
            depth: depth.max(1),
            nts,
            copies,
            copy_ids,
            seq_memo: HashMap::new(),
            nt_memo: HashMap::new(),
            rep_memo: HashMap::new(),
            join_memo: HashMap::new(),
        })
    }

    fn fresh(&self) -> State {
        vec![0; self.nts.len()]
    }

    pub(crate) fn total(&mut self) -> BigUint {
        let root = self.root();
        let mut n = BigUint::zero();
        for (u, c) in root.iter() {
            n += c * self.join(*u, 0);
        }
        n
    }

    fn root(&mut self) -> Rc<CountMap> {
        let st = self.fresh();
        let start = self.g.start.as_str();
        match self.copy_ids.get(start) {
            Some(&c) => Rc::new(BTreeMap::from([(1 << c, BigUint::one())])),
            None => self.nt(start, &st),
        }
    }

    fn seq(&mut self, syms: &'g [Symbol], st: &State) -> Rc<CountMap> {
        let key = (syms.as_ptr() as usize, syms.len(), st.clone());
        if let Some(m) = self.seq_memo.get(&key) {
            return m.clone();
        }
        let m = match syms.split_first() {
            None => Rc::new(unit()),
            Some((first, rest)) => {
                let a = self.sym(first, st);
                if a.is_empty() {
                    a
                } else {
                    let b = self.seq(rest, st);
                    Rc::new(conv(&a, &b))
                }
            }
        };
        self.seq_memo.insert(key, m.clone());
        m
    }

    fn sym(&mut self, s: &'g Symbol, st: &State) -> Rc<CountMap> {
        match s {
            Symbol::Terminal { .. } => Rc::new(unit()),
            Symbol::Builtin(_) => Rc::new(CountMap::new()),
            Symbol::NonTerminal(name) => {
                if let Some(&c) = self.copy_ids.get(name.as_str()) {
                    return Rc::new(BTreeMap::from([(1 << c, BigUint::one())]));
                }
                self.nt(name, st)
            }
            Symbol::Group { repeat, .. } => match repeat {
                Repeat::Once => self.choice(s, st),
                Repeat::Optional => {
                    let mut m = unit();
                    add_into(&mut m, &self.choice(s, st));
                    Rc::new(m)
                }
                Repeat::ZeroOrMore => self.rep(s, 0, self.depth, st),
                Repeat::OneOrMore => self.rep(s, 1, self.depth, st),
            },
        }
    }

    fn nt(&mut self, name: &str, st: &State) -> Rc<CountMap> {
        let Some((key_name, alts)) = self.g.rules.get_key_value(name) else {
            return Rc::new(CountMap::new());
        };
        let id = self.nts[key_name.as_str()];
        if st[id] >= self.depth {
            return Rc::new(CountMap::new());
        }
        let key = (id, st.clone());
        if let Some(m) = self.nt_memo.get(&key) {
            return m.clone();
        }
        let mut inner = st.clone();
        inner[id] += 1;
        let mut m = CountMap::new();
        for alt in alts {
            add_into(&mut m, &self.seq(&alt.symbols, &inner));
        }
        let m = Rc::new(m);
        self.nt_memo.insert(key, m.clone());
        m
    }

    fn choice(&mut self, g: &'g Symbol, st: &State) -> Rc<CountMap> {
        let Symbol::Group { alternatives, .. } = g else { unreachable!() };
        let mut m = CountMap::new();
        for alt in alternatives {
            add_into(&mut m, &self.seq(&alt.symbols, st));
        }
        Rc::new(m)
    }

    /// Between `min` and `left` repetitions of a group.
    fn rep(&mut self, g: &'g Symbol, min: u8, left: u8, st: &State) -> Rc<CountMap> {
        let key = (g as *const Symbol as usize, min, left, st.clone());
        if let Some(m) = self.rep_memo.get(&key) {
            return m.clone();
        }
        let mut m = if min == 0 { unit() } else { CountMap::new() };
        if left > 0 {
            let one = self.choice(g, st);
            let more = self.rep(g, min.saturating_sub(1), left - 1, st);
            add_into(&mut m, &conv(&one, &more));
        }
        let m = Rc::new(m);
        self.rep_memo.insert(key, m.clone());
        m
    }

    fn copy_body(&mut self, c: usize) -> Rc<CountMap> {
        let alts = self.g.alternatives(self.copies[c]);
        let st = self.fresh();
        let mut m = CountMap::new();
        for alt in alts {
            add_into(&mut m, &self.seq(&alt.symbols, &st));
        }
        Rc::new(m)
    }

    /// Ways to bind every copy in `pending` not yet in `done`.
    fn join(&mut self, pending: Set, done: Set) -> BigUint {
        let todo = pending & !done;
        if todo == 0 {
            return BigUint::one();
        }
        if let Some(n) = self.join_memo.get(&(pending, done)) {
            return n.clone();
        }
        let c = todo.trailing_zeros() as usize;
        let body = self.copy_body(c);
        let mut n = BigUint::zero();
        for (u, k) in body.iter() {
            n += k * self.join(pending | u, done | (1 << c));
        }
        self.join_memo.insert((pending, done), n.clone());
        n
    }

    /// The sentence with index `r` (below [`Counter::total`]).
    pub(crate) fn unrank(&mut self, mut r: BigUint) -> Vec<TokenKind> {
        let root = self.root();
        let mut bindings: Vec<Option<Vec<Piece>>> = vec![None; self.copies.len()];
        let mut pieces = Vec::new();
        for (u, c) in root.iter() {
            let j = self.join(*u, 0);
            let block = c * &j;
            if r < block {
                let st = self.fresh();
                let start = self.g.start.as_str();
                match self.copy_ids.get(start) {
                    Some(&c) => pieces.push(Piece::Copy(c)),
                    None => self.unrank_nt(start, &st, *u, &r / &j, &mut pieces),
                }
                self.unrank_join(*u, 0, &r % &j, &mut bindings);
                return expand(&pieces, &bindings);
            }
            r -= block;
        }
        panic!("rank out of range")
    }

    fn unrank_join(&mut self, pending: Set, done: Set, mut r: BigUint, bindings: &mut [Option<Vec<Piece>>]) {
        let todo = pending & !done;
        if todo == 0 {
            return;
        }
        let c = todo.trailing_zeros() as usize;
        let body = self.copy_body(c);
        for (u, k) in body.iter() {
            let next = self.join(pending | u, done | (1 << c));
            let block = k * &next;
            if r < block {
                let st = self.fresh();
                let mut out = Vec::new();
                let alts = &self.g.rules[self.copies[c]];
                self.unrank_alts(alts, &st, *u, &r / &next, &mut out);
                bindings[c] = Some(out);
                self.unrank_join(pending | u, done | (1 << c), &r % &next, bindings);
                return;
            }
            r -= block;
        }
        panic!("binding rank out of range")
    }

    fn unrank_alts(&mut self, alts: &'g [super::grammar::Alternative], st: &State, target: Set, mut r: BigUint, out: &mut Vec<Piece>) {
        for alt in alts {
            let m = self.seq(&alt.symbols, st);
            let n = m.get(&target).cloned().unwrap_or_default();
            if r < n {
                return self.unrank_seq(&alt.symbols, st, target, r, out);
            }
            r -= n;
        }
        panic!("alternative rank out of range")
    }

    fn unrank_seq(&mut self, syms: &'g [Symbol], st: &State, target: Set, mut r: BigUint, out: &mut Vec<Piece>) {
        let Some((first, rest)) = syms.split_first() else {
            return;
        };
        let a = self.sym(first, st);
        let b = self.seq(rest, st);
        for (ka, na) in a.iter() {
            for (kb, nb) in b.iter() {
                if ka | kb != target {
                    continue;
                }
                let block = na * nb;
                if r < block {
                    self.unrank_sym(first, st, *ka, &r / nb, out);
                    self.unrank_seq(rest, st, *kb, &r % nb, out);
                    return;
                }
                r -= block;
            }
        }
        panic!("sequence rank out of range")
    }

    fn unrank_nt(&mut self, name: &str, st: &State, target: Set, r: BigUint, out: &mut Vec<Piece>) {
        let (key_name, alts) = self.g.rules.get_key_value(name).expect("defined");
        let id = self.nts[key_name.as_str()];
        let mut inner = st.clone();
        inner[id] += 1;
        self.unrank_alts(alts, &inner, target, r, out);
    }

    fn unrank_sym(&mut self, s: &'g Symbol, st: &State, target: Set, mut r: BigUint, out: &mut Vec<Piece>) {
        match s {
            Symbol::Terminal { tokens, .. } => out.extend(tokens.iter().cloned().map(Piece::Tok)),
            Symbol::Builtin(_) => panic!("builtin in a finite grammar"),
            Symbol::NonTerminal(name) => {
                if let Some(&c) = self.copy_ids.get(name.as_str()) {
                    out.push(Piece::Copy(c));
                    return;
                }
                self.unrank_nt(name, st, target, r, out);
            }
            Symbol::Group { repeat, alternatives } => {
                let g = s;
                match repeat {
                    Repeat::Once => self.unrank_alts(alternatives, st, target, r, out),
                    Repeat::Optional => {
                        if target == 0 {
                            if r.is_zero() {
                                return;
                            }
                            r -= 1u32;
                        }
                        self.unrank_alts(alternatives, st, target, r, out)
                    }
                    Repeat::ZeroOrMore => self.unrank_rep(g, 0, self.depth, st, target, r, out),
                    Repeat::OneOrMore => self.unrank_rep(g, 1, self.depth, st, target, r, out),
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn unrank_rep(&mut self, g: &'g Symbol, min: u8, left: u8, st: &State, target: Set, mut r: BigUint, out: &mut Vec<Piece>) {
        if min == 0 && target == 0 {
            if r.is_zero() {
                return;
            }
            r -= 1u32;
        }
        let Symbol::Group { alternatives, .. } = g else { unreachable!() };
        let a = self.choice(g, st);
        let b = self.rep(g, min.saturating_sub(1), left - 1, st);
        for (ka, na) in a.iter() {
            for (kb, nb) in b.iter() {
                if ka | kb != target {
                    continue;
                }
                let block = na * nb;
                if r < block {
                    self.unrank_alts(alternatives, st, *ka, &r / nb, out);
                    self.unrank_rep(g, min.saturating_sub(1), left - 1, st, *kb, &r % nb, out);
                    return;
                }
                r -= block;
            }
        }
        panic!("repetition rank out of range")
    }
}

fn expand(pieces: &[Piece], bindings: &[Option<Vec<Piece>>]) -> Vec<TokenKind> {
    let mut out = Vec::new();
    fn go(pieces: &[Piece], bindings: &[Option<Vec<Piece>>], out: &mut Vec<TokenKind>) {
        for p in pieces {
            match p {
                Piece::Tok(t) => out.push(t.clone()),
                Piece::Copy(c) => go(bindings[*c].as_deref().expect("copy bound"), bindings, out),
            }
        }
    }
    go(pieces, bindings, &mut out);
    out
}
