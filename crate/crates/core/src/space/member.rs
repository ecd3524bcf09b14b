//! Exhaustive backtracking recognizer.
//!
//! Ordered choice would reject sentences whose first matching alternative
//! leads to a dead end later on, and every enumerated sentence must be a
//! member of its own grammar, so every alternative is tried in turn.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use super::grammar::{is_copy, Alternative, GrammarSpec, Repeat, Symbol};
use crate::parser::lexer::TokenKind;

type K<'a> = &'a mut dyn FnMut(usize) -> bool;

struct Rec<'g> {
    g: &'g GrammarSpec,
    toks: &'g [TokenKind],
    active: RefCell<HashSet<(&'g str, usize)>>,
    bound: RefCell<HashMap<&'g str, (usize, usize)>>,
}

/// Whether `g` derives exactly `toks`, with copies bound consistently.
pub(crate) fn recognizes(g: &GrammarSpec, toks: &[TokenKind]) -> bool {
    let Some((start, _)) = g.rules.get_key_value(g.start.as_str()) else {
        return false;
    };
    let r = Rec { g, toks, active: RefCell::new(HashSet::new()), bound: RefCell::new(HashMap::new()) };
    r.nonterminal(start, 0, &mut |p| p == toks.len())
}

impl<'g> Rec<'g> {
    fn seq(&self, syms: &'g [Symbol], pos: usize, k: K) -> bool {
        match syms.split_first() {
            None => k(pos),
            Some((first, rest)) => self.sym(first, pos, &mut |p| self.seq(rest, p, &mut *k)),
        }
    }

    fn alts(&self, alts: &'g [Alternative], pos: usize, k: K) -> bool {
        alts.iter().any(|a| self.seq(&a.symbols, pos, &mut *k))
    }

    fn tokens_at(&self, expect: &[TokenKind], pos: usize) -> bool {
        self.toks.len() >= pos + expect.len() && expect.iter().zip(&self.toks[pos..]).all(|(e, t)| e.matches(t))
    }

    fn sym(&self, s: &'g Symbol, pos: usize, k: K) -> bool {
        match s {
            Symbol::Terminal { tokens, .. } => self.tokens_at(tokens, pos) && k(pos + tokens.len()),
            Symbol::Builtin(b) => pos < self.toks.len() && b.accepts(&self.toks[pos]) && k(pos + 1),
            Symbol::NonTerminal(name) => match self.g.rules.get_key_value(name.as_str()) {
                Some((name, _)) => self.nonterminal(name, pos, k),
                None => false,
            },
            Symbol::Group { alternatives, repeat } => match repeat {
                Repeat::Once => self.alts(alternatives, pos, k),
                Repeat::Optional => self.alts(alternatives, pos, &mut *k) || k(pos),
                Repeat::ZeroOrMore => self.star(alternatives, pos, k),
                Repeat::OneOrMore => self.alts(alternatives, pos, &mut |p| self.star(alternatives, p, &mut *k)),
            },
        }
    }

    fn star(&self, alts: &'g [Alternative], pos: usize, k: K) -> bool {
        self.alts(alts, pos, &mut |p| p > pos && self.star(alts, p, &mut *k)) || k(pos)
    }

    fn nonterminal(&self, name: &'g str, pos: usize, k: K) -> bool {
        if is_copy(name) {
            let bound = self.bound.borrow().get(name).copied();
            if let Some((s, e)) = bound {
                let span = &self.toks[s..e];
                return self.tokens_at(span, pos) && k(pos + span.len());
            }
        }
        // left-recursion guard
        if !self.active.borrow_mut().insert((name, pos)) {
            return false;
        }
        let copy = is_copy(name);
        let ok = self.alts(self.g.alternatives(name), pos, &mut |end| {
            self.active.borrow_mut().remove(&(name, pos));
            if copy {
                self.bound.borrow_mut().insert(name, (pos, end));
            }
            let r = k(end);
            if copy {
                self.bound.borrow_mut().remove(name);
            }
            self.active.borrow_mut().insert((name, pos));
            r
        });
        self.active.borrow_mut().remove(&(name, pos));
        ok
    }
}
