//! Depth-first sentence enumeration in alternative-index order.

use std::collections::HashMap;
use std::ops::ControlFlow;

use super::grammar::{is_copy, Alternative, GrammarSpec, Repeat, Symbol};
use crate::parser::lexer::TokenKind;

enum Work<'g> {
    Seq(&'g [Symbol]),
    /// Pop one stack occurrence of a nonterminal.
    Leave(&'g str),
    /// Bind a copy to everything emitted since `start`, then restore the
    /// depth counts that were set aside for its body.
    Bind { name: &'g str, start: usize },
    Rep { group: &'g [Alternative], min: u8, left: u8 },
}

pub(crate) struct Walker<'g, 'f> {
    g: &'g GrammarSpec,
    depth: u8,
    counts: HashMap<&'g str, u8>,
    saved: Vec<HashMap<&'g str, u8>>,
    bound: HashMap<&'g str, Vec<TokenKind>>,
    emit: &'f mut dyn FnMut(&[TokenKind]) -> ControlFlow<()>,
}

impl<'g, 'f> Walker<'g, 'f> {
    pub(crate) fn new(g: &'g GrammarSpec, depth: u8, emit: &'f mut dyn FnMut(&[TokenKind]) -> ControlFlow<()>) -> Self {
        Walker { g, depth: depth.max(1), counts: HashMap::new(), saved: Vec::new(), bound: HashMap::new(), emit }
    }

    pub(crate) fn run(&mut self) {
        let Some((name, _)) = self.g.rules.get_key_value(self.g.start.as_str()) else {
            return;
        };
        let mut work = Vec::new();
        let mut out = Vec::new();
        let _ = self.nonterminal(name, &mut work, &mut out);
    }

    fn walk(&mut self, work: &mut Vec<Work<'g>>, out: &mut Vec<TokenKind>) -> ControlFlow<()> {
        let Some(item) = work.pop() else {
            return (self.emit)(out);
        };
        let flow = match &item {
            Work::Seq(syms) => match syms.split_first() {
                None => self.walk(work, out),
                Some((first, rest)) => {
                    work.push(Work::Seq(rest));
                    let f = self.symbol(first, work, out);
                    work.pop();
                    f
                }
            },
            Work::Leave(name) => {
                *self.counts.get_mut(name).expect("entered") -= 1;
                let f = self.walk(work, out);
                *self.counts.get_mut(name).expect("entered") += 1;
                f
            }
            Work::Bind { name, start } => {
                let tokens = out[*start..].to_vec();
                self.bound.insert(name, tokens);
                let inner = std::mem::replace(&mut self.counts, self.saved.pop().expect("saved counts"));
                let f = self.walk(work, out);
                self.saved.push(std::mem::replace(&mut self.counts, inner));
                self.bound.remove(name);
                f
            }
            Work::Rep { group, min, left } => self.repeat(group, *min, *left, work, out),
        };
        work.push(item);
        flow
    }

    fn alternatives(&mut self, alts: &'g [Alternative], work: &mut Vec<Work<'g>>, out: &mut Vec<TokenKind>) -> ControlFlow<()> {
        for alt in alts {
            work.push(Work::Seq(&alt.symbols));
            let f = self.walk(work, out);
            work.pop();
            f?;
        }
        ControlFlow::Continue(())
    }

    fn repeat(&mut self, group: &'g [Alternative], min: u8, left: u8, work: &mut Vec<Work<'g>>, out: &mut Vec<TokenKind>) -> ControlFlow<()> {
        if min == 0 {
            self.walk(work, out)?;
        }
        if left == 0 {
            return ControlFlow::Continue(());
        }
        work.push(Work::Rep { group, min: min.saturating_sub(1), left: left - 1 });
        let f = self.alternatives(group, work, out);
        work.pop();
        f
    }

    fn symbol(&mut self, s: &'g Symbol, work: &mut Vec<Work<'g>>, out: &mut Vec<TokenKind>) -> ControlFlow<()> {
        match s {
            Symbol::Terminal { tokens, .. } => {
                let n = out.len();
                out.extend(tokens.iter().cloned());
                let f = self.walk(work, out);
                out.truncate(n);
                f
            }
            // finite spaces only reach here after grounding removed builtins
            Symbol::Builtin(_) => ControlFlow::Continue(()),
            Symbol::NonTerminal(name) => {
                let Some((name, _)) = self.g.rules.get_key_value(name.as_str()) else {
                    return ControlFlow::Continue(());
                };
                self.nonterminal(name, work, out)
            }
            Symbol::Group { alternatives, repeat } => match repeat {
                Repeat::Once => self.alternatives(alternatives, work, out),
                Repeat::Optional => {
                    self.walk(work, out)?;
                    self.alternatives(alternatives, work, out)
                }
                Repeat::ZeroOrMore => self.repeat(alternatives, 0, self.depth, work, out),
                Repeat::OneOrMore => self.repeat(alternatives, 1, self.depth, work, out),
            },
        }
    }

    fn nonterminal(&mut self, name: &'g str, work: &mut Vec<Work<'g>>, out: &mut Vec<TokenKind>) -> ControlFlow<()> {
        let alts = self.g.alternatives(name);
        if is_copy(name) {
            if let Some(tokens) = self.bound.get(name).cloned() {
                let n = out.len();
                out.extend(tokens);
                let f = self.walk(work, out);
                out.truncate(n);
                return f;
            }
            let outer = std::mem::take(&mut self.counts);
            self.saved.push(outer);
            work.push(Work::Bind { name, start: out.len() });
            let f = self.alternatives(alts, work, out);
            work.pop();
            self.counts = self.saved.pop().expect("saved counts");
            return f;
        }
        let c = self.counts.entry(name).or_insert(0);
        if *c >= self.depth {
            return ControlFlow::Continue(());
        }
        *c += 1;
        work.push(Work::Leave(name));
        let f = self.alternatives(alts, work, out);
        work.pop();
        *self.counts.get_mut(name).expect("entered") -= 1;
        f
    }
}
