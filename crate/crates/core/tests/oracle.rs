//! The evaluator against a naive reference interpreter, over sampled spaces.

mod common;

use common::reference::{library, reference, Answer};
use hypogram::ast::{Expr, ExprKind};
use hypogram::parser::parse_hypothesis;
use hypogram::space::{enumerate_sentences, ground, DEFAULT_DEPTH, DEFAULT_LIMIT};

fn agree(stem: &str, table: &str, per_shape: usize) -> Vec<(String, Answer)> {
    let t = common::table(table);
    let mut seen = Vec::new();
    for s in common::draw(stem, &t, per_shape, 11) {
        let (a, b) = (library(&s, &t), reference(&s, &t));
        assert_eq!(a, b, "{s}");
        seen.push((s, a));
    }
    seen
}

fn kinds(seen: &[(String, Answer)]) -> Vec<Answer> {
    let mut k: Vec<Answer> = seen.iter().map(|p| p.1).collect();
    k.sort_by_key(|a| a.name());
    k.dedup();
    k
}

#[test]
fn movies_space_agrees() {
    let seen = agree("movies_space", "movies", 150);
    assert!(seen.len() >= 500);
    assert_eq!(kinds(&seen).len(), 3, "{:?}", kinds(&seen));
}

#[test]
fn relation1_space_agrees() {
    let seen = agree("relation1_space", "relation1", 100);
    assert!(seen.len() >= 600);
    assert_eq!(kinds(&seen).len(), 4, "{:?}", kinds(&seen));
}

#[test]
fn literal_corpus_agrees_where_supported() {
    let t = common::table("movies");
    let supported = ["AVG", "SUM", "MAX", "MIN", "count", "CORR"];
    for (label, text) in common::listing("hypotheses.txt") {
        let h = parse_hypothesis(&text).unwrap();
        let mut calls = Vec::new();
        for c in &h.clauses {
            names(&c.lhs, &mut calls);
            names(&c.rhs, &mut calls);
            c.pred.iter().flat_map(|p| &p.conjuncts).for_each(|cj| names(&cj.value, &mut calls));
        }
        if calls.iter().all(|c| supported.iter().any(|s| s.eq_ignore_ascii_case(c))) {
            assert_eq!(library(&text, &t), reference(&text, &t), "{label}: {text}");
        }
    }
}

fn names(e: &Expr, out: &mut Vec<String>) {
    let pred = match &e.kind {
        ExprKind::Call { name, args, pred } => {
            out.push(name.clone());
            args.iter().for_each(|a| names(a, out));
            pred
        }
        ExprKind::Var { pred, .. } => pred,
        ExprKind::Const(_) => return,
    };
    pred.iter().flat_map(|p| &p.conjuncts).for_each(|cj| names(&cj.value, out));
}

#[test]
fn vast_h1_agrees() {
    let t = common::table("vast");
    let g = ground(&common::grammar("vast_h1"), &t).unwrap();
    let all = enumerate_sentences(&g, DEFAULT_LIMIT, DEFAULT_DEPTH).unwrap();
    assert_eq!(all.len(), 200);
    for s in &all {
        assert_eq!(library(s, &t), reference(s, &t), "{s}");
    }
}
