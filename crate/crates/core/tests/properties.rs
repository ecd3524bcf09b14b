//! Invariants checked over generated inputs.

mod common;

use std::sync::OnceLock;

use hypogram::ast::{pretty_print, Predicate, Scalar};
use hypogram::dataset::{eval_predicate, AttrType, RowMask, Table};
use hypogram::evaluator::{eval_hypothesis, eval_hypothesis_with, EvalOptions, Verdict};
use hypogram::funcs::{call, CallContext, FunctionConfig, Value, Vector};
use hypogram::parser::parse_hypothesis;
use hypogram::space::{
    base_grammar, enumerate_sentences, ground, member_text, sample_sentences, GrammarSpec, DEFAULT_DEPTH,
    DEFAULT_LIMIT,
};
use proptest::prelude::*;

fn relation1() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| common::table("relation1"))
}

fn movies() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| common::table("movies"))
}

fn grounded(stem: &str, t: &Table) -> GrammarSpec {
    ground(&common::grammar(stem), t).unwrap()
}

/// A single condition over relation1, as source text.
fn condition() -> impl Strategy<Value = String> {
    let op = prop::sample::select(vec!["=", "!=", "<", "<=", ">", ">="]);
    prop_oneof![
        (prop::sample::select(vec!["month", "cost", "price", "id"]), op, 0i32..14).prop_map(|(a, o, n)| format!("{a}{o}{n}")),
        prop::sample::select(vec!["US", "EU", "JP"]).prop_map(|m| format!("market='{m}'")),
        (prop::sample::select(vec!["cost", "price"]), 0i32..14, 0i32..14)
            .prop_map(|(a, x, y)| format!("{a} in [{},{}]", x.min(y), x.max(y))),
    ]
}

fn scalar() -> impl Strategy<Value = String> {
    prop_oneof![
        (-1000i32..1000).prop_map(|n| n.to_string()),
        (-100.0..100.0f64).prop_map(|x| format!("{x:.3}")),
        "[a-z][a-z ]{0,6}".prop_map(|w| format!("'{w}'")),
        prop::sample::select(vec!["true", "false", "@2015-05-01", "@2015-05-01T12:30:00"]).prop_map(String::from),
    ]
}

fn constant() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => scalar(),
        1 => prop_oneof![
            prop::collection::vec((-99i32..99).prop_map(|n| n.to_string()), 1..4),
            prop::collection::vec("[a-z]{1,4}".prop_map(|w| format!("'{w}'")), 1..4),
        ]
        .prop_map(|v| format!("{{{}}}", v.join(", "))),
        1 => (-50i32..50, -50i32..50, any::<bool>(), any::<bool>()).prop_map(|(a, b, l, r)| {
            format!("{}{}, {}{}", if l { '[' } else { '(' }, a.min(b), a.max(b), if r { ']' } else { ')' })
        }),
    ]
}

fn name() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-z_]{0,5}[a-z]".prop_filter("not a keyword", |w| !["in", "not", "true", "false"].contains(&w.as_str())),
        Just("`Car id`".to_string()),
    ]
}

fn op() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["=", "!=", "<", "<=", ">", ">=", "~", "in", "not in"])
}

fn generated_pred(value: BoxedStrategy<String>) -> impl Strategy<Value = String> {
    prop::collection::vec((any::<bool>(), name(), op(), value), 1..3).prop_map(|cs| {
        cs.into_iter()
            .map(|(neg, a, o, v)| format!("{}{a} {o} {v}", if neg { "!" } else { "" }))
            .collect::<Vec<_>>()
            .join(" & ")
    })
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        constant(),
        name(),
        (name(), generated_pred(constant().boxed())).prop_map(|(a, p)| format!("{a}[{p}]")),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        (
            prop::sample::select(vec!["AVG", "count", "CORR", "fit_LM", "-", "mod"]),
            prop::collection::vec(inner.clone(), 0..3),
            prop::option::of(generated_pred(inner.boxed())),
        )
            .prop_map(|(f, args, p)| {
                let call = format!("{f}({})", args.join(", "));
                match p {
                    Some(p) => format!("{call}[{p}]"),
                    None => call,
                }
            })
    })
}

fn hypothesis() -> impl Strategy<Value = String> {
    let clause = (expr(), op(), expr(), prop::option::of(generated_pred(constant().boxed()))).prop_map(|(l, o, r, p)| match p {
        Some(p) => format!("({l} {o} {r})[{p}]"),
        None => format!("{l} {o} {r}"),
    });
    prop::collection::vec(clause, 1..3).prop_map(|cs| cs.join(" & "))
}

fn pred(text: &str) -> Predicate {
    let h = parse_hypothesis(&format!("count() >= 0 [{text}]")).unwrap();
    h.clauses[0].pred.clone().unwrap()
}

fn select(text: &str, base: &RowMask) -> RowMask {
    eval_predicate(relation1(), &pred(text), base).unwrap()
}

fn column(xs: &[f64]) -> Value {
    Value::Vector(Vector {
        rows: (0..xs.len()).collect(),
        values: xs.iter().map(|x| Scalar::Number(*x)).collect(),
        kind: AttrType::Number,
        computed: false,
    })
}

fn apply(name: &str, args: &[Value]) -> f64 {
    let cfg = FunctionConfig::default();
    match call(name, args, &CallContext { rows: 0, config: &cfg }).unwrap() {
        Value::Scalar { value: Scalar::Number(n), .. } => n,
        Value::Model(m) => m.r_squared,
        other => panic!("{other:?}"),
    }
}

fn spread() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, 3..40).prop_filter("needs spread", |v| {
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min) > 1e-3
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_hypotheses_round_trip(text in hypothesis()) {
        let h = parse_hypothesis(&text).unwrap();
        let printed = pretty_print(&h);
        prop_assert_eq!(&parse_hypothesis(&printed).unwrap(), &h);
        prop_assert_eq!(&pretty_print(&parse_hypothesis(&printed).unwrap()), &printed);
        prop_assert!(member_text(&base_grammar(), &text, None), "{}", text);
    }

    #[test]
    fn selection_stays_inside_base(c in condition(), keep in prop::collection::vec(any::<bool>(), 6)) {
        let base = RowMask(keep.iter().enumerate().filter(|p| *p.1).map(|p| p.0).collect());
        let all = select(&c, &relation1().all_rows());
        let sub = select(&c, &base);
        prop_assert!(sub.is_subset(&base));
        prop_assert_eq!(sub, all.intersect(&base));
    }

    #[test]
    fn conjunction_is_intersection(a in condition(), b in condition()) {
        let all = relation1().all_rows();
        let both = select(&format!("{a} & {b}"), &all);
        prop_assert_eq!(both, select(&a, &all).intersect(&select(&b, &all)));
    }

    #[test]
    fn negation_is_complement(c in condition()) {
        let all = relation1().all_rows();
        let yes = select(&c, &all);
        let no = select(&format!("!({c})"), &all);
        prop_assert!(yes.intersect(&no).is_empty());
        prop_assert_eq!(yes.len() + no.len(), all.len());
    }

    #[test]
    fn samples_are_enumerated_members(seed in any::<u64>(), k in 1usize..12) {
        for stem in ["similarity", "year"] {
            let t = if stem == "year" { movies() } else { relation1() };
            let g = grounded(stem, t);
            let all = enumerate_sentences(&g, DEFAULT_LIMIT, DEFAULT_DEPTH).unwrap();
            let drawn = sample_sentences(&g, k, seed, DEFAULT_DEPTH).unwrap();
            prop_assert_eq!(drawn.len(), k.min(all.len()));
            prop_assert_eq!(&drawn, &sample_sentences(&g, k, seed, DEFAULT_DEPTH).unwrap());
            for s in &drawn {
                prop_assert!(all.contains(s), "{}", s);
                prop_assert!(member_text(&g, s, None), "{}", s);
            }
        }
    }

    #[test]
    fn conjunction_combines_verdicts(seed in any::<u64>()) {
        let g = grounded("movies_space", movies());
        let s = sample_sentences(&g, 2, seed, DEFAULT_DEPTH).unwrap();
        let (a, b) = (parse_hypothesis(&s[0]).unwrap(), parse_hypothesis(&s[1]).unwrap());
        let mut both = a.clone();
        both.clauses.extend(b.clauses.clone());
        let (ra, rb, rab) = (eval_hypothesis(&a, movies()), eval_hypothesis(&b, movies()), eval_hypothesis(&both, movies()));
        match (ra, rb, rab) {
            (Ok(x), Ok(y), Ok(z)) => prop_assert_eq!(z.verdict, x.verdict.and(y.verdict)),
            (x, y, z) => prop_assert!(z.is_err() && (x.is_err() || y.is_err())),
        }
    }

    #[test]
    fn vacuous_as_true_only_lifts_vacuous(seed in any::<u64>()) {
        let g = grounded("movies_space", movies());
        let opts = EvalOptions { vacuous_as_true: true, ..EvalOptions::default() };
        for s in sample_sentences(&g, 4, seed, DEFAULT_DEPTH).unwrap() {
            let h = parse_hypothesis(&s).unwrap();
            let (Ok(plain), Ok(lifted)) = (eval_hypothesis(&h, movies()), eval_hypothesis_with(&h, movies(), &opts)) else {
                continue;
            };
            for (p, l) in plain.clauses.iter().zip(&lifted.clauses) {
                let want = if p.verdict == Verdict::Vacuous { Verdict::True } else { p.verdict };
                prop_assert_eq!(l.verdict, want);
            }
            prop_assert_ne!(lifted.verdict, Verdict::Vacuous);
            if let Some(trace) = &plain.trace {
                prop_assert_eq!(trace.leaf_count(), h.leaf_count(), "{}", s);
            }
        }
    }

    #[test]
    fn corr_is_symmetric_and_affine_invariant(x in spread(), a in 0.5..4.0f64, b in -10.0..10.0f64) {
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * 0.3 + (i as f64 * 1.7).sin() * 50.0).collect();
        let xy = apply("CORR", &[column(&x), column(&y)]);
        prop_assert!((xy - apply("CORR", &[column(&y), column(&x)])).abs() <= 1e-12);
        let moved: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((xy - apply("CORR", &[column(&moved), column(&y)])).abs() <= 1e-9);
        prop_assert!(xy.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn divergences_vanish_on_identical_input(x in spread(), y in spread()) {
        prop_assert_eq!(apply("KL", &[column(&x), column(&x)]), 0.0);
        prop_assert_eq!(apply("EMD", &[column(&x), column(&x)]), 0.0);
        prop_assert!(apply("KL", &[column(&x), column(&y)]) >= 0.0);
        let (e1, e2) = (apply("EMD", &[column(&x), column(&y)]), apply("EMD", &[column(&y), column(&x)]));
        prop_assert!((e1 - e2).abs() <= 1e-9 * e1.abs().max(1.0));
    }

    #[test]
    fn aggregates_are_ordered(x in spread()) {
        let (lo, avg, hi) = (apply("MIN", &[column(&x)]), apply("AVG", &[column(&x)]), apply("MAX", &[column(&x)]));
        prop_assert!(lo <= avg + 1e-9 && avg <= hi + 1e-9);
        let sum = apply("SUM", &[column(&x)]);
        prop_assert!((sum - avg * x.len() as f64).abs() <= 1e-9 * sum.abs().max(1.0));
    }

    #[test]
    fn least_squares_recovers_lines(x in spread(), slope in -20.0..20.0f64, intercept in -500.0..500.0f64) {
        let y: Vec<f64> = x.iter().map(|v| slope * v + intercept).collect();
        let cfg = FunctionConfig::default();
        let Value::Model(m) = call("fit_LM", &[column(&x), column(&y)], &CallContext { rows: x.len(), config: &cfg }).unwrap() else {
            panic!("fit_LM returns a model");
        };
        prop_assert!((m.slope - slope).abs() <= 1e-7 * slope.abs().max(1.0));
        prop_assert!((m.intercept - intercept).abs() <= 1e-7 * intercept.abs().max(1.0));
    }
}
