//! Every listing in the fixture corpus parses, prints and re-parses unchanged.

mod common;

use hypogram::ast::pretty_print;
use hypogram::parser::{parse_expression, parse_grammar, parse_hypothesis};
use hypogram::space::{base_grammar, member_text, size, SpaceSize};

#[test]
fn hypotheses_round_trip() {
    let all = common::listing("hypotheses.txt");
    assert!(all.len() >= 45, "{}", all.len());
    for (label, text) in all {
        let h = parse_hypothesis(&text).unwrap_or_else(|e| panic!("{label}: {e}"));
        let printed = pretty_print(&h);
        let again = parse_hypothesis(&printed).unwrap_or_else(|e| panic!("{label}: {printed}: {e}"));
        assert_eq!(h, again, "{label}");
        assert_eq!(printed, pretty_print(&again), "{label}");
    }
}

#[test]
fn expressions_round_trip() {
    for (label, text) in common::listing("expressions.txt") {
        let e = parse_expression(&text).unwrap_or_else(|e| panic!("{label}: {e}"));
        let again = parse_expression(&e.to_string()).unwrap_or_else(|e| panic!("{label}: {e}"));
        assert_eq!(e, again, "{label}");
    }
}

#[test]
fn grammars_round_trip() {
    let files = common::grammar_files();
    assert!(files.len() >= 40);
    for (name, text) in files {
        let g = parse_grammar(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = g.to_string();
        let again = parse_grammar(&printed).unwrap_or_else(|e| panic!("{name}: {printed}\n{e}"));
        assert_eq!(g, again, "{name}");
    }
}

#[test]
fn every_hypothesis_is_in_the_base_space() {
    let base = base_grammar();
    for (label, text) in common::listing("hypotheses.txt") {
        assert!(member_text(&base, &text, None), "{label}: {text}");
    }
}

#[test]
fn single_statement_grammars_have_size_one() {
    for name in ["kl_inline", "kl_expanded", "vast_h2", "vast_h3", "vast_h5", "m5_h1", "m5_h5", "sort"] {
        assert_eq!(size(&common::grammar(name)), SpaceSize::Exact(1u32.into()), "{name}");
    }
}

#[test]
fn generated_fixtures_are_current() {
    let log = hypogram::synth::vast(&hypogram::synth::VastOptions::default());
    assert_eq!(common::read("vast.csv"), log.data.csv, "rerun the generate_fixtures example");
    assert_eq!(common::read("vast.json"), log.data.schema_json());
    let sales = hypogram::synth::m5(5, 200);
    assert_eq!(common::read("m5.csv"), sales.csv, "rerun the generate_fixtures example");
    assert_eq!(common::read("m5.json"), sales.schema_json());
}
