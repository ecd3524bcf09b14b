//! Ground a small retail space over synthetic sales, evaluate every member
//! and tally the verdicts.

use std::collections::BTreeMap;

use hypogram::evaluator::eval_hypothesis;
use hypogram::parser::{parse_grammar, parse_hypothesis};
use hypogram::space::{enumerate_sentences, ground, size, DEFAULT_DEPTH, DEFAULT_LIMIT};
use hypogram::synth::m5;

// `agg1` appears twice, so both sides use the same aggregate.
const GRAMMAR: &str = r#"
hyp    :- agg1 "[State=" const1 "]" ">" agg1 "[State=" const2 "]"
agg1   :- "AVG(Sales)" | "SUM(Sales)" | "MAX(Price)"
const1 :- string
const2 :- string
"#;

fn main() {
    let t = m5(5, 200).table().unwrap();
    let g = ground(&parse_grammar(GRAMMAR).unwrap(), &t).unwrap();
    println!("grounded space: {} hypotheses", size(&g));
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for s in enumerate_sentences(&g, DEFAULT_LIMIT, DEFAULT_DEPTH).unwrap() {
        let v = eval_hypothesis(&parse_hypothesis(&s).unwrap(), &t).unwrap().verdict;
        if s.starts_with("AVG") && v.as_str() == "true" && s.contains("California'] >") {
            println!("  {s}");
        }
        *tally.entry(v.as_str()).or_default() += 1;
    }
    println!("{tally:?}");
}
