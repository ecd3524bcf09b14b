//! Search a grounded space over a synthetic park sensor log for cars that
//! entered more often than they left.

use hypogram::evaluator::{eval_hypothesis, Verdict};
use hypogram::parser::{parse_grammar, parse_hypothesis};
use hypogram::space::{enumerate_sentences, ground, DEFAULT_DEPTH, DEFAULT_LIMIT};
use hypogram::synth::{vast, VastOptions};

fn main() {
    let log = vast(&VastOptions::default());
    let t = log.data.table().unwrap();
    let g = parse_grammar(
        "hyp    :- \"(mod(count(), 2) = 1)[\" pred \"]\"\n\
         pred   :- \"Gate-name~'^entrance' & Car-id=\" const1\n\
         const1 :- number\n",
    )
    .unwrap();
    let g = ground(&g, &t).unwrap();
    let candidates = enumerate_sentences(&g, DEFAULT_LIMIT, DEFAULT_DEPTH).unwrap();
    let hits: Vec<&String> = candidates
        .iter()
        .filter(|s| eval_hypothesis(&parse_hypothesis(s).unwrap(), &t).unwrap().verdict == Verdict::True)
        .collect();
    println!("{} rows, {} candidate hypotheses", t.row_count(), candidates.len());
    for h in &hits {
        println!("  true: {h}");
    }
    println!("planted: {:?}", log.stranded);
}
