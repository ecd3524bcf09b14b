//! Containment and intersection between hypothesis spaces.

use hypogram::parser::parse_grammar;
use hypogram::space::{contains, intersect, DEFAULT_LIMIT};

fn main() {
    let kl = parse_grammar("hyp :- func \"(cost,price)\" \"<\" 10\nfunc :- KL\n").unwrap();
    let any = parse_grammar("hyp :- func \"(cost,price)\" \"<\" 10\nfunc :- KL | CORR | EMD\n").unwrap();
    let forward = contains(&kl, &any, DEFAULT_LIMIT).unwrap();
    let back = contains(&any, &kl, DEFAULT_LIMIT).unwrap();
    println!("KL within KL|CORR|EMD: {} (equal: {:?})", forward.subset, forward.equal());
    println!("KL|CORR|EMD within KL: {} (counterexample {:?})", back.subset, back.counterexample);
    let both = intersect(&kl, &any, DEFAULT_LIMIT).unwrap();
    println!("intersection: {} sentence(s) {:?}", both.card_intersection, both.sentences);
}
