//! Size, enumerate and sample a grammar of hypotheses.

use hypogram::parser::parse_grammar;
use hypogram::space::{enumerate_sentences, sample_sentences, size, DEFAULT_DEPTH, DEFAULT_LIMIT};

const GRAMMAR: &str = r#"
hyp    :- agg op agg | agg op const1
agg    :- func "(Rating)" ("[" pred "]")?
func   :- AVG | MAX | MIN
pred   :- "Genre='Comedy'" | "Genre='Action'"
op     :- "<" | ">"
const1 :- "8" | "9"
"#;

fn main() {
    let g = parse_grammar(GRAMMAR).unwrap();
    println!("size: {}", size(&g));
    let all = enumerate_sentences(&g, DEFAULT_LIMIT, DEFAULT_DEPTH).unwrap();
    for s in all.iter().take(5) {
        println!("  {s}");
    }
    println!("  ... {} sentences", all.len());
    println!("seed 7:");
    for s in sample_sentences(&g, 4, 7, DEFAULT_DEPTH).unwrap() {
        println!("  {s}");
    }
    let open = parse_grammar("hyp :- attr \"<\" number\nattr :- str\n").unwrap();
    println!("open grammar: {}", size(&open));
}
