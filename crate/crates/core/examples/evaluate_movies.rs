//! Evaluate hypotheses against a small movie table and print each verdict
//! with its per-clause breakdown.

use hypogram::dataset::load_csv;
use hypogram::evaluator::{eval_hypothesis, typecheck};
use hypogram::parser::parse_hypothesis;

const CSV: &str = "Title,Year,Genre,Rating
The Godfather,1972,Crime,9.1
Back to the Future,1985,Comedy,8.6
Pulp Fiction,1994,Comedy,8.8
Fight Club,1999,Action,8.7
The Matrix,1999,Science Fiction,7.6
";

const SCHEMA: &str = r#"{"attrs": [
  {"name": "Title", "type": "string"}, {"name": "Year", "type": "number"},
  {"name": "Genre", "type": "string"}, {"name": "Rating", "type": "number"}
], "synthesize_id": true}"#;

fn main() {
    let t = load_csv(CSV, SCHEMA).expect("table loads");
    for text in [
        "Rating[Title='The Godfather'] = 9.1",
        "AVG(Rating)[Genre='Comedy'] > AVG(Rating)[Genre='Action']",
        "count() > 1 [Year=1999 & Genre='Action']",
        "Rating[Genre='Horror'] > 5",
        "AVG(Rating[Year>1985]) > AVG(Rating[Year<1985]) & MAX(Rating) = 9.1",
        "KL(Title, Rating) < 1",
    ] {
        let h = parse_hypothesis(text).unwrap();
        let report = typecheck(&h, &t);
        if !report.ok {
            println!("{text}: rejected ({})", report.issues[0].message);
            continue;
        }
        match eval_hypothesis(&h, &t) {
            Ok(out) => {
                println!("{text}: {}", out.verdict.as_str());
                for c in out.clauses.iter().filter(|_| out.clauses.len() > 1) {
                    println!("    {} -> {}", c.clause, c.verdict.as_str());
                }
            }
            Err(e) => println!("{text}: error {e}"),
        }
    }
}
