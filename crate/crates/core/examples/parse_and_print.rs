//! Parse hypotheses, show the canonical form and the AST as JSON.

use hypogram::ast::pretty_print;
use hypogram::parser::parse_hypothesis;

fn main() {
    for text in [
        "r2.cost = 2",
        "(cost < price)[market='US']",
        "avg(Speed)[Hour ∈ [0,7)] > avg(Speed)[Hour ∉ [0,7)]",
        "Rating[Title='The Godfather' = 9.1",
    ] {
        match parse_hypothesis(text) {
            Ok(h) => {
                println!("{text}\n  canonical: {}", pretty_print(&h));
                println!("  ast: {}", serde_json::to_string(&h).unwrap());
            }
            Err(e) => println!("{text}\n  error: {e}"),
        }
    }
}
