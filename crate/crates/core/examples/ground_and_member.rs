//! Ground a grammar in a table, then ask which hypotheses it contains.

use hypogram::dataset::load_csv;
use hypogram::parser::parse_grammar;
use hypogram::space::{ground, member_text, size};

fn main() {
    let t = load_csv(
        "id,month,market,cost,price\n1,1,US,1,7\n2,2,US,2,8\n3,3,US,3,9\n",
        r#"{"attrs":[{"name":"id","type":"number"},{"name":"month","type":"number"},
            {"name":"market","type":"string"},{"name":"cost","type":"number"},{"name":"price","type":"number"}]}"#,
    )
    .unwrap();
    let g = parse_grammar(
        "hyp   :- expr \"<\" 10\nexpr  :- func \"(cost,\" attr1 \")\"\nfunc  :- KL | CORR | EMD\nattr1 :- str\n",
    )
    .unwrap();
    println!("before grounding: {}", size(&g));
    let grounded = ground(&g, &t).unwrap();
    println!("after grounding: {}\n{grounded}", size(&grounded));
    for text in ["KL(cost, price) < 10", "KL(cost, market) < 10", "KL(price, cost) < 10"] {
        println!("{text:25} structural={} typed={}", member_text(&grounded, text, None), member_text(&grounded, text, Some(&t)));
    }
}
