//! Static checks that run before any data is touched.

use hypogram::dataset::load_csv;
use hypogram::evaluator::typecheck;
use hypogram::parser::parse_hypothesis;

fn main() {
    let t = load_csv(
        "id,month,market,cost,price\n1,1,US,1,7\n2,2,US,2,8\n3,3,US,3,9\n4,4,US,4,10\n5,4,EU,5,11\n6,4,EU,6,12\n",
        r#"{"attrs":[{"name":"id","type":"number"},{"name":"month","type":"number"},
            {"name":"market","type":"string"},{"name":"cost","type":"number"},{"name":"price","type":"number"}]}"#,
    )
    .unwrap();
    for text in [
        "KL(market, price) < 1",
        "cost[market='US'] < price[market='EU']",
        "NOPE(cost) < 1",
        "AVG(cost, price) < 1",
        "market ~ '[' ",
        "discount < 1",
        "cost[market='US'] < price[market='US']",
    ] {
        let report = typecheck(&parse_hypothesis(text).unwrap(), &t);
        let kinds: Vec<String> = report.issues.iter().map(|i| format!("{:?}: {}", i.kind, i.message)).collect();
        println!("{text:45} {}", if report.ok { "ok".to_string() } else { kinds.join("; ") });
    }
}
