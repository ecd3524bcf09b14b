//! Call library functions directly on vectors.

use hypogram::ast::Scalar;
use hypogram::dataset::AttrType;
use hypogram::funcs::{call, registry, CallContext, FunctionConfig, Value, Vector};

fn column(xs: &[f64]) -> Value {
    Value::Vector(Vector {
        rows: (0..xs.len()).collect(),
        values: xs.iter().copied().map(Scalar::Number).collect(),
        kind: AttrType::Number,
        computed: false,
    })
}

fn main() {
    let cfg = FunctionConfig::default();
    let ctx = CallContext { rows: 8, config: &cfg };
    let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
    let y = [2.1, 3.9, 6.2, 7.8, 10.1, 12.2, 13.8, 25.0];
    for (name, args) in [
        ("AVG", vec![column(&y)]),
        ("STDEV", vec![column(&y)]),
        ("CORR", vec![column(&x), column(&y)]),
        ("KL", vec![column(&x), column(&y)]),
        ("EMD", vec![column(&x), column(&y)]),
        ("KS_normal", vec![column(&y)]),
        ("fit_LM", vec![column(&x), column(&y)]),
        ("fit_Kmeans", vec![column(&y)]),
    ] {
        println!("{name:10} {}", call(name, &args, &ctx).unwrap());
    }
    let model = call("fit_LM", &[column(&x), column(&y)], &ctx).unwrap();
    println!("SRES       {}", call("SRES", &[model, column(&x), column(&y)], &ctx).unwrap());
    println!("\n{} registered functions", registry().len());
}
