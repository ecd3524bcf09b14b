//! The command line, driven in-process.

mod common;

use hypogram::cli::run_with;
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let dir = common::fixtures();
    let argv: Vec<String> = std::iter::once("hypogram".to_string())
        .chain(args.iter().map(|a| match a.strip_prefix('@') {
            Some(rel) => dir.join(rel).display().to_string(),
            None => a.to_string(),
        }))
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(common::fixtures().join("../schema/output.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let r = run(&a);
    let v: Value = serde_json::from_str(&r.out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", r.out));
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?} output violates the schema: {errors:?}\n{v:#}");
    (r.code, v)
}

const MOVIES: [&str; 4] = ["--data", "@movies.csv", "--schema", "@movies.json"];

fn with(base: &[&str], more: &[&str]) -> Vec<String> {
    base.iter().chain(more).map(|s| s.to_string()).collect()
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn eval_godfather_is_true() {
    let args = with(&["eval"], &MOVIES);
    let mut args = refs(&args);
    args.push("Rating[Title='The Godfather'] = 9.1");
    let (code, v) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "true");
}

#[test]
fn eval_exit_codes() {
    for (hyp, code) in [
        ("AVG(Rating)[Genre='Comedy'] > AVG(Rating)[Genre='Action']", 1),
        ("Rating[Genre='Horror'] > 5", 2),
        ("Rating[Title='The Godfather' = 9.1", 3),
        ("KL(Title, Rating) < 1", 4),
        ("Rating = Year", 1),
        ("KS_normal(Rating[Genre='Comedy']) > 0.05", 5),
    ] {
        let r = run(&[&["eval", hyp][..], &MOVIES].concat());
        assert_eq!(r.code, code, "{hyp}: {}{}", r.out, r.err);
        let (jcode, _) = json(&[&["eval", hyp][..], &MOVIES].concat());
        assert_eq!(jcode, code);
    }
}

#[test]
fn vacuous_as_true_flag() {
    let r = run(&[&["eval", "Rating[Genre='Horror'] > 5", "--vacuous-as-true"][..], &MOVIES].concat());
    assert_eq!(r.code, 0);
    assert_eq!(r.out.lines().next(), Some("true"));
}

#[test]
fn schema_defaults_to_sidecar() {
    let r = run(&["size", "--grammar", "@grammars/similarity.hg", "--data", "@relation1.csv"]);
    assert_eq!((r.code, r.out.as_str()), (0, "12\n"));
}

#[test]
fn kl_on_strings_is_a_type_error() {
    let (code, v) = json(&["eval", "KL(market, price) < 1", "--data", "@relation1.csv"]);
    assert_eq!(code, 4);
    assert_eq!(v["error"]["issues"][0]["kind"], "param-kind");
    let r = run(&["check", "cost[market='US'] < price[market='EU']", "--data", "@relation1.csv"]);
    assert_eq!(r.code, 4);
    assert!(r.out.starts_with("row-alignment"), "{}", r.out);
}

#[test]
fn hypothesis_from_file() {
    let dir = std::env::temp_dir().join(format!("hypogram-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("h.txt");
    std::fs::write(&p, "count() > 1 [Year=1999 & Genre='Action']\n").unwrap();
    let r = run(&[&["eval", "--file", p.to_str().unwrap()][..], &MOVIES].concat());
    assert_eq!(r.code, 1);
    let both = run(&[&["eval", "2 = 2", "--file", p.to_str().unwrap()][..], &MOVIES].concat());
    assert_eq!(both.code, 7);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn io_errors() {
    assert_eq!(run(&["eval", "2 = 2", "--data", "/nonexistent.csv"]).code, 7);
    assert_eq!(run(&["eval", "2 = 2"]).code, 7);
    assert_eq!(run(&["bogus"]).code, 7);
    assert_eq!(run(&["enumerate", "--grammar", "@grammars/year.hg", "--limit", "0"]).code, 7);
    let (code, v) = json(&["eval", "2 = 2", "--data", "/nonexistent.csv"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (7, Some("io")));
    let (code, _) = json(&[&["eval", "2 = 2", "--config", "/nonexistent.toml"][..], &MOVIES].concat());
    assert_eq!(code, 7);
    let (code, _) = json(&[&["eval", "KL(Rating, Rating) < 10", "--config", "@functions.toml"][..], &MOVIES].concat());
    assert_eq!(code, 0);
}

#[test]
fn space_commands() {
    let (code, v) = json(&[&["enumerate", "--grammar", "@grammars/year.hg"][..], &MOVIES].concat());
    assert_eq!((code, v["count"].as_u64()), (0, Some(4)));

    let (code, v) = json(&["size", "--grammar", "@grammars/conjunction.hg"]);
    assert_eq!((code, v["size"].as_str()), (0, Some("unbounded")));
    let (code, v) = json(&["size", "--grammar", "@grammars/similar_funcs.hg", "--depth", "2"]);
    assert_eq!((code, v["size"].as_u64()), (0, Some(3)));

    let (code, v) = json(&["enumerate", "--grammar", "@grammars/conjunction.hg"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (6, Some("space")));
    let (code, _) = json(&[&["enumerate", "--grammar", "@grammars/movies_space.hg", "--limit", "10"][..], &MOVIES].concat());
    assert_eq!(code, 6);

    let (code, v) = json(&[&["sample", "--grammar", "@grammars/movies_space.hg", "--k", "5", "--seed", "7"][..], &MOVIES].concat());
    assert_eq!((code, v["sentences"].as_array().map(Vec::len)), (0, Some(5)));

    let (code, v) = json(&["contains", "--grammar", "@grammars/func_kl.hg", "@grammars/similar_funcs.hg"]);
    assert_eq!((code, &v["subset"], &v["equal"]), (0, &Value::Bool(true), &Value::Bool(false)));
    let (code, v) = json(&["contains", "--grammar", "@grammars/similar_funcs.hg", "@grammars/func_kl.hg"]);
    assert_eq!((code, v["counterexample"].is_string()), (1, true));

    let (code, v) = json(&["intersect", "--grammar", "@grammars/similar_funcs.hg", "@grammars/func_kl.hg"]);
    assert_eq!((code, v["card_intersection"].as_u64()), (0, Some(1)));

    let (code, v) = json(&[&["ground", "--grammar", "@grammars/similarity.hg"][..], &["--data", "@relation1.csv"]].concat());
    assert_eq!((code, v["size"].as_u64()), (0, Some(12)));
    assert!(v["grammar"].as_str().unwrap().contains("%provenance H_D"));
}

#[test]
fn membership_exit_codes() {
    let g = ["--grammar", "@grammars/similarity.hg", "--data", "@relation1.csv"];
    assert_eq!(run(&[&["member", "KL(cost, price) < 10"][..], &g].concat()).code, 0);
    assert_eq!(run(&[&["member", "KL(cost, id) < 10"][..], &g].concat()).code, 1);
    assert_eq!(run(&[&["member", "KL(price, cost) < 10"][..], &g].concat()).code, 1);
    let (code, v) = json(&[&["member", "KL(cost, price) < 10"][..], &g].concat());
    assert_eq!((code, &v["member"]), (0, &Value::Bool(true)));
}

#[test]
fn parse_and_list() {
    let (code, v) = json(&["parse", "r2.cost = 2"]);
    assert_eq!((code, v["canonical"].as_str()), (0, Some("cost[id=2] = 2")));
    let (code, v) = json(&["parse", "2 ="]);
    assert_eq!((code, v["error"]["kind"].as_str()), (3, Some("parse")));
    let (code, v) = json(&["list-functions"]);
    assert_eq!(code, 0);
    assert!(v["functions"].as_array().unwrap().iter().any(|f| f["name"] == "SRES"));
    let r = run(&["list-functions"]);
    assert!(r.out.contains("KS_normal(vector-number) -> scalar-number"));
}

#[test]
fn grammar_parse_errors_exit_three() {
    let dir = std::env::temp_dir().join(format!("hypogram-g-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bad.hg");
    std::fs::write(&p, "hyp :- expr \"<\" 10\n").unwrap();
    let r = run(&["size", "--grammar", p.to_str().unwrap()]);
    assert_eq!(r.code, 3, "{}", r.err);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_output_has_no_escape_codes() {
    let r = run(&[&["eval", "Rating[Genre='Horror'] > 5"][..], &MOVIES].concat());
    assert!(!r.out.contains('\x1b'));
    assert!(r.err.is_empty());
}
