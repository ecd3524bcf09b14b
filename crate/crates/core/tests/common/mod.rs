#![allow(dead_code)]

pub mod reference;

use std::path::PathBuf;

use hypogram::dataset::{load_csv, Table};
use hypogram::parser::parse_grammar;
use hypogram::space::grammar::GrammarSpec;
use hypogram::space::{ground, sample_sentences, DEFAULT_DEPTH};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read(name: &str) -> String {
    let p = fixtures().join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn table(stem: &str) -> Table {
    load_csv(&read(&format!("{stem}.csv")), &read(&format!("{stem}.json"))).unwrap()
}

pub fn grammar(stem: &str) -> GrammarSpec {
    hypogram::parser::parse_grammar(&read(&format!("grammars/{stem}.hg"))).unwrap()
}

/// `(label, text)` pairs from a listing file.
pub fn listing(name: &str) -> Vec<(String, String)> {
    read(name)
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (label, text) = l.split_once(char::is_whitespace).expect("label and text");
            (label.to_string(), text.trim().to_string())
        })
        .collect()
}

pub fn grammar_files() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(fixtures().join("grammars"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "hg"))
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

/// One grammar per alternative of `clause`, so rare shapes get sampled too.
pub fn per_clause(stem: &str) -> Vec<String> {
    let text = read(&format!("grammars/{stem}.hg"));
    let line = text.lines().find(|l| l.trim_start().starts_with("clause")).unwrap();
    let body = line.split_once(":-").unwrap().1;
    body.split(" | ")
        .map(|alt| text.replace(line, &format!("clause :- {}", alt.trim())))
        .collect()
}

/// Sentences drawn from each clause shape of a grounded grammar.
pub fn draw(stem: &str, t: &Table, per_shape: usize, seed: u64) -> Vec<String> {
    let mut out = Vec::new();
    for (i, g) in per_clause(stem).iter().enumerate() {
        let g = ground(&parse_grammar(g).unwrap(), t).unwrap();
        out.extend(sample_sentences(&g, per_shape, seed + i as u64, DEFAULT_DEPTH).unwrap());
    }
    out
}
