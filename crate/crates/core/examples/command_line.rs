//! Drive the command line in-process, as a script would.

use hypogram::cli::run_with;

fn main() {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    let movies = format!("{fixtures}/movies.csv");
    for args in [
        vec!["eval", "Rating[Title='The Godfather'] = 9.1", "--data", &movies],
        vec!["eval", "Rating[Genre='Horror'] > 5", "--data", &movies, "--format", "json"],
        vec!["parse", "r2.cost = 2"],
        vec!["list-functions"],
    ] {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("hypogram").chain(args.iter().copied()), &mut out, &mut err);
        println!("$ hypogram {}\n{}[exit {code}]\n", args.join(" "), String::from_utf8_lossy(&out));
    }
}
