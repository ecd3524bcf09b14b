//! The `hypogram` command line.
//!
//! Results go to stdout, diagnostics to stderr. With `--format json` stdout
//! carries exactly one JSON document per run, errors included, shaped as in
//! `schema/output.schema.json` at the repository root.

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::ast::{pretty_print, Hypothesis};
use crate::dataset::{load_csv_with, DataError, LoadOptions, SchemaFile, Table};
use crate::evaluator::{eval_hypothesis_with, typecheck, EvalOptions, Verdict};
use crate::funcs::{self, FunctionConfig};
use crate::parser::{parse_grammar, parse_hypothesis, ParseError};
use crate::space::{self, GrammarSpec, GroundOptions, SpaceError, SpaceSize, DEFAULT_DEPTH, DEFAULT_LIMIT};

pub mod exit {
    pub const TRUE: i32 = 0;
    pub const FALSE: i32 = 1;
    pub const VACUOUS: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const TYPE: i32 = 4;
    pub const EVAL: i32 = 5;
    pub const SPACE: i32 = 6;
    pub const IO: i32 = 7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "hypogram", version, about = "Check hypotheses against a table and reason about spaces of them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// CSV data file.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// JSON schema sidecar; defaults to the data path with a `.json` extension.
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,
    /// Skip rows with empty cells instead of failing.
    #[arg(long, global = true)]
    pub drop_incomplete_rows: bool,
    /// Function library settings (TOML or JSON).
    #[arg(long, global = true, alias = "functions")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args, Clone)]
pub struct HypArg {
    /// Hypothesis text.
    pub hypothesis: Option<String>,
    /// Read the hypothesis from a file instead.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct SpaceArgs {
    /// Grammar file (`.hg`).
    #[arg(long)]
    pub grammar: PathBuf,
    /// Bin numeric constants into this many evenly spaced values when grounding.
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a hypothesis and print it canonically.
    Parse(HypArg),
    /// Type-check a hypothesis against a table.
    Check(HypArg),
    /// Evaluate a hypothesis against a table.
    Eval {
        #[command(flatten)]
        hyp: HypArg,
        /// Report clauses over no rows as true.
        #[arg(long)]
        vacuous_as_true: bool,
    },
    /// Bind a grammar to a table's attributes, functions and values.
    Ground(SpaceArgs),
    /// Count the sentences of a grammar.
    Size {
        #[command(flatten)]
        space: SpaceArgs,
        /// Count with recursion and repetition bounded by this depth.
        #[arg(long)]
        depth: Option<u8>,
    },
    /// List every sentence of a finite grammar.
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = DEFAULT_LIMIT, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        limit: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u8,
    },
    /// Draw distinct sentences uniformly at random.
    Sample {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u8,
    },
    /// Is a hypothesis in a grammar's space? Exit 0 if so, 1 if not.
    Member {
        #[command(flatten)]
        hyp: HypArg,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Is the first grammar's space inside the second's? Exit 0 if so, 1 if not.
    Contains {
        #[arg(long, num_args = 2, required = true)]
        grammar: Vec<PathBuf>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_LIMIT, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        limit: usize,
    },
    /// Sentences shared by two grammars.
    Intersect {
        #[arg(long, num_args = 2, required = true)]
        grammar: Vec<PathBuf>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_LIMIT, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        limit: usize,
    },
    /// Print the registered functions and their signatures.
    ListFunctions,
}

/// A failed run: exit code plus what to say about it.
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
    detail: Option<Json>,
}

impl Failure {
    fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code, kind, message: message.into(), detail: None }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure::new(exit::IO, "io", message)
    }

    fn parse(e: &ParseError) -> Self {
        Failure { detail: Some(json!({ "span": e.span, "expected": e.expected })), ..Failure::new(exit::PARSE, "parse", e.to_string()) }
    }

    fn space(e: SpaceError) -> Self {
        match e {
            SpaceError::EmptyTable => Failure::io(e.to_string()),
            SpaceError::NotAHypothesis { .. } => Failure::new(exit::PARSE, "parse", e.to_string()),
            _ => Failure::new(exit::SPACE, "space", e.to_string()),
        }
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure::io(e.to_string())
    }
}

/// Everything a successful run reports.
struct Report {
    code: i32,
    text: String,
    json: Json,
}

struct Ctx<'a> {
    common: &'a Common,
    color: bool,
}

/// Parse `argv` (program name first), run and return the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_inner(argv, out, err, false)
}

/// [`run_with`] on the process streams, colouring text output on a terminal
/// unless `NO_COLOR` is set.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = std::io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty());
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_inner(argv, &mut stdout.lock(), &mut stderr.lock(), color)
}

fn run_inner<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::IO } else { exit::TRUE };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let ctx = Ctx { common: &cli.common, color };
    let name = command_name(&cli.command);
    let json_out = cli.common.format == Format::Json;
    let result = dispatch(&cli.command, &ctx);
    let written = match result {
        Ok(rep) => {
            let w = if json_out {
                let mut doc = rep.json;
                doc["command"] = json!(name);
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))
            } else {
                write!(out, "{}", rep.text)
            };
            w.map(|_| rep.code)
        }
        Err(f) => {
            let _ = writeln!(err, "hypogram {name}: {}", f.message);
            let w = if json_out {
                let mut e = json!({ "kind": f.kind, "message": f.message, "exit_code": f.code });
                if let Some(Json::Object(extra)) = f.detail {
                    for (k, v) in extra {
                        e[k] = v;
                    }
                }
                let doc = json!({ "command": name, "error": e });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))
            } else {
                Ok(())
            };
            w.map(|_| f.code)
        }
    };
    written.unwrap_or(exit::IO)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse(_) => "parse",
        Command::Check(_) => "check",
        Command::Eval { .. } => "eval",
        Command::Ground(_) => "ground",
        Command::Size { .. } => "size",
        Command::Enumerate { .. } => "enumerate",
        Command::Sample { .. } => "sample",
        Command::Member { .. } => "member",
        Command::Contains { .. } => "contains",
        Command::Intersect { .. } => "intersect",
        Command::ListFunctions => "list-functions",
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

impl Ctx<'_> {
    fn table(&self) -> Result<Option<Table>, Failure> {
        let Some(data) = &self.common.data else {
            return Ok(None);
        };
        let schema_path = self.common.schema.clone().unwrap_or_else(|| data.with_extension("json"));
        let csv = read(data)?;
        let schema: SchemaFile = serde_json::from_str(&read(&schema_path)?)
            .map_err(|e| Failure::io(format!("{}: {e}", schema_path.display())))?;
        let opts = LoadOptions { drop_incomplete_rows: self.common.drop_incomplete_rows };
        Ok(Some(load_csv_with(&csv, &schema, opts).map_err(|e| Failure::io(format!("{}: {e}", data.display())))?))
    }

    fn require_table(&self) -> Result<Table, Failure> {
        self.table()?.ok_or_else(|| Failure::io("this command needs --data"))
    }

    fn functions(&self) -> Result<FunctionConfig, Failure> {
        match &self.common.config {
            Some(p) => FunctionConfig::load(p).map_err(|e| Failure::io(e.to_string())),
            None => Ok(FunctionConfig::default()),
        }
    }

    fn hypothesis(&self, arg: &HypArg) -> Result<Hypothesis, Failure> {
        let text = match (&arg.hypothesis, &arg.file) {
            (Some(_), Some(_)) => return Err(Failure::io("give the hypothesis inline or with --file, not both")),
            (Some(t), None) => t.clone(),
            (None, Some(p)) => read(p)?,
            (None, None) => return Err(Failure::io("no hypothesis given")),
        };
        parse_hypothesis(text.trim()).map_err(|e| Failure::parse(&e))
    }

    /// A grammar file, grounded when a table is given.
    fn grammar(&self, path: &Path, bins: Option<usize>, table: Option<&Table>) -> Result<GrammarSpec, Failure> {
        let g = parse_grammar(&read(path)?).map_err(|e| Failure::new(exit::PARSE, "parse", format!("{}: {e}", path.display())))?;
        match table {
            Some(t) => {
                let opts = GroundOptions { bins, ..GroundOptions::default() };
                space::ground_with(&g, t, &opts).map_err(Failure::space)
            }
            None => Ok(g),
        }
    }

    fn paint(&self, v: Verdict) -> String {
        if !self.color {
            return v.as_str().to_string();
        }
        let code = match v {
            Verdict::True => "32",
            Verdict::False => "31",
            Verdict::Vacuous => "33",
        };
        format!("\x1b[{code}m{}\x1b[0m", v.as_str())
    }
}

fn lines(items: &[String]) -> String {
    items.iter().map(|s| format!("{s}\n")).collect()
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<Report, Failure> {
    match cmd {
        Command::Parse(arg) => {
            let h = ctx.hypothesis(arg)?;
            let canonical = pretty_print(&h);
            Ok(Report { code: exit::TRUE, text: format!("{canonical}\n"), json: json!({ "canonical": canonical, "ast": h }) })
        }
        Command::Check(arg) => {
            let h = ctx.hypothesis(arg)?;
            let t = ctx.require_table()?;
            let report = typecheck(&h, &t);
            let text = if report.ok {
                "ok\n".to_string()
            } else {
                report.issues.iter().map(|i| format!("{}: {}\n", kind_label(&i.kind), i.message)).collect()
            };
            let code = if report.ok { exit::TRUE } else { exit::TYPE };
            Ok(Report { code, text, json: json!({ "ok": report.ok, "issues": report.issues }) })
        }
        Command::Eval { hyp, vacuous_as_true } => {
            let h = ctx.hypothesis(hyp)?;
            let t = ctx.require_table()?;
            let report = typecheck(&h, &t);
            if !report.ok {
                let message = report.issues.iter().map(|i| format!("{}: {}", kind_label(&i.kind), i.message)).collect::<Vec<_>>().join("; ");
                return Err(Failure { detail: Some(json!({ "issues": report.issues })), ..Failure::new(exit::TYPE, "type", message) });
            }
            let opts = EvalOptions { vacuous_as_true: *vacuous_as_true, functions: ctx.functions()?, ..EvalOptions::default() };
            let outcome = eval_hypothesis_with(&h, &t, &opts).map_err(|e| Failure::new(exit::EVAL, "eval", e.to_string()))?;
            let code = match outcome.verdict {
                Verdict::True => exit::TRUE,
                Verdict::False => exit::FALSE,
                Verdict::Vacuous => exit::VACUOUS,
            };
            let mut text = format!("{}\n", ctx.paint(outcome.verdict));
            if outcome.clauses.len() > 1 || outcome.clauses.iter().any(|c| c.note.is_some()) {
                for c in &outcome.clauses {
                    let note = c.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default();
                    text.push_str(&format!("  {}: {}{note}\n", c.clause, ctx.paint(c.verdict)));
                }
            }
            let mut doc = serde_json::to_value(&outcome).expect("outcome serializes");
            doc["hypothesis"] = json!(pretty_print(&h));
            Ok(Report { code, text, json: doc })
        }
        Command::Ground(s) => {
            let t = ctx.require_table()?;
            let g = ctx.grammar(&s.grammar, s.bins, Some(&t))?;
            let text = g.to_string();
            Ok(Report { code: exit::TRUE, json: json!({ "grammar": text, "size": space::size(&g) }), text })
        }
        Command::Size { space: s, depth } => {
            let t = ctx.table()?;
            let g = ctx.grammar(&s.grammar, s.bins, t.as_ref())?;
            let n = match depth {
                Some(d) => space::bounded_size(&g, *d),
                None => space::size(&g),
            };
            let mut doc = json!({ "size": n });
            if let SpaceSize::Unbounded(items) = &n {
                doc["unbounded"] = json!(items);
            }
            Ok(Report { code: exit::TRUE, text: format!("{n}\n"), json: doc })
        }
        Command::Enumerate { space: s, limit, depth } => {
            let t = ctx.table()?;
            let g = ctx.grammar(&s.grammar, s.bins, t.as_ref())?;
            let all = space::enumerate_sentences(&g, *limit, *depth).map_err(Failure::space)?;
            Ok(Report { code: exit::TRUE, text: lines(&all), json: json!({ "count": all.len(), "sentences": all }) })
        }
        Command::Sample { space: s, k, seed, depth } => {
            let t = ctx.table()?;
            let g = ctx.grammar(&s.grammar, s.bins, t.as_ref())?;
            let drawn = space::sample_sentences(&g, *k, *seed, *depth).map_err(Failure::space)?;
            Ok(Report { code: exit::TRUE, text: lines(&drawn), json: json!({ "seed": seed, "k": k, "sentences": drawn }) })
        }
        Command::Member { hyp, space: s } => {
            let h = ctx.hypothesis(hyp)?;
            let t = ctx.table()?;
            let g = ctx.grammar(&s.grammar, s.bins, t.as_ref())?;
            let yes = space::member(&g, &h, t.as_ref());
            let code = if yes { exit::TRUE } else { exit::FALSE };
            Ok(Report { code, text: format!("{yes}\n"), json: json!({ "hypothesis": pretty_print(&h), "member": yes }) })
        }
        Command::Contains { grammar, bins, limit } => {
            let t = ctx.table()?;
            let g1 = ctx.grammar(&grammar[0], *bins, t.as_ref())?;
            let g2 = ctx.grammar(&grammar[1], *bins, t.as_ref())?;
            let c = space::contains(&g1, &g2, *limit).map_err(Failure::space)?;
            let mut text = format!("{}\nleft: {}\nright: {}\n", c.subset, c.left, c.right);
            if let Some(s) = c.superset {
                text.push_str(&format!("reverse: {s}\n"));
            }
            if let Some(x) = &c.counterexample {
                text.push_str(&format!("counterexample: {x}\n"));
            }
            let code = if c.subset { exit::TRUE } else { exit::FALSE };
            let mut doc = serde_json::to_value(&c).expect("containment serializes");
            doc["equal"] = json!(c.equal());
            Ok(Report { code, text, json: doc })
        }
        Command::Intersect { grammar, bins, limit } => {
            let t = ctx.table()?;
            let g1 = ctx.grammar(&grammar[0], *bins, t.as_ref())?;
            let g2 = ctx.grammar(&grammar[1], *bins, t.as_ref())?;
            let i = space::intersect(&g1, &g2, *limit).map_err(Failure::space)?;
            let text = format!(
                "left: {}\nright: {}\nshared: {}\n{}",
                i.card_left,
                i.card_right,
                i.card_intersection,
                lines(&i.sentences)
            );
            Ok(Report { code: exit::TRUE, text, json: serde_json::to_value(&i).expect("intersection serializes") })
        }
        Command::ListFunctions => {
            let reg = funcs::registry();
            let text = reg.iter().map(|f| format!("{f}\n    {}\n", f.summary)).collect();
            let list: Vec<Json> = reg
                .iter()
                .map(|f| {
                    let shown = f.to_string();
                    let sigs: Vec<&str> = shown.lines().map(|l| l.split("    aliases:").next().unwrap_or(l)).collect();
                    json!({ "name": f.name, "aliases": f.aliases, "signatures": sigs, "summary": f.summary })
                })
                .collect();
            Ok(Report { code: exit::TRUE, text, json: json!({ "functions": list }) })
        }
    }
}

fn kind_label(k: &crate::evaluator::IssueKind) -> String {
    serde_json::to_value(k).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}
