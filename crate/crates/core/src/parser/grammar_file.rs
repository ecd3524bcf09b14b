//! `.hg` grammar files.
//!
//! ```text
//! # comment
//! %provenance H_D
//! hyp  :- expr "<" 10
//! expr :- func "(cost," attr1 ")"
//! func :- KL | CORR | EMD
//! attr1 :- str
//! ```
//!
//! A line without a top-level `:-` continues the previous rule. Quoted text is
//! a terminal and is tokenized like hypothesis text, so whitespace inside it
//! does not matter. Bare words are rule names when such a rule exists,
//! builtin classes (`number`, `str`, `datetime`, `boolean`), or terminals
//! when they start with an uppercase letter or name a registered function.

use indexmap::IndexMap;
use thiserror::Error;

use super::lexer::{tokenize, TokenKind};
use super::ParseError;
use crate::ast::Span;
use crate::funcs;
use crate::space::grammar::{copy_base, Alternative, Builtin, GrammarSpec, Provenance, Repeat, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrammarError {
    #[error("grammar syntax error {0}")]
    Parse(#[from] ParseError),
    #[error("undefined nonterminal `{name}` at {}..{}", span.start, span.end)]
    UndefinedNonterminal { name: String, span: Span },
    #[error("rule `{name}` is defined twice (second definition at {}..{})", span.start, span.end)]
    DuplicateRule { name: String, span: Span },
    #[error("grammar has no rules")]
    Empty,
}

pub fn parse_grammar(text: &str) -> Result<GrammarSpec, GrammarError> {
    let mut raw: IndexMap<String, (Span, Vec<GTok>)> = IndexMap::new();
    let mut start = None;
    let mut provenance = Provenance::Custom;
    let mut current: Option<String> = None;

    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let body = strip_comment(line);
        let trimmed = body.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let lead = body.len() - trimmed.len();
        if let Some(directive) = trimmed.strip_prefix('%') {
            let mut parts = directive.split_whitespace();
            let span = Span::new(line_start + lead, line_start + body.trim_end().len());
            match (parts.next(), parts.next(), parts.next()) {
                (Some("start"), Some(name), None) => start = Some((name.to_string(), span)),
                (Some("provenance"), Some(label), None) => {
                    provenance = Provenance::from_label(label).ok_or_else(|| {
                        ParseError::new(span, vec!["H, H_D, H_A, H_V or custom".into()], format!("unknown provenance `{label}`"))
                    })?;
                }
                _ => {
                    return Err(ParseError::new(
                        span,
                        vec!["%start NAME or %provenance LABEL".into()],
                        "unknown directive",
                    )
                    .into())
                }
            }
            continue;
        }
        let (body_offset, body_text) = match find_arrow(body) {
            Some(arrow) => {
                let name = body[..arrow].trim();
                let name_at = line_start + lead;
                let name_span = Span::new(name_at, name_at + name.len().max(1));
                if !is_rule_name(name) {
                    return Err(ParseError::new(name_span, vec!["rule name".into()], "rules are written `name :- alternatives`").into());
                }
                if raw.contains_key(name) {
                    return Err(GrammarError::DuplicateRule { name: name.into(), span: name_span });
                }
                raw.insert(name.to_string(), (name_span, Vec::new()));
                current = Some(name.to_string());
                (line_start + arrow + 2, &body[arrow + 2..])
            }
            None => {
                if current.is_none() {
                    let span = Span::new(line_start + lead, line_start + body.trim_end().len());
                    return Err(ParseError::new(span, vec!["`:-`".into()], "text before the first rule").into());
                }
                (line_start, body)
            }
        };
        let toks = lex_body(body_text, body_offset)?;
        let name = current.as_ref().expect("rule set above");
        raw.get_mut(name).expect("rule exists").1.extend(toks);
    }

    if raw.is_empty() {
        return Err(GrammarError::Empty);
    }

    let mut rules: IndexMap<String, Vec<Alternative>> = IndexMap::new();
    let mut words = Vec::new();
    for (name, (span, toks)) in &raw {
        let mut p = BodyParser { toks, pos: 0, end: span.end, words: &mut words };
        let alts = p.alternatives()?;
        if p.pos < toks.len() {
            let t = &toks[p.pos];
            return Err(ParseError::new(t.span, vec!["`|` or symbol".into()], "unbalanced `)`").into());
        }
        rules.insert(name.clone(), alts);
    }

    // implicit copies: `const1` with only `const` defined copies its alternatives
    let defined: Vec<String> = rules.keys().cloned().collect();
    for (word, _) in &words {
        if rules.contains_key(word) {
            continue;
        }
        if let Some(base) = copy_base(word) {
            if defined.iter().any(|d| d == base) {
                let alts = rules[base].clone();
                rules.insert(word.clone(), alts);
            }
        }
    }

    let known: Vec<String> = rules.keys().cloned().collect();
    for alts in rules.values_mut() {
        for alt in alts.iter_mut() {
            resolve_alt(alt, &known, &words)?;
        }
    }

    let start = match start {
        Some((name, span)) => {
            if !rules.contains_key(&name) {
                return Err(GrammarError::UndefinedNonterminal { name, span });
            }
            name
        }
        None if rules.contains_key("hyp") => "hyp".to_string(),
        None => rules.keys().next().cloned().expect("non-empty"),
    };
    Ok(GrammarSpec { rules, start, provenance })
}

fn is_rule_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn strip_comment(line: &str) -> &str {
    let mut quote = None;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match (quote, c) {
            (Some(_), '\\') => escaped = true,
            (Some(q), c) if c == q => quote = None,
            (None, '"' | '\'') => quote = Some(c),
            (None, '#') => return &line[..i],
            _ => {}
        }
    }
    line.trim_end_matches(['\n', '\r'])
}

fn find_arrow(line: &str) -> Option<usize> {
    let mut quote = None;
    let mut escaped = false;
    let bytes = line.as_bytes();
    for (i, c) in line.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match (quote, c) {
            (Some(_), '\\') => escaped = true,
            (Some(q), c) if c == q => quote = None,
            (None, '"' | '\'') => quote = Some(c),
            (None, ':') if bytes.get(i + 1) == Some(&b'-') => return Some(i),
            _ => {}
        }
    }
    None
}

#[derive(Debug, Clone)]
enum GKind {
    Term(Vec<TokenKind>),
    Word(String),
    Open,
    Close,
    Bar,
    Postfix(Repeat),
}

#[derive(Debug, Clone)]
struct GTok {
    kind: GKind,
    span: Span,
}

const BARE: [&str; 21] = [
    "<=", ">=", "!=", "==", "=", "<", ">", "~", "≤", "≥", "≠", "∈", "∉", "&", "!", ",", "[", "]", "{", "}", ".",
];

fn lex_body(text: &str, base: usize) -> Result<Vec<GTok>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < text.len() {
        let c = text[i..].chars().next().expect("in bounds");
        let start = i;
        let span = |end: usize| Span::new(base + start, base + end);
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        match c {
            '(' | ')' | '|' | '?' | '*' | '+' => {
                i += 1;
                let kind = match c {
                    '(' => GKind::Open,
                    ')' => GKind::Close,
                    '|' => GKind::Bar,
                    '?' => GKind::Postfix(Repeat::Optional),
                    '*' => GKind::Postfix(Repeat::ZeroOrMore),
                    _ => GKind::Postfix(Repeat::OneOrMore),
                };
                out.push(GTok { kind, span: span(i) });
                continue;
            }
            '"' => {
                let mut content = String::new();
                i += 1;
                loop {
                    let Some(ch) = text[i..].chars().next() else {
                        return Err(ParseError::new(span(text.len()), vec!["`\"`".into()], "unterminated terminal"));
                    };
                    i += ch.len_utf8();
                    match ch {
                        '"' => break,
                        '\\' => {
                            let Some(e) = text[i..].chars().next() else { continue };
                            i += e.len_utf8();
                            if e != '"' && e != '\\' {
                                content.push('\\');
                            }
                            content.push(e);
                        }
                        other => content.push(other),
                    }
                }
                let toks = tokenize(&content).map_err(|e| {
                    ParseError::new(span(i), e.expected, format!("in terminal: {}", e.message))
                })?;
                let kinds = toks.into_iter().map(|t| t.kind).collect();
                out.push(GTok { kind: GKind::Term(kinds), span: span(i) });
                continue;
            }
            _ => {}
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let word_byte = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
            i += 1;
            while i < bytes.len() {
                if word_byte(bytes[i]) || (bytes[i] == b'-' && i + 1 < bytes.len() && word_byte(bytes[i + 1])) {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push(GTok { kind: GKind::Word(text[start..i].to_string()), span: span(i) });
            continue;
        }
        // numbers, single-quoted strings, dates and operator symbols are
        // terminals; the hypothesis lexer decides where they end
        let piece_end = if c == '\'' {
            let mut j = i + 1;
            let mut esc = false;
            while j < bytes.len() {
                let b = bytes[j];
                j += 1;
                if esc {
                    esc = false;
                } else if b == b'\\' {
                    esc = true;
                } else if b == b'\'' {
                    break;
                }
            }
            j
        } else if c.is_ascii_digit() || c == '-' || c == '@' || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || b".:-+".contains(&bytes[j])) {
                if (bytes[j] == b'-' || bytes[j] == b'+') && !matches!(bytes[j - 1], b'e' | b'E') && c != '@' {
                    break;
                }
                j += 1;
            }
            j
        } else if let Some(sym) = BARE.iter().find(|s| text[i..].starts_with(**s)) {
            i + sym.len()
        } else {
            return Err(ParseError::new(span(i + c.len_utf8()), vec!["grammar symbol".into()], format!("unexpected `{c}`")));
        };
        let toks = tokenize(&text[i..piece_end]).map_err(|e| ParseError::new(span(piece_end), e.expected, e.message))?;
        i = piece_end;
        let kinds = toks.into_iter().map(|t| t.kind).collect();
        out.push(GTok { kind: GKind::Term(kinds), span: span(i) });
    }
    Ok(out)
}

struct BodyParser<'a> {
    toks: &'a [GTok],
    pos: usize,
    end: usize,
    words: &'a mut Vec<(String, Span)>,
}

impl BodyParser<'_> {
    fn alternatives(&mut self) -> Result<Vec<Alternative>, ParseError> {
        let mut alts = vec![self.sequence()?];
        while matches!(self.toks.get(self.pos).map(|t| &t.kind), Some(GKind::Bar)) {
            self.pos += 1;
            alts.push(self.sequence()?);
        }
        Ok(alts)
    }

    fn sequence(&mut self) -> Result<Alternative, ParseError> {
        let mut symbols = Vec::new();
        while let Some(t) = self.toks.get(self.pos) {
            let sym = match &t.kind {
                GKind::Bar | GKind::Close => break,
                GKind::Postfix(_) => {
                    return Err(ParseError::new(t.span, vec!["symbol".into()], "repetition needs something to repeat"));
                }
                GKind::Term(kinds) => {
                    self.pos += 1;
                    Symbol::terminal(kinds.clone())
                }
                GKind::Word(w) => {
                    self.pos += 1;
                    self.words.push((w.clone(), t.span));
                    Symbol::NonTerminal(w.clone())
                }
                GKind::Open => {
                    self.pos += 1;
                    let alternatives = self.alternatives()?;
                    match self.toks.get(self.pos) {
                        Some(GTok { kind: GKind::Close, .. }) => self.pos += 1,
                        other => {
                            let span = other.map_or(Span::new(self.end, self.end), |t| t.span);
                            return Err(ParseError::new(span, vec!["`)`".into()], "unclosed group"));
                        }
                    }
                    Symbol::Group { alternatives, repeat: Repeat::Once }
                }
            };
            let sym = match self.toks.get(self.pos).map(|t| &t.kind) {
                Some(GKind::Postfix(r)) => {
                    self.pos += 1;
                    match sym {
                        Symbol::Group { alternatives, repeat: Repeat::Once } => Symbol::Group { alternatives, repeat: *r },
                        other => Symbol::Group { alternatives: vec![Alternative::new(vec![other])], repeat: *r },
                    }
                }
                _ => sym,
            };
            // an empty terminal `""` derives nothing
            if matches!(&sym, Symbol::Terminal { tokens, .. } if tokens.is_empty()) {
                continue;
            }
            symbols.push(sym);
        }
        Ok(Alternative::new(symbols))
    }
}

fn resolve_alt(alt: &mut Alternative, known: &[String], words: &[(String, Span)]) -> Result<(), GrammarError> {
    for sym in alt.symbols.iter_mut() {
        match sym {
            Symbol::NonTerminal(name) => {
                if known.iter().any(|k| k == name) {
                    continue;
                }
                if let Some(b) = Builtin::from_name(name) {
                    *sym = Symbol::Builtin(b);
                } else if word_is_terminal(name) {
                    let kinds = tokenize(name).expect("words always tokenize").into_iter().map(|t| t.kind).collect();
                    *sym = Symbol::terminal(kinds);
                } else {
                    let span = words.iter().find(|(w, _)| w == name).map_or(Span::default(), |(_, s)| *s);
                    return Err(GrammarError::UndefinedNonterminal { name: name.clone(), span });
                }
            }
            Symbol::Group { alternatives, .. } => {
                for a in alternatives.iter_mut() {
                    resolve_alt(a, known, words)?;
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn word_is_terminal(word: &str) -> bool {
    word.starts_with(|c: char| c.is_ascii_uppercase()) || word == "in" || funcs::lookup(word).is_some()
}
