//! Grammars over hypothesis tokens.

use std::fmt;

use indexmap::IndexMap;

use crate::parser::lexer::{render_tokens, TokenKind};

/// Which hypothesis space a grammar describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Provenance {
    /// The unrestricted space of all hypotheses.
    H,
    /// Hypotheses answerable by a dataset.
    HD,
    /// What an analyst wants to ask.
    HA,
    /// What a visualization can answer.
    HV,
    #[default]
    Custom,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::H => "H",
            Provenance::HD => "H_D",
            Provenance::HA => "H_A",
            Provenance::HV => "H_V",
            Provenance::Custom => "custom",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Some(match s {
            "H" => Provenance::H,
            "H_D" | "HD" => Provenance::HD,
            "H_A" | "HA" => Provenance::HA,
            "H_V" | "HV" => Provenance::HV,
            "custom" => Provenance::Custom,
            _ => return None,
        })
    }
}

/// Infinite terminal classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Number,
    /// A name or a quoted string.
    Str,
    /// A quoted string literal only.
    Text,
    Datetime,
    Boolean,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Number => "number",
            Builtin::Str => "str",
            Builtin::Text => "string",
            Builtin::Datetime => "datetime",
            Builtin::Boolean => "boolean",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "number" => Builtin::Number,
            "str" => Builtin::Str,
            "string" => Builtin::Text,
            "datetime" | "date" => Builtin::Datetime,
            "boolean" | "bool" => Builtin::Boolean,
            _ => return None,
        })
    }

    /// Whether one hypothesis token belongs to the class.
    pub fn accepts(self, tok: &TokenKind) -> bool {
        match self {
            Builtin::Number => matches!(tok, TokenKind::Number(_)),
            Builtin::Str => matches!(tok, TokenKind::Ident(_) | TokenKind::Str(_)),
            Builtin::Text => matches!(tok, TokenKind::Str(_)),
            Builtin::Datetime => matches!(tok, TokenKind::Date(_)),
            Builtin::Boolean => matches!(tok, TokenKind::Bool(_)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repeat {
    Once,
    Optional,
    ZeroOrMore,
    OneOrMore,
}

#[derive(Debug, Clone)]
pub enum Symbol {
    /// A fixed token sequence. `text` is kept only for display.
    Terminal { text: String, tokens: Vec<TokenKind> },
    NonTerminal(String),
    Builtin(Builtin),
    Group { alternatives: Vec<Alternative>, repeat: Repeat },
}

impl Symbol {
    pub fn terminal(tokens: Vec<TokenKind>) -> Symbol {
        Symbol::Terminal { text: render_tokens(&tokens), tokens }
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Symbol) -> bool {
        match (self, other) {
            (Symbol::Terminal { tokens: a, .. }, Symbol::Terminal { tokens: b, .. }) => a == b,
            (Symbol::NonTerminal(a), Symbol::NonTerminal(b)) => a == b,
            (Symbol::Builtin(a), Symbol::Builtin(b)) => a == b,
            (
                Symbol::Group { alternatives: a, repeat: ra },
                Symbol::Group { alternatives: b, repeat: rb },
            ) => ra == rb && a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Alternative {
    pub symbols: Vec<Symbol>,
}

impl Alternative {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Alternative { symbols }
    }
}

/// Production rules plus a start symbol. A grammar is also the set of
/// sentences it derives, so it doubles as a hypothesis space.
#[derive(Debug, Clone, PartialEq)]
pub struct GrammarSpec {
    pub rules: IndexMap<String, Vec<Alternative>>,
    pub start: String,
    pub provenance: Provenance,
}

impl GrammarSpec {
    pub fn alternatives(&self, name: &str) -> &[Alternative] {
        self.rules.get(name).map_or(&[], Vec::as_slice)
    }
}

/// `const1` is the first copy of `const`; `hyp` is not a copy.
pub fn copy_base(name: &str) -> Option<&str> {
    let base = name.trim_end_matches(|c: char| c.is_ascii_digit());
    (base.len() < name.len() && !base.is_empty()).then_some(base)
}

pub fn is_copy(name: &str) -> bool {
    copy_base(name).is_some()
}

/// Base name with any copy index removed.
pub fn base_name(name: &str) -> &str {
    copy_base(name).unwrap_or(name)
}

impl fmt::Display for GrammarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.provenance != Provenance::Custom {
            writeln!(f, "%provenance {}", self.provenance.label())?;
        }
        let inferred = if self.rules.contains_key("hyp") {
            Some("hyp")
        } else {
            self.rules.keys().next().map(String::as_str)
        };
        if inferred != Some(self.start.as_str()) {
            writeln!(f, "%start {}", self.start)?;
        }
        let width = self.rules.keys().map(|k| k.len()).max().unwrap_or(0);
        for (name, alts) in &self.rules {
            write!(f, "{name:>width$} :- ")?;
            write_alts(f, alts)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

fn write_alts(f: &mut fmt::Formatter<'_>, alts: &[Alternative]) -> fmt::Result {
    for (i, alt) in alts.iter().enumerate() {
        if i > 0 {
            f.write_str(" | ")?;
        }
        if alt.symbols.is_empty() {
            f.write_str("\"\"")?;
        }
        for (j, s) in alt.symbols.iter().enumerate() {
            if j > 0 {
                f.write_str(" ")?;
            }
            write_symbol(f, s)?;
        }
    }
    Ok(())
}

fn write_symbol(f: &mut fmt::Formatter<'_>, s: &Symbol) -> fmt::Result {
    match s {
        Symbol::Terminal { tokens, .. } => {
            f.write_str("\"")?;
            for c in render_tokens(tokens).chars() {
                if c == '"' || c == '\\' {
                    f.write_str("\\")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("\"")
        }
        Symbol::NonTerminal(n) => f.write_str(n),
        Symbol::Builtin(b) => f.write_str(b.name()),
        Symbol::Group { alternatives, repeat } => {
            f.write_str("(")?;
            write_alts(f, alternatives)?;
            f.write_str(")")?;
            match repeat {
                Repeat::Once => Ok(()),
                Repeat::Optional => f.write_str("?"),
                Repeat::ZeroOrMore => f.write_str("*"),
                Repeat::OneOrMore => f.write_str("+"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_names() {
        assert_eq!(copy_base("const1"), Some("const"));
        assert_eq!(copy_base("expr12"), Some("expr"));
        assert_eq!(copy_base("hyp"), None);
        assert_eq!(copy_base("42"), None);
        assert_eq!(base_name("attr2"), "attr");
    }

    #[test]
    fn builtin_aliases() {
        assert_eq!(Builtin::from_name("str"), Some(Builtin::Str));
        assert_eq!(Builtin::from_name("string"), Some(Builtin::Text));
        assert!(!Builtin::Text.accepts(&TokenKind::Ident("x".into())));
        assert_eq!(Builtin::from_name("bool"), Some(Builtin::Boolean));
        assert!(Builtin::Str.accepts(&TokenKind::Ident("x".into())));
        assert!(!Builtin::Number.accepts(&TokenKind::Str("1".into())));
    }
}
