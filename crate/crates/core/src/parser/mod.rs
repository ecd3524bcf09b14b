//! PEG parsers for hypothesis statements and `.hg` grammar files.

mod grammar_file;
mod hypothesis;
pub mod lexer;

use std::fmt;

use serde::Serialize;

use crate::ast::Span;

pub use grammar_file::{parse_grammar, GrammarError};
pub use hypothesis::{parse_expression, parse_hypothesis, parse_hypothesis_tokens};

/// Parse failure at the furthest position any alternative reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseError {
    pub span: Span,
    pub expected: Vec<String>,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, expected: Vec<String>, message: impl Into<String>) -> Self {
        ParseError { span, expected, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}..{}: {}", self.span.start, self.span.end, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
