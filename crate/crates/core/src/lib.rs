//! Hypotheses about tabular data, and grammars describing spaces of them.

pub mod ast;
pub mod cli;
pub mod dataset;
pub mod evaluator;
pub mod funcs;
pub mod parser;
pub mod space;
pub mod synth;
