//! Reading LISA litmus files.
//!
//! A file is a `LISA <name>` header, optional metadata lines, a prelude in
//! braces, a process table whose columns are separated by `|` and rows
//! terminated by `;`, and a final `exists`/`~exists`/`forall` condition.
//! `(* ... *)` comments may appear anywhere.

mod ast;
mod lexer;
mod parser;
mod print;
mod validate;

use thiserror::Error;

pub use ast::*;
pub use parser::parse_litmus;
pub use print::pretty_print;
pub use validate::{validate, ValidationError};

/// A syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LisaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// Parses and validates in one step.
pub fn load_litmus(text: &str) -> Result<LitmusTest, LisaError> {
    Ok(validate(parse_litmus(text)?)?)
}
