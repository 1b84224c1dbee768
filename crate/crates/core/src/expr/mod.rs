//! Expression language for curve and surface components.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := ("-" | "+") unary | power
//! power   := primary ("^" unary)?
//! primary := number | constant | variable | func "(" expr ")" | "(" expr ")"
//! func    := sin | cos | tan | sinh | cosh | tanh | exp | log | sqrt | abs
//! constant:= pi | e
//! ```
//!
//! Implicit multiplication is not accepted: write `2*u`, not `2u`.

mod ast;
mod eval;
mod parse;
mod token;

pub use ast::{affine_combination, Ast, BinOp, Func, NamedConst};
pub use eval::Ring;
pub use parse::parse;
pub use token::{tokenize, Token, TokenKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("invalid character at byte {position}")]
    InvalidCharacter { position: usize },
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown identifier `{name}` at byte {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("unexpected end of input")]
    UnexpectedEnd,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in {op} at {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("unbound variable `{0}`")]
    Unbound(String),
}

/// Tokenizes and parses `source` in one go.
pub fn parse_expression(source: &str, allowed_vars: &[&str]) -> Result<Ast, ParseError> {
    parse(&tokenize(source)?, allowed_vars)
}
