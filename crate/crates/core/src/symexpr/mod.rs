//! Exact symbolic expressions: rational functions with rational coefficients
//! over a fixed, ordered table of named variables.

mod chart;
mod expr;
mod gcd;
mod parse;
mod poly;
mod print;
mod vars;

pub use chart::{Chart, ChartError};
pub use expr::{orient, Expr};
pub use gcd::{gcd, lcm};
pub use parse::parse_expr;
pub use poly::{Coeff, Monomial, Poly};
pub use vars::{Var, VarRole, VarTable, VarTableError, Variable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("evaluation hit a pole of the expression")]
    Pole,
    #[error("variable {0} has no value")]
    UnboundVariable(Var),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("exponent at offset {offset} must be an integer literal")]
    NonIntegerExponent { offset: usize },
}

impl ExprError {
    /// Byte offset into the parsed text, for parse errors.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { offset, .. }
            | ExprError::UnknownVariable { offset, .. }
            | ExprError::NonIntegerExponent { offset } => Some(*offset),
            _ => None,
        }
    }
}
