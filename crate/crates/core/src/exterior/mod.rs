//! Exterior calculus in a single global coordinate chart, and exact linear
//! algebra over the field of rational functions.

mod distribution;
mod field;
mod form;
mod matrix;

pub use distribution::{
    characteristic_distribution, form_kernel, orthogonal_complement, pair_with, Distribution, Pairing,
};
pub use field::VectorField;
pub use form::{differential, exterior_derivative, interior_product, pullback_to_surface, wedge, DifferentialForm};
pub use matrix::{primitive_vector, SymMatrix};

use crate::symexpr::{ExprError, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExteriorError {
    #[error("interior product of a 0-form")]
    ZeroDegree,
    #[error("matrix is singular")]
    Singular,
    #[error("{given} generators span only rank {rank}")]
    DependentGenerators { given: usize, rank: usize },
    #[error("substitution bindings are circular through variable #{}", .0.index())]
    CyclicBindings(Var),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}
