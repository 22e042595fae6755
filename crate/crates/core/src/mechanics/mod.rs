//! Phase spaces, the singular Legendre transform, Poisson/Jacobi brackets and
//! their Dirac deformations, and contact structures.

mod brackets;
mod contact;
mod lagrangian;
mod space;

pub use brackets::{
    deformed_jacobi_structure, dirac_bracket, dirac_jacobi_bracket, jacobi_bracket, lambda, poisson_bracket, reeb,
    sharp_lambda, BracketKind, DiracStructure, JacobiStructure,
};
pub use contact::{
    canonical_contact_form, contact_class, contact_hamiltonian_vector_field, contact_pairing_matrix, reeb_field,
    ReebField,
};
pub use lagrangian::{cartan_forms, legendre_analyze, CartanForms, LagrangianSystem, LegendreResult};
pub use space::{PhaseSpace, SpaceKind};

use crate::exterior::ExteriorError;
use crate::symexpr::ExprError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MechanicsError {
    #[error("operation requires a {expected:?} phase space")]
    WrongKind { expected: SpaceKind },
    #[error("{}", match .0 {
        Some(d) => format!("Lagrangian has velocity degree {d}; at most 2 is supported"),
        None => "Lagrangian has velocities in a denominator; it must be polynomial of degree at most 2 in velocities".to_string(),
    })]
    VelocityDegree(Option<u32>),
    #[error("Lagrangian uses `{0}`, which is not a coordinate, velocity or z")]
    ForeignVariable(String),
    #[error("bracket matrix of the second-class constraints is singular")]
    SingularConstraintMatrix,
    #[error("expected a nonzero 1-form")]
    NotAOneForm,
    #[error("no admissible Reeb field")]
    NoReebField,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}
