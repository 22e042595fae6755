//! Total Hamiltonian, symbolic equations of motion and their numerical
//! integration.

mod integrate;

pub use integrate::{drift_report, evaluate_at, integrate, DriftReport, Trajectory};

use crate::constraint::{surface_chart, weak_reduce, ClassificationResult, ConstraintError};
use crate::mechanics::{BracketKind, DiracStructure, MechanicsError, PhaseSpace, SpaceKind};
use crate::symexpr::{Chart, Expr, ExprError, Var};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("multiplier `{0}` has no binding")]
    UnboundMultiplier(String),
    #[error("variable `{0}` has no value")]
    UnboundVariable(String),
    #[error("initial state violates `{constraint}` by {value:e}")]
    ConstraintViolation { constraint: String, value: f64 },
    #[error("invalid time step: {0}")]
    InvalidStep(String),
    #[error("state left the domain of `{0}`")]
    Pole(String),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Mechanics(#[from] MechanicsError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `H_T = base + Σ μ_a Ω^a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalHamiltonian {
    /// Phase space with one multiplier per first-class constraint.
    pub space: PhaseSpace,
    pub base: Expr,
    pub terms: Vec<(Var, Expr)>,
}

impl TotalHamiltonian {
    pub fn expr(&self) -> Expr {
        self.terms
            .iter()
            .fold(self.base.clone(), |acc, (m, omega)| &acc + &(&Expr::var(*m) * omega))
    }

    pub fn multipliers(&self) -> Vec<Var> {
        self.terms.iter().map(|(m, _)| *m).collect()
    }
}

/// Adds one multiplier per first-class constraint to `h0`. With
/// `chi_strongly_imposed`, `h0` is first reduced on the second-class surface.
pub fn total_hamiltonian(
    h0: &Expr,
    classification: &ClassificationResult,
    space: &PhaseSpace,
    chi_strongly_imposed: bool,
) -> Result<TotalHamiltonian, DynamicsError> {
    let sp = space.with_multipliers(classification.first.len());
    let base = if chi_strongly_imposed {
        weak_reduce(h0, &classification.second, &sp)?
    } else {
        h0.clone()
    };
    let terms = classification
        .first
        .iter()
        .enumerate()
        .map(|(a, omega)| (sp.multiplier(a), omega.clone()))
        .collect();
    Ok(TotalHamiltonian { space: sp, base, terms })
}

/// Time derivative of every phase-space coordinate, weakly reduced on the
/// final constraint surface.
#[derive(Clone, Debug)]
pub struct EquationsOfMotion {
    space: PhaseSpace,
    constraints: Vec<Expr>,
    chart: Chart,
    structure: DiracStructure,
    hamiltonian: Expr,
    rows: Vec<(Var, Expr)>,
}

/// Symplectic systems evolve by `ẋ = {x, H_T}_D`; contact systems by
/// `ẋ = {x, H_T}_DJ − x R_DJ(H_T)`. The second-class constraints of
/// `classification` deform the bracket.
pub fn equations_of_motion(
    ht: &TotalHamiltonian,
    classification: &ClassificationResult,
) -> Result<EquationsOfMotion, DynamicsError> {
    let space = ht.space.clone();
    let kind = match space.kind() {
        SpaceKind::Symplectic => BracketKind::Poisson,
        SpaceKind::Contact => BracketKind::Jacobi,
    };
    let chart = surface_chart(&classification.constraints, &space)?;
    let structure = DiracStructure::new(kind, &classification.second, &space, Some(&chart))?;
    let hamiltonian = ht.expr();
    let rows = space
        .phase_coords()
        .into_iter()
        .map(|x| Ok((x, chart.reduce(&structure.evolve(&Expr::var(x), &hamiltonian))?)))
        .collect::<Result<Vec<_>, ExprError>>()?;
    Ok(EquationsOfMotion {
        space,
        constraints: classification.constraints.clone(),
        chart,
        structure,
        hamiltonian,
        rows,
    })
}

impl EquationsOfMotion {
    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn kind(&self) -> SpaceKind {
        self.space.kind()
    }

    pub fn rows(&self) -> &[(Var, Expr)] {
        &self.rows
    }

    pub fn rhs(&self, x: Var) -> Option<&Expr> {
        self.rows.iter().find(|(v, _)| *v == x).map(|(_, e)| e)
    }

    pub fn constraints(&self) -> &[Expr] {
        &self.constraints
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.hamiltonian
    }

    /// `ḟ` from the evolution law applied to `f` directly.
    pub fn evolve(&self, f: &Expr) -> Result<Expr, DynamicsError> {
        Ok(self.chart.reduce(&self.structure.evolve(f, &self.hamiltonian))?)
    }

    /// `ḟ = Σ ∂f/∂x ẋ` along the tabulated equations of motion.
    pub fn derivative_along(&self, f: &Expr) -> Result<Expr, DynamicsError> {
        let total: Expr = self.rows.iter().map(|(x, rhs)| &f.diff(*x) * rhs).sum();
        Ok(self.chart.reduce(&total)?)
    }

    /// `ḟ` of every final constraint; all zero when the dynamics is tangent
    /// to the final surface.
    pub fn tangency_residuals(&self) -> Result<Vec<Expr>, DynamicsError> {
        self.constraints.iter().map(|c| self.derivative_along(c)).collect()
    }
}
