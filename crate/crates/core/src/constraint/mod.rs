//! Constraint generation (Dirac–Bergmann and geometric engines), weak
//! equality, first/second-class classification and the coisotropy check.

mod classify;
mod engines;

pub use classify::{classify, coisotropy_check, ClassificationResult, CoisotropyReport};
pub use engines::{
    stabilize_dirac_bergmann, stabilize_geometric_contact, stabilize_geometric_symplectic, ContactAmbient,
    StabilizeOptions,
};

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::exterior::ExteriorError;
use crate::mechanics::{MechanicsError, PhaseSpace};
use crate::symexpr::{orient, Chart, ChartError, Expr, ExprError, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("constraint `{0}` is not affine in any phase-space variable; weak reduction needs a linear pivot")]
    Unsolvable(String),
    #[error("constraint `{0}` contradicts the earlier constraints")]
    Inconsistent(String),
    #[error("classification requires a stabilized ledger")]
    NotStabilized,
    #[error("classification failed: {0}")]
    Classification(String),
    #[error(transparent)]
    Mechanics(#[from] MechanicsError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Legendre,
    Consistency,
    GeometricKernel,
    GeometricTangency,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Legendre => "legendre",
            Origin::Consistency => "consistency",
            Origin::GeometricKernel => "geometric-kernel",
            Origin::GeometricTangency => "geometric-tangency",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    Unclassified,
    First,
    Second,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Unclassified => "unclassified",
            Classification::First => "first",
            Classification::Second => "second",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub expr: Expr,
    /// 0 for primary constraints.
    pub stage: usize,
    pub origin: Origin,
    pub classification: Classification,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LedgerStatus {
    Stabilized,
    Inconsistent,
    ExceededIterations,
}

impl LedgerStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LedgerStatus::Stabilized => "stabilized",
            LedgerStatus::Inconsistent => "inconsistent",
            LedgerStatus::ExceededIterations => "exceeded-iterations",
        }
    }
}

/// The consistency condition that reduced to a nonzero constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inconsistency {
    /// Stage at which the contradiction appeared.
    pub stage: usize,
    /// Constraint whose preservation failed, when there is a single one.
    pub source: Option<usize>,
    pub residual: Expr,
}

/// Staged record of the constraint chain produced by one engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintLedger {
    /// Phase space including any multipliers the engine introduced.
    pub space: PhaseSpace,
    pub constraints: Vec<Constraint>,
    pub multiplier_fixings: BTreeMap<Var, Expr>,
    pub status: LedgerStatus,
    pub stages_run: usize,
    pub inconsistency: Option<Inconsistency>,
    /// The final surface has dimension zero.
    pub frozen: bool,
}

impl ConstraintLedger {
    pub(crate) fn new(space: PhaseSpace) -> Self {
        ConstraintLedger {
            space,
            constraints: Vec::new(),
            multiplier_fixings: BTreeMap::new(),
            status: LedgerStatus::Stabilized,
            stages_run: 0,
            inconsistency: None,
            frozen: false,
        }
    }

    pub fn exprs(&self) -> Vec<Expr> {
        self.constraints.iter().map(|c| c.expr.clone()).collect()
    }

    pub fn at_stage(&self, stage: usize) -> Vec<Expr> {
        self.constraints
            .iter()
            .filter(|c| c.stage == stage)
            .map(|c| c.expr.clone())
            .collect()
    }

    /// Chart of the final surface.
    pub fn chart(&self) -> Result<Chart, ConstraintError> {
        surface_chart(&self.exprs(), &self.space)
    }

    pub fn is_stabilized(&self) -> bool {
        self.status == LedgerStatus::Stabilized
    }

    /// Copy with per-constraint labels taken from a classification.
    pub fn with_classification(&self, result: &ClassificationResult) -> ConstraintLedger {
        let mut out = self.clone();
        for (c, label) in out.constraints.iter_mut().zip(&result.labels) {
            c.classification = *label;
        }
        out
    }
}

/// Chart of the surface cut out by `constraints`, pivoting only on phase-space
/// coordinates.
pub fn surface_chart(constraints: &[Expr], space: &PhaseSpace) -> Result<Chart, ConstraintError> {
    let phase = space.phase_coords();
    Chart::from_constraints(constraints, &|v| phase.contains(&v)).map_err(|e| match e {
        ChartError::Unsolvable { index } => ConstraintError::Unsolvable(space.render(&constraints[index])),
        ChartError::Inconsistent { index } => ConstraintError::Inconsistent(space.render(&constraints[index])),
        ChartError::Expr(e) => ConstraintError::Expr(e),
    })
}

/// Restriction of `e` to the surface `constraints = 0`, expressed in the
/// non-pivot variables.
pub fn weak_reduce(e: &Expr, constraints: &[Expr], space: &PhaseSpace) -> Result<Expr, ConstraintError> {
    Ok(surface_chart(constraints, space)?.reduce(e)?)
}

/// Whether two ledgers describe the same surface: both stabilized with each
/// constraint set weakly vanishing on the other's surface, or both stopped
/// with the same status.
pub fn ledgers_agree(a: &ConstraintLedger, b: &ConstraintLedger, space: &PhaseSpace) -> Result<bool, ConstraintError> {
    if !(a.is_stabilized() && b.is_stabilized()) {
        return Ok(a.status == b.status);
    }
    let (ca, cb) = (surface_chart(&a.exprs(), space)?, surface_chart(&b.exprs(), space)?);
    for e in b.exprs() {
        if !ca.reduce(&e)?.is_zero() {
            return Ok(false);
        }
    }
    for e in a.exprs() {
        if !cb.reduce(&e)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Canonical representative of the constraint `e = 0`: the numerator with
/// coprime integer coefficients, signed so that a nonzero constant term is
/// positive, otherwise the leading coefficient is.
pub fn normalize_constraint(e: &Expr) -> Expr {
    if e.is_zero() {
        return Expr::zero();
    }
    let num = e.numerator();
    let cleared = num.scale(&BigRational::from_integer(num.denominator_lcm()));
    let content = BigRational::new(1.into(), cleared.numerator_gcd());
    orient(&Expr::from_poly(cleared.scale(&content)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanics::SpaceKind;

    #[test]
    fn weak_reduction_examples() {
        let s = PhaseSpace::new(SpaceKind::Symplectic, 4).with_multipliers(2);
        let e = |t: &str| s.parse(t).unwrap();
        assert_eq!(weak_reduce(&e("2*q2*q4"), &[e("q2 + q4")], &s).unwrap(), e("-2*q4^2"));
        let set = [e("p3"), e("p2 - p3 + p4")];
        assert!(weak_reduce(&e("p2 - p3 + p4"), &set, &s).unwrap().is_zero());
        let all = [e("p1"), e("p2 - p3 + p4"), e("p3"), e("q2 + q4")];
        assert_eq!(
            weak_reduce(&e("p3 - q1 + (1/2)*p4 + lambda2"), &all, &s).unwrap(),
            e("-q1 + (1/2)*p4 + lambda2")
        );
        let r = weak_reduce(&e("q1"), &[e("q1^2 + p1^2")], &s);
        assert!(matches!(r, Err(ConstraintError::Unsolvable(_))));
    }

    #[test]
    fn normalization() {
        let s = PhaseSpace::new(SpaceKind::Contact, 2);
        let e = |t: &str| s.parse(t).unwrap();
        assert_eq!(normalize_constraint(&e("z - 1")), e("1 - z"));
        assert_eq!(normalize_constraint(&e("-2*p2")), e("p2"));
        assert_eq!(normalize_constraint(&e("(1/2)*p1^2 + q1")), e("p1^2 + 2*q1"));
        assert_eq!(normalize_constraint(&e("(q1 + q2)/p1")), e("q1 + q2"));
    }
}
