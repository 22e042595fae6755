use std::collections::{BTreeMap, BTreeSet};

use crate::exterior::{exterior_derivative, DifferentialForm, SymMatrix};
use crate::symexpr::{orient, Expr, Var};

use super::space::{PhaseSpace, SpaceKind};
use super::MechanicsError;

/// Lagrangian `L(q, v[, z])`, at most quadratic in the velocities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangianSystem {
    space: PhaseSpace,
    lagrangian: Expr,
}

impl LagrangianSystem {
    pub fn new(space: PhaseSpace, lagrangian: Expr) -> Result<Self, MechanicsError> {
        let allowed: BTreeSet<Var> = space.tangent_coords().into_iter().collect();
        if let Some(v) = lagrangian.free_vars().into_iter().find(|v| !allowed.contains(v)) {
            return Err(MechanicsError::ForeignVariable(space.name(v).to_string()));
        }
        let vel: BTreeSet<Var> = space.velocities().into_iter().collect();
        if lagrangian.denominator().vars().iter().any(|v| vel.contains(v)) {
            return Err(MechanicsError::VelocityDegree(None));
        }
        let degree = lagrangian
            .numerator()
            .terms()
            .iter()
            .map(|(m, _)| m.pairs().iter().filter(|(v, _)| vel.contains(v)).map(|(_, e)| *e).sum::<u32>())
            .max()
            .unwrap_or(0);
        if degree > 2 {
            return Err(MechanicsError::VelocityDegree(Some(degree)));
        }
        Ok(LagrangianSystem { space, lagrangian })
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    /// `∂L/∂vⁱ` for each velocity.
    pub fn momenta(&self) -> Vec<Expr> {
        self.space.velocities().into_iter().map(|v| self.lagrangian.diff(v)).collect()
    }

    /// `E_L = vⁱ ∂L/∂vⁱ − L`.
    pub fn energy(&self) -> Expr {
        let vp: Expr = self
            .space
            .velocities()
            .into_iter()
            .zip(self.momenta())
            .map(|(v, p)| &Expr::var(v) * &p)
            .sum();
        &vp - &self.lagrangian
    }

    /// Velocity Hessian `W_ij = ∂²L/∂vⁱ∂vʲ`.
    pub fn hessian(&self) -> SymMatrix {
        let vs = self.space.velocities();
        let m = self.momenta();
        SymMatrix::from_fn(vs.len(), vs.len(), |i, j| m[i].diff(vs[j]))
    }
}

/// Cartan forms on `TQ` (or `TQ × ℝ`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanForms {
    /// `θ_L = (∂L/∂vⁱ) dqⁱ`.
    pub theta: DifferentialForm,
    /// `ω_L = −dθ_L`.
    pub omega: DifferentialForm,
    pub energy: Expr,
    /// `η_L = dz − θ_L` for contact systems.
    pub eta: Option<DifferentialForm>,
}

pub fn cartan_forms(sys: &LagrangianSystem) -> CartanForms {
    let space = sys.space();
    let theta = DifferentialForm::from_terms(
        1,
        space.coordinates().into_iter().zip(sys.momenta()).map(|(q, p)| (vec![q], p)),
    );
    let omega = exterior_derivative(&theta).scale(&Expr::int(-1));
    let eta = space.z().map(|z| {
        DifferentialForm::dvar(z)
            .sub(&theta)
            .expect("both are 1-forms")
    });
    CartanForms {
        theta,
        omega,
        energy: sys.energy(),
        eta,
    }
}

/// Outcome of the (possibly singular) Legendre transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendreResult {
    /// `pᵢ = ∂L/∂vⁱ` as functions of `(q, v[, z])`.
    pub momenta: Vec<Expr>,
    pub hessian: SymMatrix,
    pub rank: usize,
    /// Primary constraints in `(q, p[, z])`.
    pub primaries: Vec<Expr>,
    /// Canonical Hamiltonian in `(q, p[, z])`.
    pub h0: Expr,
    /// Velocities solved in terms of momenta on a complement of `ker W`.
    /// Velocities not listed were set to zero.
    pub velocity_solution: BTreeMap<Var, Expr>,
}

/// Legendre analysis of a Lagrangian at most quadratic in velocities.
///
/// Writing `p = W v + a(q[, z])`, every left null vector `u` of `W` gives the
/// primary constraint `u·(p − a)`. To express the energy in momenta, a set of
/// `rank W` independent Hessian rows is chosen, sparsest rows first (ties by
/// index), and solved for the pivot velocities of those rows with the other
/// velocities set to zero. Any such choice yields the same function on the
/// primary surface.
pub fn legendre_analyze(sys: &LagrangianSystem) -> Result<LegendreResult, MechanicsError> {
    let space = sys.space();
    let n = space.n();
    let vels = space.velocities();
    let momenta = sys.momenta();
    let hessian = sys.hessian();
    let rank = hessian.rank();
    let zero_v: BTreeMap<Var, Expr> = vels.iter().map(|&v| (v, Expr::zero())).collect();
    let offsets = momenta
        .iter()
        .map(|m| m.substitute(&zero_v))
        .collect::<Result<Vec<_>, _>>()?;
    let shifted: Vec<Expr> = (0..n).map(|i| &Expr::var(space.p(i)) - &offsets[i]).collect();

    let primaries: Vec<Expr> = hessian
        .left_nullspace()
        .into_iter()
        .map(|u| orient(&u.iter().zip(&shifted).map(|(a, b)| a * b).sum::<Expr>()))
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (hessian.row(i).iter().filter(|e| !e.is_zero()).count(), i));
    let mut rows: Vec<usize> = Vec::new();
    for i in order {
        let mut trial = rows.clone();
        trial.push(i);
        let sub = SymMatrix::from_rows(n, trial.iter().map(|&r| hessian.row(r).to_vec()).collect())?;
        if sub.rank() == trial.len() {
            rows = trial;
        }
        if rows.len() == rank {
            break;
        }
    }
    rows.sort();
    let sub = SymMatrix::from_rows(n, rows.iter().map(|&r| hessian.row(r).to_vec()).collect())?;
    let (_, pivots) = sub.rref();
    let block = SymMatrix::from_fn(rows.len(), pivots.len(), |i, j| sub.get(i, pivots[j]).clone());
    let rhs: Vec<Expr> = rows.iter().map(|&r| shifted[r].clone()).collect();
    let solved = block.inverse()?.mul_vec(&rhs);
    let mut velocity_solution = BTreeMap::new();
    let mut bindings = zero_v.clone();
    for (j, &c) in pivots.iter().enumerate() {
        velocity_solution.insert(vels[c], solved[j].clone());
        bindings.insert(vels[c], solved[j].clone());
    }
    let energy = sys.energy();
    let h0 = energy.substitute(&bindings)?;

    let to_velocity: BTreeMap<Var, Expr> = (0..n).map(|i| (space.p(i), momenta[i].clone())).collect();
    if h0.substitute(&to_velocity)? != energy {
        return Err(MechanicsError::Internal("H0 does not pull back to the energy".into()));
    }
    for phi in &primaries {
        if !phi.substitute(&to_velocity)?.is_zero() {
            return Err(MechanicsError::Internal("primary constraint does not vanish on the Legendre image".into()));
        }
    }
    Ok(LegendreResult {
        momenta,
        hessian,
        rank,
        primaries,
        h0,
        velocity_solution,
    })
}

impl LegendreResult {
    pub fn is_regular(&self) -> bool {
        self.primaries.is_empty()
    }
}

/// Kind check shared by the contact-only operations.
pub(crate) fn require_kind(space: &PhaseSpace, kind: SpaceKind) -> Result<(), MechanicsError> {
    if space.kind() == kind {
        Ok(())
    } else {
        Err(MechanicsError::WrongKind { expected: kind })
    }
}
