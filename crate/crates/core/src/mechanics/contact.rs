use crate::exterior::{exterior_derivative, wedge, DifferentialForm, SymMatrix, VectorField};
use crate::symexpr::{Expr, Var};

use super::lagrangian::require_kind;
use super::space::{PhaseSpace, SpaceKind};
use super::MechanicsError;

/// Largest `k` with `η ∧ (dη)^k ≠ 0`. The class of `η` is `2k + 1`.
pub fn contact_class(eta: &DifferentialForm) -> Result<usize, MechanicsError> {
    if eta.degree() != 1 || eta.is_zero() {
        return Err(MechanicsError::NotAOneForm);
    }
    let d_eta = exterior_derivative(eta);
    let mut k = 0;
    let mut acc = eta.clone();
    loop {
        let next = wedge(&acc, &d_eta);
        if next.is_zero() {
            return Ok(k);
        }
        acc = next;
        k += 1;
    }
}

/// Canonical contact form `dz − pᵢ dqⁱ`.
pub fn canonical_contact_form(space: &PhaseSpace) -> Result<DifferentialForm, MechanicsError> {
    require_kind(space, SpaceKind::Contact)?;
    let z = space.z().expect("contact spaces have z");
    let mut terms = vec![(vec![z], Expr::one())];
    terms.extend((0..space.n()).map(|i| (vec![space.q(i)], -Expr::var(space.p(i)))));
    Ok(DifferentialForm::from_terms(1, terms))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReebField {
    pub field: VectorField,
    /// False when `η` is not of maximal class and `field` is only one of many
    /// solutions of the Reeb conditions.
    pub unique: bool,
}

/// Solves `ι_R dη = 0`, `ι_R η = 1` over the phase coordinates.
///
/// For maximal class the solution is unique. Otherwise the default
/// `∂z / η(∂z)` is returned with `unique = false`.
pub fn reeb_field(eta: &DifferentialForm, space: &PhaseSpace) -> Result<ReebField, MechanicsError> {
    let coords = space.phase_coords();
    let k = contact_class(eta)?;
    if 2 * k + 1 == coords.len() {
        let omega = exterior_derivative(eta).matrix(&coords);
        let kernel = omega.nullspace();
        let dir = kernel.first().ok_or(MechanicsError::NoReebField)?;
        let field = VectorField::from_row(&coords, dir);
        let norm = eta.eval(&[&field])?;
        let field = field.scale(&norm.recip()?);
        return Ok(ReebField { field, unique: true });
    }
    let z = space.z().ok_or(MechanicsError::NoReebField)?;
    let dz = VectorField::basis(z);
    let norm = eta.eval(&[&dz])?;
    if norm.is_zero() {
        return Err(MechanicsError::NoReebField);
    }
    Ok(ReebField {
        field: dz.scale(&norm.recip()?),
        unique: false,
    })
}

/// Contact Hamiltonian vector field of `h` for the canonical contact form:
/// `∂h/∂pᵢ ∂/∂qⁱ − (∂h/∂qⁱ + pᵢ ∂h/∂z) ∂/∂pᵢ + (pᵢ ∂h/∂pᵢ − h) ∂/∂z`.
pub fn contact_hamiltonian_vector_field(h: &Expr, space: &PhaseSpace) -> Result<VectorField, MechanicsError> {
    require_kind(space, SpaceKind::Contact)?;
    let z = space.z().expect("contact spaces have z");
    let hz = h.diff(z);
    let mut comps: Vec<(Var, Expr)> = Vec::new();
    let mut euler = Expr::zero();
    for i in 0..space.n() {
        let (q, p) = (space.q(i), space.p(i));
        let pv = Expr::var(p);
        comps.push((q, h.diff(p)));
        comps.push((p, -(&h.diff(q) + &(&pv * &hz))));
        euler = &euler + &(&pv * &h.diff(p));
    }
    comps.push((z, &euler - h));
    Ok(VectorField::from_components(comps))
}

/// Matrix of a bilinear pairing, exposed for diagnostics: `dη + η ⊗ η`.
pub fn contact_pairing_matrix(eta: &DifferentialForm, coords: &[Var]) -> SymMatrix {
    let d = exterior_derivative(eta).matrix(coords);
    let row = eta.row(coords);
    SymMatrix::from_fn(coords.len(), coords.len(), |i, j| d.get(i, j) + &(&row[i] * &row[j]))
}
