use std::collections::BTreeMap;

use crate::exterior::{SymMatrix, VectorField};
use crate::symexpr::{Chart, Expr, Var};

use super::space::PhaseSpace;
use super::MechanicsError;

/// `{f, g} = ∂f/∂qⁱ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂qⁱ`.
pub fn poisson_bracket(f: &Expr, g: &Expr, space: &PhaseSpace) -> Expr {
    (0..space.n())
        .map(|i| {
            let (q, p) = (space.q(i), space.p(i));
            &(&f.diff(q) * &g.diff(p)) - &(&f.diff(p) * &g.diff(q))
        })
        .sum()
}

/// `p·∂f/∂p`.
fn euler_p(f: &Expr, space: &PhaseSpace) -> Expr {
    (0..space.n()).map(|i| &Expr::var(space.p(i)) * &f.diff(space.p(i))).sum()
}

/// Reeb derivative `∂f/∂z` (zero without a `z` coordinate).
pub fn reeb(f: &Expr, space: &PhaseSpace) -> Expr {
    space.z().map_or_else(Expr::zero, |z| f.diff(z))
}

/// Jacobi bracket
/// `{f,g}_J = {f,g} + (p·∂g/∂p − g) ∂f/∂z − (p·∂f/∂p − f) ∂g/∂z`.
///
/// On a space without `z` the correction terms vanish and this is the
/// Poisson bracket.
pub fn jacobi_bracket(f: &Expr, g: &Expr, space: &PhaseSpace) -> Expr {
    let mut out = poisson_bracket(f, g, space);
    if space.z().is_some() {
        out = &out + &(&(&euler_p(g, space) - g) * &reeb(f, space));
        out = &out - &(&(&euler_p(f, space) - f) * &reeb(g, space));
    }
    out
}

/// Canonical bivector `Λ(df, dg) = ∂f/∂qⁱ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂qⁱ + pᵢ(∂f/∂z ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂z)`.
pub fn lambda(f: &Expr, g: &Expr, space: &PhaseSpace) -> Expr {
    let mut out = poisson_bracket(f, g, space);
    if space.z().is_some() {
        out = &out + &(&reeb(f, space) * &euler_p(g, space));
        out = &out - &(&euler_p(f, space) * &reeb(g, space));
    }
    out
}

/// `♯_Λ(df) = Λ(·, df)` as a vector field.
pub fn sharp_lambda(f: &Expr, space: &PhaseSpace) -> VectorField {
    VectorField::from_components(space.phase_coords().into_iter().map(|x| (x, lambda(&Expr::var(x), f, space))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    Poisson,
    Jacobi,
}

impl BracketKind {
    pub fn eval(self, f: &Expr, g: &Expr, space: &PhaseSpace) -> Expr {
        match self {
            BracketKind::Poisson => poisson_bracket(f, g, space),
            BracketKind::Jacobi => jacobi_bracket(f, g, space),
        }
    }
}

/// Bracket deformed by a set of second-class constraints `χ`:
/// `{f,g}_* = {f,g} − {f,χⁱ} C_ij {χʲ,g}` with `C^{ij} = {χⁱ,χʲ}`.
#[derive(Clone, Debug)]
pub struct DiracStructure {
    kind: BracketKind,
    space: PhaseSpace,
    chi: Vec<Expr>,
    c: SymMatrix,
    c_inv: SymMatrix,
}

impl DiracStructure {
    /// Builds the structure; with `surface` the entries of `C` are evaluated
    /// on that surface before inversion.
    pub fn new(
        kind: BracketKind,
        chi: &[Expr],
        space: &PhaseSpace,
        surface: Option<&Chart>,
    ) -> Result<Self, MechanicsError> {
        let raw = SymMatrix::from_fn(chi.len(), chi.len(), |i, j| kind.eval(&chi[i], &chi[j], space));
        let c = match surface {
            Some(chart) => raw.reduce(chart)?,
            None => raw,
        };
        let c_inv = c.inverse().map_err(|_| MechanicsError::SingularConstraintMatrix)?;
        Ok(DiracStructure {
            kind,
            space: space.clone(),
            chi: chi.to_vec(),
            c,
            c_inv,
        })
    }

    pub fn kind(&self) -> BracketKind {
        self.kind
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn chi(&self) -> &[Expr] {
        &self.chi
    }

    pub fn c_matrix(&self) -> &SymMatrix {
        &self.c
    }

    pub fn c_inverse(&self) -> &SymMatrix {
        &self.c_inv
    }

    fn base(&self, f: &Expr, g: &Expr) -> Expr {
        self.kind.eval(f, g, &self.space)
    }

    pub fn bracket(&self, f: &Expr, g: &Expr) -> Expr {
        let f_chi: Vec<Expr> = self.chi.iter().map(|c| self.base(f, c)).collect();
        let chi_g: Vec<Expr> = self.chi.iter().map(|c| self.base(c, g)).collect();
        let mut out = self.base(f, g);
        for (i, fi) in f_chi.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, gj) in chi_g.iter().enumerate() {
                let cij = self.c_inv.get(i, j);
                if cij.is_zero() || gj.is_zero() {
                    continue;
                }
                out = &out - &(&(fi * cij) * gj);
            }
        }
        out
    }

    /// Deformed Reeb derivative
    /// `R_DJ(f) = R(f) + C_ij R(χʲ) [χⁱ R(f) − ♯_Λ(dχⁱ)(f)]`.
    /// Poisson structures have no Reeb field and return 0.
    pub fn reeb(&self, f: &Expr) -> Expr {
        if self.kind == BracketKind::Poisson {
            return Expr::zero();
        }
        let rf = reeb(f, &self.space);
        let mut out = rf.clone();
        let r_chi: Vec<Expr> = self.chi.iter().map(|c| reeb(c, &self.space)).collect();
        for (i, chi_i) in self.chi.iter().enumerate() {
            let bracket = &(chi_i * &rf) - &lambda(f, chi_i, &self.space);
            for (j, rj) in r_chi.iter().enumerate() {
                let cij = self.c_inv.get(i, j);
                if cij.is_zero() || rj.is_zero() {
                    continue;
                }
                out = &out + &(&(cij * rj) * &bracket);
            }
        }
        out
    }

    /// Time derivative of `g` generated by `h`: `{g,h}_D` for Poisson
    /// structures, `{g,h}_DJ − g R_DJ(h)` for Jacobi structures.
    pub fn evolve(&self, g: &Expr, h: &Expr) -> Expr {
        match self.kind {
            BracketKind::Poisson => self.bracket(g, h),
            BracketKind::Jacobi => &self.bracket(g, h) - &(g * &self.reeb(h)),
        }
    }

    /// Hamiltonian vector field of `f` over the phase coordinates.
    pub fn hamiltonian_field(&self, f: &Expr) -> VectorField {
        VectorField::from_components(
            self.space
                .phase_coords()
                .into_iter()
                .map(|x| (x, self.evolve(&Expr::var(x), f))),
        )
    }

    /// `Λ_*(df, dg)`, recovered from the bracket and the Reeb derivative.
    pub fn bivector(&self, f: &Expr, g: &Expr) -> Expr {
        let b = self.bracket(f, g);
        match self.kind {
            BracketKind::Poisson => b,
            BracketKind::Jacobi => &(&b - &(f * &self.reeb(g))) + &(g * &self.reeb(f)),
        }
    }
}

pub fn dirac_bracket(f: &Expr, g: &Expr, chi: &[Expr], space: &PhaseSpace) -> Result<Expr, MechanicsError> {
    Ok(DiracStructure::new(BracketKind::Poisson, chi, space, None)?.bracket(f, g))
}

pub fn dirac_jacobi_bracket(f: &Expr, g: &Expr, chi: &[Expr], space: &PhaseSpace) -> Result<Expr, MechanicsError> {
    Ok(DiracStructure::new(BracketKind::Jacobi, chi, space, None)?.bracket(f, g))
}

/// Jacobi structure `(Λ, R)` with `Λ` given on coordinate pairs `x < y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiStructure {
    pub bivector: BTreeMap<(Var, Var), Expr>,
    pub reeb: VectorField,
}

/// The structure `(Λ_DJ, R_DJ)` obtained after imposing `chi` strongly.
/// With empty `chi` this is the canonical contact structure.
pub fn deformed_jacobi_structure(chi: &[Expr], space: &PhaseSpace) -> Result<JacobiStructure, MechanicsError> {
    super::lagrangian::require_kind(space, super::space::SpaceKind::Contact)?;
    let d = DiracStructure::new(BracketKind::Jacobi, chi, space, None)?;
    let coords = space.phase_coords();
    let mut bivector = BTreeMap::new();
    for (i, &x) in coords.iter().enumerate() {
        for &y in &coords[i + 1..] {
            let e = d.bivector(&Expr::var(x), &Expr::var(y));
            if !e.is_zero() {
                bivector.insert((x, y), e);
            }
        }
    }
    let reeb = VectorField::from_components(coords.iter().map(|&x| (x, d.reeb(&Expr::var(x)))));
    Ok(JacobiStructure { bivector, reeb })
}
