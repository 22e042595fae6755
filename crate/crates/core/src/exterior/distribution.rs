use crate::symexpr::{Chart, Expr, Var, VarTable};

use super::field::VectorField;
use super::form::{differential, exterior_derivative, DifferentialForm};
use super::matrix::{primitive_vector, SymMatrix};
use super::ExteriorError;

/// Span of vector fields along a fixed list of coordinate directions,
/// living on the surface cut out by `surface`.
///
/// Generators are stored in canonical form: the reduced row echelon basis of
/// the span, each row made primitive. Two distributions with the same span on
/// the same surface are therefore structurally equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    coords: Vec<Var>,
    generators: Vec<VectorField>,
    surface: Chart,
}

impl Distribution {
    /// Distribution spanned by linearly independent `generators`.
    pub fn new(coords: &[Var], generators: &[VectorField], surface: &Chart) -> Result<Self, ExteriorError> {
        let d = Distribution::span(coords, generators, surface)?;
        if d.rank() != generators.len() {
            return Err(ExteriorError::DependentGenerators {
                given: generators.len(),
                rank: d.rank(),
            });
        }
        Ok(d)
    }

    /// Span of arbitrary (possibly dependent) generators.
    pub fn span(coords: &[Var], generators: &[VectorField], surface: &Chart) -> Result<Self, ExteriorError> {
        let mut coords = coords.to_vec();
        coords.sort();
        coords.dedup();
        let rows = generators
            .iter()
            .map(|g| Ok(g.reduce(surface)?.row(&coords)))
            .collect::<Result<Vec<_>, ExteriorError>>()?;
        let m = SymMatrix::from_rows(coords.len(), rows)?;
        let (r, pivots) = m.rref();
        let generators = (0..pivots.len())
            .map(|i| VectorField::from_row(&coords, &primitive_vector(r.row(i))))
            .collect();
        Ok(Distribution {
            coords,
            generators,
            surface: surface.clone(),
        })
    }

    /// All coordinate directions.
    pub fn full(coords: &[Var], surface: &Chart) -> Self {
        let gens: Vec<VectorField> = coords.iter().map(|&v| VectorField::basis(v)).collect();
        Distribution::span(coords, &gens, surface).expect("coordinate fields are polynomial")
    }

    pub fn zero(coords: &[Var], surface: &Chart) -> Self {
        Distribution::span(coords, &[], surface).expect("empty span")
    }

    /// Tangent distribution of the surface: fields annihilated by the
    /// differential of every constraint of `surface`.
    pub fn tangent(coords: &[Var], surface: &Chart) -> Result<Self, ExteriorError> {
        let mut sorted = coords.to_vec();
        sorted.sort();
        sorted.dedup();
        let rows = surface
            .constraints()
            .iter()
            .map(|c| Ok(differential(c).reduce(surface)?.row(&sorted)))
            .collect::<Result<Vec<_>, ExteriorError>>()?;
        let m = SymMatrix::from_rows(sorted.len(), rows)?;
        let gens: Vec<VectorField> = m
            .nullspace()
            .into_iter()
            .map(|v| VectorField::from_row(&sorted, &v))
            .collect();
        Distribution::span(&sorted, &gens, surface)
    }

    pub fn coords(&self) -> &[Var] {
        &self.coords
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn surface(&self) -> &Chart {
        &self.surface
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Generator rows as a `rank × coords` matrix.
    pub fn matrix(&self) -> SymMatrix {
        SymMatrix::from_rows(
            self.coords.len(),
            self.generators.iter().map(|g| g.row(&self.coords)).collect(),
        )
        .expect("rows match coords")
    }

    /// Same span restricted to a smaller surface.
    pub fn on_surface(&self, surface: &Chart) -> Result<Self, ExteriorError> {
        Distribution::span(&self.coords, &self.generators, surface)
    }

    /// Whether `x` lies in the span, on this distribution's surface.
    pub fn contains(&self, x: &VectorField) -> Result<bool, ExteriorError> {
        let mut gens = self.generators.clone();
        gens.push(x.clone());
        Ok(Distribution::span(&self.coords, &gens, &self.surface)?.rank() == self.rank())
    }

    pub fn render(&self, vars: &VarTable) -> Vec<String> {
        self.generators.iter().map(|g| g.render(vars)).collect()
    }
}

/// Bilinear pairing used for orthogonal complements.
#[derive(Clone, Copy, Debug)]
pub enum Pairing<'a> {
    /// `(w, v) ↦ ω(w, v)` for a 2-form `ω`.
    Symplectic(&'a DifferentialForm),
    /// `(w, v) ↦ dη(w, v) + η(w) η(v)` for a 1-form `η`.
    Contact(&'a DifferentialForm),
}

impl Pairing<'_> {
    /// Matrix `B_ij = pairing(∂_i, ∂_j)` along `coords`.
    pub fn matrix(&self, coords: &[Var], surface: &Chart) -> Result<SymMatrix, ExteriorError> {
        let m = match self {
            Pairing::Symplectic(omega) => {
                check_degree(omega, 2)?;
                omega.matrix(coords)
            }
            Pairing::Contact(eta) => {
                check_degree(eta, 1)?;
                let d_eta = exterior_derivative(eta).matrix(coords);
                let row = eta.row(coords);
                SymMatrix::from_fn(coords.len(), coords.len(), |i, j| d_eta.get(i, j) + &(&row[i] * &row[j]))
            }
        };
        Ok(m.reduce(surface)?)
    }
}

fn check_degree(f: &DifferentialForm, k: usize) -> Result<(), ExteriorError> {
    if f.degree() == k {
        Ok(())
    } else {
        Err(ExteriorError::Shape(format!("expected a {k}-form, got degree {}", f.degree())))
    }
}

fn same_coords(a: &Distribution, b: &Distribution) -> Result<(), ExteriorError> {
    if a.coords == b.coords {
        Ok(())
    } else {
        Err(ExteriorError::Shape("distributions use different coordinate directions".into()))
    }
}

/// Fields `v = Σ cₐ Aₐ` of `ambient` solving `M c = 0`.
fn solve_in_ambient(ambient: &Distribution, m: &SymMatrix, surface: &Chart) -> Result<Distribution, ExteriorError> {
    let gens: Vec<VectorField> = m
        .reduce(surface)?
        .nullspace()
        .into_iter()
        .map(|c| {
            ambient
                .generators
                .iter()
                .zip(&c)
                .fold(VectorField::zero(), |acc, (a, ci)| acc.add(&a.scale(ci)))
        })
        .collect();
    Distribution::span(&ambient.coords, &gens, surface)
}

/// Right orthogonal complement of `d` inside `ambient`:
/// `{v ∈ ambient : pairing(w, v) = 0 for all w ∈ d}`, evaluated on the
/// surface carried by `d`.
pub fn orthogonal_complement(
    d: &Distribution,
    pairing: Pairing<'_>,
    ambient: &Distribution,
) -> Result<Distribution, ExteriorError> {
    same_coords(d, ambient)?;
    let surface = &d.surface;
    let ambient = ambient.on_surface(surface)?;
    let b = pairing.matrix(&d.coords, surface)?;
    let m = d.matrix().mul(&b)?.mul(&ambient.matrix().transpose())?;
    solve_in_ambient(&ambient, &m, surface)
}

/// Kernel of a 2-form restricted to `ambient`: fields `X ∈ ambient` with
/// `ω(X, Y) = 0` for every `Y ∈ ambient`.
pub fn form_kernel(omega: &DifferentialForm, ambient: &Distribution) -> Result<Distribution, ExteriorError> {
    orthogonal_complement(ambient, Pairing::Symplectic(omega), ambient)
}

/// Characteristic distribution `ker η ∩ ker dη` restricted to `ambient`.
pub fn characteristic_distribution(eta: &DifferentialForm, ambient: &Distribution) -> Result<Distribution, ExteriorError> {
    check_degree(eta, 1)?;
    let surface = &ambient.surface;
    let a = ambient.matrix();
    let at = a.transpose();
    let eta_row = SymMatrix::from_rows(ambient.coords.len(), vec![eta.row(&ambient.coords)])?;
    let d_eta = exterior_derivative(eta).matrix(&ambient.coords);
    let mut rows = eta_row.mul(&at)?.to_rows();
    rows.extend(a.mul(&d_eta)?.mul(&at)?.to_rows());
    let m = SymMatrix::from_rows(ambient.rank(), rows)?;
    solve_in_ambient(ambient, &m, surface)
}

/// Pairing `⟨α, X⟩` of a 1-form with each generator.
pub fn pair_with(alpha: &DifferentialForm, d: &Distribution) -> Result<Vec<Expr>, ExteriorError> {
    d.generators
        .iter()
        .map(|g| Ok(d.surface.reduce(&alpha.eval(&[g])?)?))
        .collect()
}
