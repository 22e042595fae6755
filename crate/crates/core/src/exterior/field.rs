use std::collections::BTreeMap;
use std::fmt;

use crate::symexpr::{Chart, Expr, ExprError, Var, VarTable};

/// Vector field `Σ Xⁱ ∂/∂xⁱ` over coordinate directions. Absent components
/// are zero; zero components are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct VectorField {
    comps: BTreeMap<Var, Expr>,
}

impl VectorField {
    pub fn zero() -> Self {
        VectorField::default()
    }

    /// The coordinate field `∂/∂v`.
    pub fn basis(v: Var) -> Self {
        VectorField::from_components([(v, Expr::one())])
    }

    pub fn from_components<I: IntoIterator<Item = (Var, Expr)>>(comps: I) -> Self {
        let mut out = VectorField::zero();
        for (v, e) in comps {
            let sum = &out.component(v) + &e;
            out.set(v, sum);
        }
        out
    }

    /// Field with components `row[i]` along `coords[i]`.
    pub fn from_row(coords: &[Var], row: &[Expr]) -> Self {
        VectorField::from_components(coords.iter().copied().zip(row.iter().cloned()))
    }

    pub fn component(&self, v: Var) -> Expr {
        self.comps.get(&v).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, v: Var, e: Expr) {
        if e.is_zero() {
            self.comps.remove(&v);
        } else {
            self.comps.insert(v, e);
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (Var, &Expr)> {
        self.comps.iter().map(|(v, e)| (*v, e))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn row(&self, coords: &[Var]) -> Vec<Expr> {
        coords.iter().map(|&v| self.component(v)).collect()
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::from_components(self.comps.clone().into_iter().chain(other.comps.clone()))
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.add(&other.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        VectorField::from_components(self.comps.iter().map(|(v, e)| (*v, e * f)))
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        self.comps.iter().map(|(v, e)| e * &f.diff(*v)).sum()
    }

    /// Commutator `[X, Y]` with components `X(Yʲ) − Y(Xʲ)`.
    pub fn lie_bracket(&self, other: &VectorField) -> VectorField {
        let dirs: Vec<Var> = self.comps.keys().chain(other.comps.keys()).copied().collect();
        VectorField::from_components(
            dirs.into_iter()
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .map(|j| (j, &self.apply(&other.component(j)) - &other.apply(&self.component(j)))),
        )
    }

    pub fn reduce(&self, chart: &Chart) -> Result<VectorField, ExprError> {
        let mut out = VectorField::zero();
        for (v, e) in &self.comps {
            out.set(*v, chart.reduce(e)?);
        }
        Ok(out)
    }

    /// Text form such as `d/dq1 - d/dq2 + p1*d/dp1`.
    pub fn render(&self, vars: &VarTable) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (v, e)) in self.comps.iter().enumerate() {
            let dir = format!("d/d{}", vars.name(*v));
            let (neg, mag) = split_sign(e);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mag.is_one() {
                out.push_str(&dir);
            } else if mag.numerator().terms().len() > 1 || !mag.is_polynomial() {
                out.push_str(&format!("({})*{dir}", mag.render(vars)));
            } else {
                out.push_str(&format!("{}*{dir}", mag.render(vars)));
            }
        }
        out
    }
}

/// Splits off a leading minus sign for display.
pub(crate) fn split_sign(e: &Expr) -> (bool, Expr) {
    if e.numerator().terms().len() == 1 && e.numerator().leading_is_negative() {
        (true, -e)
    } else {
        (false, e.clone())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.comps.iter()).finish()
    }
}
