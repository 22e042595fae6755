use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::symexpr::{Chart, Expr, ExprError, Var, VarTable};

use super::field::{split_sign, VectorField};
use super::matrix::SymMatrix;
use super::ExteriorError;

/// Differential k-form `Σ c_I dx^I` over strictly increasing index tuples.
#[derive(Clone, PartialEq, Eq)]
pub struct DifferentialForm {
    degree: usize,
    comps: BTreeMap<Vec<Var>, Expr>,
}

impl DifferentialForm {
    pub fn zero(degree: usize) -> Self {
        DifferentialForm {
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn scalar(f: Expr) -> Self {
        DifferentialForm::zero(0).with_term(Vec::new(), f)
    }

    /// The coordinate 1-form `dv`.
    pub fn dvar(v: Var) -> Self {
        DifferentialForm::zero(1).with_term(vec![v], Expr::one())
    }

    /// Sum of `c · dx^{i1}∧…∧dx^{ik}` terms given in any index order.
    /// Repeated indices contribute nothing and permutations pick up their sign.
    pub fn from_terms<I: IntoIterator<Item = (Vec<Var>, Expr)>>(degree: usize, terms: I) -> Self {
        let mut out = DifferentialForm::zero(degree);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree, "form term has the wrong degree");
            if let Some((sorted, odd)) = sort_with_parity(idx) {
                let c = if odd { -c } else { c };
                out.add_term(sorted, c);
            }
        }
        out
    }

    fn with_term(mut self, idx: Vec<Var>, c: Expr) -> Self {
        self.add_term(idx, c);
        self
    }

    fn add_term(&mut self, idx: Vec<Var>, c: Expr) {
        let sum = match self.comps.remove(&idx) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.comps.insert(idx, sum);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Coefficient of `dx^{idx}`; `idx` may be in any order.
    pub fn coefficient(&self, idx: &[Var]) -> Expr {
        match sort_with_parity(idx.to_vec()) {
            Some((sorted, odd)) => {
                let c = self.comps.get(&sorted).cloned().unwrap_or_default();
                if odd {
                    -c
                } else {
                    c
                }
            }
            None => Expr::zero(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Var], &Expr)> {
        self.comps.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Value of a 0-form.
    pub fn as_scalar(&self) -> Option<Expr> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    /// All coordinates appearing in basis covectors or coefficients.
    pub fn support(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for (k, c) in &self.comps {
            s.extend(k.iter().copied());
            s.extend(c.free_vars());
        }
        s
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<DifferentialForm, ExteriorError> {
        if self.degree != other.degree {
            return Err(ExteriorError::Shape(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (k, c) in &other.comps {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DifferentialForm) -> Result<DifferentialForm, ExteriorError> {
        self.add(&other.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, f: &Expr) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.degree);
        for (k, c) in &self.comps {
            out.add_term(k.clone(), c * f);
        }
        out
    }

    pub fn reduce(&self, chart: &Chart) -> Result<DifferentialForm, ExprError> {
        let mut out = DifferentialForm::zero(self.degree);
        for (k, c) in &self.comps {
            out.add_term(k.clone(), chart.reduce(c)?);
        }
        Ok(out)
    }

    /// Evaluates the form on `fields.len() == degree` vector fields.
    pub fn eval(&self, fields: &[&VectorField]) -> Result<Expr, ExteriorError> {
        if fields.len() != self.degree {
            return Err(ExteriorError::Shape(format!(
                "{}-form evaluated on {} vectors",
                self.degree,
                fields.len()
            )));
        }
        let mut acc = self.clone();
        for x in fields {
            acc = interior_product(x, &acc)?;
        }
        Ok(acc.as_scalar().expect("all slots filled"))
    }

    /// Coefficient row of a 1-form along `coords`.
    pub fn row(&self, coords: &[Var]) -> Vec<Expr> {
        debug_assert_eq!(self.degree, 1);
        coords.iter().map(|&v| self.coefficient(&[v])).collect()
    }

    /// Antisymmetric matrix `M_ij = ω(∂_i, ∂_j)` of a 2-form along `coords`.
    pub fn matrix(&self, coords: &[Var]) -> SymMatrix {
        debug_assert_eq!(self.degree, 2);
        SymMatrix::from_fn(coords.len(), coords.len(), |i, j| {
            if i == j {
                Expr::zero()
            } else {
                self.coefficient(&[coords[i], coords[j]])
            }
        })
    }

    pub fn render(&self, vars: &VarTable) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (k, c)) in self.comps.iter().enumerate() {
            let basis = k
                .iter()
                .map(|&v| format!("d{}", vars.name(v)))
                .collect::<Vec<_>>()
                .join("^");
            let (neg, mag) = split_sign(c);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if basis.is_empty() {
                out.push_str(&mag.render(vars));
            } else if mag.is_one() {
                out.push_str(&basis);
            } else if mag.numerator().terms().len() > 1 || !mag.is_polynomial() {
                out.push_str(&format!("({})*{basis}", mag.render(vars)));
            } else {
                out.push_str(&format!("{}*{basis}", mag.render(vars)));
            }
        }
        out
    }
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-form ", self.degree)?;
        f.debug_map().entries(self.comps.iter()).finish()
    }
}

/// Sorts indices, reporting whether the permutation was odd. `None` when an
/// index repeats.
fn sort_with_parity(mut idx: Vec<Var>) -> Option<(Vec<Var>, bool)> {
    let mut odd = false;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((idx, odd))
}

pub fn wedge(a: &DifferentialForm, b: &DifferentialForm) -> DifferentialForm {
    let terms = a.comps.iter().flat_map(|(ka, ca)| {
        b.comps.iter().map(move |(kb, cb)| {
            let mut k = ka.clone();
            k.extend(kb.iter().copied());
            (k, ca * cb)
        })
    });
    DifferentialForm::from_terms(a.degree + b.degree, terms)
}

/// `d` of a function, as a 1-form.
pub fn differential(f: &Expr) -> DifferentialForm {
    DifferentialForm::from_terms(1, f.free_vars().into_iter().map(|v| (vec![v], f.diff(v))))
}

pub fn exterior_derivative(a: &DifferentialForm) -> DifferentialForm {
    let terms = a.comps.iter().flat_map(|(k, c)| {
        c.free_vars().into_iter().map(move |v| {
            let mut idx = vec![v];
            idx.extend(k.iter().copied());
            (idx, c.diff(v))
        })
    });
    DifferentialForm::from_terms(a.degree + 1, terms)
}

pub fn interior_product(x: &VectorField, a: &DifferentialForm) -> Result<DifferentialForm, ExteriorError> {
    if a.degree == 0 {
        return Err(ExteriorError::ZeroDegree);
    }
    let mut out = DifferentialForm::zero(a.degree - 1);
    for (k, c) in &a.comps {
        for (m, v) in k.iter().enumerate() {
            let xv = x.component(*v);
            if xv.is_zero() {
                continue;
            }
            let mut rest = k.clone();
            rest.remove(m);
            let term = &xv * c;
            out.add_term(rest, if m % 2 == 1 { -term } else { term });
        }
    }
    Ok(out)
}

/// Pulls a form back along a parameterization `x ↦ solved[x]` of a surface:
/// coefficients are substituted and each `dx` of an eliminated coordinate
/// becomes `d(solved[x])`.
///
/// The bindings may refer to each other; they are resolved first and a
/// circular chain is an error.
pub fn pullback_to_surface(
    a: &DifferentialForm,
    solved: &BTreeMap<Var, Expr>,
) -> Result<DifferentialForm, ExteriorError> {
    let solved = resolve_bindings(solved)?;
    let mut out = DifferentialForm::zero(a.degree);
    for (k, c) in &a.comps {
        let mut acc = DifferentialForm::scalar(c.substitute(&solved)?);
        for v in k {
            let dv = match solved.get(v) {
                Some(e) => differential(e),
                None => DifferentialForm::dvar(*v),
            };
            acc = wedge(&acc, &dv);
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

fn resolve_bindings(solved: &BTreeMap<Var, Expr>) -> Result<BTreeMap<Var, Expr>, ExteriorError> {
    let mut current = solved.clone();
    for _ in 0..=solved.len() {
        let pending = current
            .iter()
            .find(|(_, e)| e.free_vars().iter().any(|v| solved.contains_key(v)))
            .map(|(v, _)| *v);
        if pending.is_none() {
            return Ok(current);
        }
        let next = current
            .iter()
            .map(|(v, e)| Ok((*v, e.substitute(solved)?)))
            .collect::<Result<BTreeMap<_, _>, ExprError>>()?;
        current = next;
    }
    let culprit = current
        .iter()
        .find(|(_, e)| e.free_vars().iter().any(|v| solved.contains_key(v)))
        .map(|(v, _)| *v)
        .expect("unresolved binding remains");
    Err(ExteriorError::CyclicBindings(culprit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn table() -> VarTable {
        VarTable::mechanics(4, true, "l", 0)
    }

    fn v(t: &VarTable, name: &str) -> Var {
        t.lookup(name).unwrap()
    }

    fn e(t: &VarTable, s: &str) -> Expr {
        parse_expr(s, t).unwrap()
    }

    /// `dz - Σ pᵢ dqⁱ` over the first `n` pairs.
    fn contact_form(t: &VarTable, n: usize) -> DifferentialForm {
        let mut terms = vec![(vec![v(t, "z")], Expr::one())];
        for i in 1..=n {
            terms.push((vec![v(t, &format!("q{i}"))], -e(t, &format!("p{i}"))));
        }
        DifferentialForm::from_terms(1, terms)
    }

    #[test]
    fn wedge_basics() {
        let t = table();
        let dq = DifferentialForm::dvar(v(&t, "q1"));
        let dp = DifferentialForm::dvar(v(&t, "p1"));
        assert!(wedge(&wedge(&dq, &dp), &dq).is_zero());
        assert_eq!(wedge(&dq, &dp), wedge(&dp, &dq).scale(&Expr::int(-1)));
    }

    #[test]
    fn derivative_of_contact_form() {
        let t = table();
        let d_eta = exterior_derivative(&contact_form(&t, 2));
        let expected = DifferentialForm::from_terms(
            2,
            [
                (vec![v(&t, "q1"), v(&t, "p1")], Expr::one()),
                (vec![v(&t, "q2"), v(&t, "p2")], Expr::one()),
            ],
        );
        assert_eq!(d_eta, expected);
        let f = exterior_derivative(&DifferentialForm::scalar(e(&t, "q1*p1")));
        assert_eq!(f, differential(&e(&t, "q1*p1")));
        assert_eq!(f.coefficient(&[v(&t, "q1")]), e(&t, "p1"));
        assert_eq!(f.coefficient(&[v(&t, "p1")]), e(&t, "q1"));
    }

    #[test]
    fn interior_products() {
        let t = table();
        let eta = contact_form(&t, 4);
        let r = VectorField::basis(v(&t, "z"));
        assert_eq!(interior_product(&r, &eta).unwrap().as_scalar(), Some(Expr::one()));
        let two = wedge(&DifferentialForm::dvar(v(&t, "q1")), &DifferentialForm::dvar(v(&t, "p1")));
        assert_eq!(
            interior_product(&VectorField::basis(v(&t, "q1")), &two).unwrap(),
            DifferentialForm::dvar(v(&t, "p1"))
        );
        assert_eq!(
            interior_product(&r, &DifferentialForm::scalar(Expr::one())),
            Err(ExteriorError::ZeroDegree)
        );
    }

    #[test]
    fn example_two_forms() {
        let t = table();
        let eta = contact_form(&t, 2);
        let solved = BTreeMap::from([(v(&t, "p2"), e(&t, "p1"))]);
        let eta0 = pullback_to_surface(&eta, &solved).unwrap();
        let expected = DifferentialForm::from_terms(
            1,
            [
                (vec![v(&t, "z")], Expr::one()),
                (vec![v(&t, "q1")], -e(&t, "p1")),
                (vec![v(&t, "q2")], -e(&t, "p1")),
            ],
        );
        assert_eq!(eta0, expected);
        let d_eta0 = exterior_derivative(&eta0);
        assert!(!wedge(&eta0, &d_eta0).is_zero());
        assert!(wedge(&eta0, &wedge(&d_eta0, &d_eta0)).is_zero());
        let c = VectorField::from_components([(v(&t, "q1"), Expr::one()), (v(&t, "q2"), Expr::int(-1))]);
        assert!(interior_product(&c, &d_eta0).unwrap().is_zero());
    }

    #[test]
    fn example_one_primary_pullback() {
        let t = table();
        let omega = exterior_derivative(&contact_form(&t, 4));
        let solved = BTreeMap::from([(v(&t, "p1"), Expr::zero()), (v(&t, "p4"), e(&t, "p3 - p2"))]);
        let omega0 = pullback_to_surface(&omega, &solved).unwrap();
        let d = |a: &str| DifferentialForm::dvar(v(&t, a));
        let expected = wedge(&d("q2"), &d("p2"))
            .add(&wedge(&d("q3"), &d("p3")))
            .unwrap()
            .add(&wedge(&d("q4"), &d("p3").sub(&d("p2")).unwrap()))
            .unwrap();
        assert_eq!(omega0, expected);
        assert_eq!(pullback_to_surface(&omega, &BTreeMap::new()).unwrap(), omega);
    }

    #[test]
    fn cyclic_bindings_are_rejected() {
        let t = table();
        let solved = BTreeMap::from([(v(&t, "p1"), e(&t, "p2")), (v(&t, "p2"), e(&t, "p1 + 1"))]);
        let err = pullback_to_surface(&contact_form(&t, 2), &solved).unwrap_err();
        assert!(matches!(err, ExteriorError::CyclicBindings(_)));
        let chained = BTreeMap::from([(v(&t, "p1"), e(&t, "p2")), (v(&t, "p2"), e(&t, "q1"))]);
        let f = pullback_to_surface(&DifferentialForm::scalar(e(&t, "p1")), &chained).unwrap();
        assert_eq!(f.as_scalar(), Some(e(&t, "q1")));
    }

    #[test]
    fn eval_two_form() {
        let t = table();
        let omega = wedge(&DifferentialForm::dvar(v(&t, "q1")), &DifferentialForm::dvar(v(&t, "p1")));
        let a = VectorField::basis(v(&t, "q1"));
        let b = VectorField::basis(v(&t, "p1"));
        assert_eq!(omega.eval(&[&a, &b]).unwrap(), Expr::one());
        assert_eq!(omega.eval(&[&b, &a]).unwrap(), Expr::int(-1));
        let coords = [v(&t, "q1"), v(&t, "p1")];
        assert_eq!(omega.matrix(&coords), SymMatrix::from_ints(&[&[0, 1], &[-1, 0]]));
    }
}
