use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::gcd;
use super::poly::{Coeff, Monomial, Poly};
use super::vars::{Var, VarTable};
use super::ExprError;

/// Exact multivariate rational function in canonical form.
///
/// Canonical means: numerator and denominator are coprime, the denominator is
/// monic under graded-lex order, and zero is `0/1`. Structural equality is
/// therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n/d` as a constant. Panics on `d == 0`.
    pub fn frac(n: i64, d: i64) -> Self {
        Expr::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(c: BigRational) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn var(v: Var) -> Self {
        Expr {
            num: Poly::var(v),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num/den` in canonical form.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        if let Some(c) = den.as_constant() {
            return Ok(Expr::from_poly(num.scale(&c.recip())));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff().recip();
        Ok(Expr {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Rough cost measure: total number of terms, then total degree.
    pub fn size(&self) -> (usize, u32) {
        (
            self.num.terms().len() + self.den.terms().len(),
            self.num.total_degree() + self.den.total_degree(),
        )
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut vs = self.num.vars();
        vs.extend(self.den.vars());
        vs
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr, ExprError> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Expr::from_parts(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn recip(&self) -> Result<Expr, ExprError> {
        Expr::one().checked_div(self)
    }

    pub fn pow(&self, e: u32) -> Expr {
        // Powers of coprime parts stay coprime.
        Expr {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn powi(&self, e: i32) -> Result<Expr, ExprError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            self.recip().map(|r| r.pow(e.unsigned_abs()))
        }
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Exact partial derivative with respect to `v`.
    pub fn diff(&self, v: Var) -> Expr {
        if self.den.is_one() {
            return Expr::from_poly(self.num.derivative(v));
        }
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return Expr::from_parts(dn, self.den.clone()).expect("denominator is nonzero");
        }
        let top = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::from_parts(top, self.den.pow(2)).expect("denominator is nonzero")
    }

    /// Simultaneous substitution: every binding is applied to the original expression.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Expr>) -> Result<Expr, ExprError> {
        if bindings.is_empty() || !self.free_vars().iter().any(|v| bindings.contains_key(v)) {
            return Ok(self.clone());
        }
        let num = substitute_poly(&self.num, bindings);
        let den = substitute_poly(&self.den, bindings);
        if den.is_zero() {
            return Err(ExprError::Pole);
        }
        num.checked_div(&den)
    }

    pub fn substitute_one(&self, v: Var, value: &Expr) -> Result<Expr, ExprError> {
        let mut b = BTreeMap::new();
        b.insert(v, value.clone());
        self.substitute(&b)
    }

    /// Floating-point value at a point. Every free variable must be bound.
    pub fn eval_f64(&self, point: &dyn Fn(Var) -> Option<f64>) -> Result<f64, ExprError> {
        if let Some(v) = self.free_vars().into_iter().find(|&v| point(v).is_none()) {
            return Err(ExprError::UnboundVariable(v));
        }
        let lookup = |v: Var| point(v).expect("checked above");
        let n = self.num.eval_f64(&lookup);
        if self.den.is_one() {
            return Ok(n);
        }
        let d = self.den.eval_f64(&lookup);
        if d.abs() < 1e-300 {
            return Err(ExprError::Pole);
        }
        Ok(n / d)
    }

    /// Degree of the numerator in `v` (the denominator must be free of `v` for
    /// this to be the polynomial degree of the function).
    pub fn degree_in(&self, v: Var) -> u32 {
        self.num.degree_in(v)
    }

    /// Splits `self = a*v + b` when `self` is affine in `v` with `a`, `b` free of `v`.
    pub fn affine_in(&self, v: Var) -> Option<(Expr, Expr)> {
        if self.den.contains_var(v) || self.num.degree_in(v) != 1 {
            return None;
        }
        let cs = self.num.coefficients_in(v);
        let a = Expr::from_parts(cs[1].clone(), self.den.clone()).ok()?;
        let b = Expr::from_parts(cs[0].clone(), self.den.clone()).ok()?;
        Some((a, b))
    }

    /// Expression with a positive leading numerator coefficient.
    pub fn leading_positive(&self) -> Expr {
        if self.num.leading_is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// True when `self == c * other` for a nonzero rational constant `c`.
    pub fn is_constant_multiple_of(&self, other: &Expr) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        match self.checked_div(other) {
            Ok(q) => q.is_constant(),
            Err(_) => false,
        }
    }

    pub fn render(&self, vars: &VarTable) -> String {
        super::print::render(self, vars)
    }

    pub fn display<'a>(&'a self, vars: &'a VarTable) -> DisplayExpr<'a> {
        DisplayExpr { expr: self, vars }
    }
}

fn substitute_poly(p: &Poly, bindings: &BTreeMap<Var, Expr>) -> Expr {
    let mut cache: BTreeMap<(Var, u32), Expr> = BTreeMap::new();
    let mut kept: Vec<(Monomial, Coeff)> = Vec::new();
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut factor = Expr::rational(c.clone());
        let mut rest = Vec::new();
        for &(v, e) in m.pairs() {
            match bindings.get(&v) {
                Some(val) => {
                    let pw = cache.entry((v, e)).or_insert_with(|| val.pow(e)).clone();
                    factor = &factor * &pw;
                }
                None => rest.push((v, e)),
            }
        }
        if rest.len() == m.pairs().len() {
            kept.push((m.clone(), c.clone()));
        } else {
            acc = &acc + &(&factor * &Expr::from_poly(Poly::term(Monomial::from_pairs(rest), Coeff::one())));
        }
    }
    &acc + &Expr::from_poly(Poly::from_terms(kept))
}

pub struct DisplayExpr<'a> {
    expr: &'a Expr,
    vars: &'a VarTable,
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expr.render(self.vars))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Without a table, variables print by index.
        write!(f, "{}", super::print::render_indexed(self))
    }
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::var(v)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Expr::from_poly(self.num.add(&rhs.num));
            }
            return Expr::from_parts(self.num.add(&rhs.num), self.den.clone()).expect("nonzero denominator");
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Expr::from_parts(num, self.den.mul(&rhs.den)).expect("nonzero denominator")
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(self.num.mul(&rhs.num));
        }
        Expr::from_parts(self.num.mul(&rhs.num), self.den.mul(&rhs.den)).expect("nonzero denominator")
    }
}

/// Panics on division by zero; use [`Expr::checked_div`] when the divisor may vanish.
impl Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { (&self).$m(&rhs) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { (&self).$m(rhs) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |acc, x| &acc + &x)
    }
}

/// Sign helper used by constraint normalization: a nonzero constant term decides
/// the sign, otherwise the leading coefficient does.
pub fn orient(e: &Expr) -> Expr {
    let c = e.numerator().constant_term();
    let flip = if !c.is_zero() {
        c.is_negative()
    } else {
        e.numerator().leading_is_negative()
    };
    if flip {
        -e
    } else {
        e.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u16) -> Expr {
        Expr::var(Var(i))
    }

    #[test]
    fn gcd_cancellation() {
        let a = &x(0) * &x(0) - &x(1) * &x(1);
        let b = &x(0) - &x(1);
        assert_eq!(&a / &b, &x(0) + &x(1));
    }

    #[test]
    fn subtraction_gives_unique_zero() {
        let a = (&x(0) + &Expr::one()) / (&x(1) - &Expr::int(2));
        assert_eq!(&a - &a, Expr::zero());
        assert!((&a - &a).denominator().is_one());
    }

    #[test]
    fn denominator_is_monic() {
        let a = Expr::one() / (Expr::int(-2) * x(0));
        assert!(a.denominator().leading_coeff().is_one());
        assert_eq!(a, Expr::frac(-1, 2) / x(0));
    }

    #[test]
    fn quotient_rule() {
        let f = x(0) / (&x(0) + &Expr::one());
        let expected = Expr::one() / (&x(0) + &Expr::one()).pow(2);
        assert_eq!(f.diff(Var(0)), expected);
    }

    #[test]
    fn substitution_pole() {
        let f = Expr::one() / (&x(0) - &Expr::one());
        let err = f.substitute_one(Var(0), &Expr::one()).unwrap_err();
        assert_eq!(err, ExprError::Pole);
    }

    #[test]
    fn simultaneous_substitution() {
        // x -> y, y -> x swaps instead of collapsing.
        let f = &x(0) - &(Expr::int(2) * x(1));
        let mut b = BTreeMap::new();
        b.insert(Var(0), x(1));
        b.insert(Var(1), x(0));
        assert_eq!(f.substitute(&b).unwrap(), &x(1) - &(Expr::int(2) * x(0)));
    }

    #[test]
    fn affine_split() {
        let f = &(&x(0) * &x(1)) + &Expr::int(3);
        let (a, b) = f.affine_in(Var(0)).unwrap();
        assert_eq!(a, x(1));
        assert_eq!(b, Expr::int(3));
        assert!((&x(0) * &x(0)).affine_in(Var(0)).is_none());
    }

    #[test]
    fn orientation_rule() {
        let z = x(2);
        assert_eq!(orient(&(&z - &Expr::one())), &Expr::one() - &z);
        assert_eq!(orient(&-x(1)), x(1));
    }
}
