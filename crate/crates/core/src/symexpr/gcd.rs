//! Multivariate polynomial gcd over the rationals.
//!
//! Recursive primitive pseudo-remainder sequences: the polynomial is viewed as
//! univariate in its lowest-indexed variable with coefficients in the remaining
//! variables, contents are split off recursively, and the primitive parts are
//! reduced with pseudo-division. Results are monic (leading coefficient 1).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::{Coeff, Poly};

pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let va = a.vars();
    let vb = b.vars();
    let x = *va.union(&vb).next().expect("non-constant polynomial has a variable");
    match (va.contains(&x), vb.contains(&x)) {
        (true, false) => gcd(&content(&a.coefficients_in(x)), b),
        (false, true) => gcd(a, &content(&b.coefficients_in(x))),
        _ => {
            let ua = a.coefficients_in(x);
            let ub = b.coefficients_in(x);
            let ca = content(&ua);
            let cb = content(&ub);
            let common = gcd(&ca, &cb);
            let pa = integral(primitive_with(&ua, &ca));
            let pb = integral(primitive_with(&ub, &cb));
            let g = primitive_prs(pa, pb);
            Poly::from_coefficients_in(&g, x).mul(&common).monic()
        }
    }
}

pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    a.mul(b)
        .div_exact(&g)
        .expect("gcd divides the product")
        .monic()
}

/// Gcd of the coefficients of a univariate view.
fn content(coeffs: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        acc = gcd(&acc, c);
        if acc.is_constant() {
            return Poly::one();
        }
    }
    acc
}

fn primitive_with(coeffs: &[Poly], content: &Poly) -> Vec<Poly> {
    coeffs
        .iter()
        .map(|c| c.div_exact(content).expect("content divides every coefficient"))
        .collect()
}

/// Primitive part, also rescaled to coprime integer coefficients; otherwise
/// the pseudo-remainder coefficients grow exponentially.
fn primitive(coeffs: &[Poly]) -> Vec<Poly> {
    let c = content(coeffs);
    integral(primitive_with(coeffs, &c))
}

/// Rescales by a rational constant to coprime integer coefficients.
fn integral(parts: Vec<Poly>) -> Vec<Poly> {
    let den = parts.iter().fold(BigInt::one(), |acc, p| acc.lcm(&p.denominator_lcm()));
    let cleared: Vec<Poly> = parts.iter().map(|p| p.scale(&Coeff::from_integer(den.clone()))).collect();
    let num = cleared.iter().fold(BigInt::zero(), |acc, p| acc.gcd(&p.numerator_gcd()));
    if num.is_zero() || num.is_one() {
        return cleared;
    }
    let factor = Coeff::new(BigInt::one(), num);
    cleared.iter().map(|p| p.scale(&factor)).collect()
}

fn trim(u: &mut Vec<Poly>) {
    while u.last().map(Poly::is_zero).unwrap_or(false) {
        u.pop();
    }
}

fn degree(u: &[Poly]) -> Option<usize> {
    u.iter().rposition(|c| !c.is_zero())
}

/// Pseudo-remainder of `a` by `b` in `D[x]`, up to a unit.
fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let n = degree(b).expect("divisor is nonzero");
    let lead_b = &b[n];
    let mut r: Vec<Poly> = a.to_vec();
    trim(&mut r);
    while let Some(d) = degree(&r) {
        if d < n {
            break;
        }
        let lead_r = r[d].clone();
        let shift = d - n;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(lead_b)).collect();
        for (k, bc) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&bc.mul(&lead_r));
        }
        trim(&mut next);
        r = next;
    }
    r
}

fn primitive_prs(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let (mut a, mut b) = if degree(&a) >= degree(&b) { (a, b) } else { (b, a) };
    trim(&mut a);
    trim(&mut b);
    loop {
        match degree(&b) {
            None => return primitive(&a),
            Some(0) => return vec![Poly::one()],
            Some(_) => {
                let r = pseudo_remainder(&a, &b);
                a = b;
                b = if r.is_empty() { r } else { primitive(&r) };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::poly::Coeff;
    use crate::symexpr::vars::Var;
    use num_bigint::BigInt;

    fn x(i: u16) -> Poly {
        Poly::var(Var(i))
    }

    fn k(n: i64) -> Poly {
        Poly::constant(Coeff::from_integer(BigInt::from(n)))
    }

    #[test]
    fn difference_of_squares() {
        let a = x(0).pow(2).sub(&x(1).pow(2));
        let b = x(0).sub(&x(1));
        assert_eq!(gcd(&a, &b), b.monic());
    }

    #[test]
    fn coprime_is_one() {
        let a = x(0).add(&k(1));
        let b = x(0).sub(&k(1));
        assert!(gcd(&a, &b).is_one());
        assert!(gcd(&x(0), &x(1)).is_one());
    }

    #[test]
    fn trivariate_common_factor() {
        let f = x(0).mul(&x(1)).add(&x(2)).add(&k(3));
        let g = x(0).sub(&x(2).pow(2));
        let h = x(1).add(&k(2));
        let a = f.mul(&g);
        let b = f.mul(&h).mul(&x(0));
        assert_eq!(gcd(&a, &b), f.monic());
    }

    #[test]
    fn monomial_content() {
        let a = x(0).pow(2).mul(&x(1));
        let b = x(0).mul(&x(1).pow(2));
        assert_eq!(gcd(&a, &b), x(0).mul(&x(1)));
    }

    #[test]
    fn lcm_of_linear_factors() {
        let a = x(0).sub(&k(1));
        let b = x(0).add(&k(1));
        assert_eq!(lcm(&a, &b), x(0).pow(2).sub(&k(1)));
    }
}
