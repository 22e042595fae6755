//! Deterministic pretty-printer. Output is valid input for the parser and
//! re-parses to the same canonical expression.

use num_traits::{One, Signed};

use super::expr::Expr;
use super::poly::{Coeff, Monomial, Poly};
use super::vars::{Var, VarTable};

pub(crate) fn render(e: &Expr, vars: &VarTable) -> String {
    render_with(e, &|v| vars.name(v).to_string())
}

pub(crate) fn render_indexed(e: &Expr) -> String {
    render_with(e, &|v| format!("x{}", v.index()))
}

fn render_with(e: &Expr, name: &dyn Fn(Var) -> String) -> String {
    let num = render_poly(e.numerator(), name);
    if e.denominator().is_one() {
        return num;
    }
    let num_terms = e.numerator().terms();
    let num = if num_terms.len() > 1 || num_terms[0].1.is_negative() {
        format!("({num})")
    } else {
        num
    };
    let den_terms = e.denominator().terms();
    let bare = den_terms.len() == 1 && den_terms[0].1.is_one() && den_terms[0].0.pairs().len() == 1;
    let den = render_poly(e.denominator(), name);
    if bare {
        format!("{num}/{den}")
    } else {
        format!("{num}/({den})")
    }
}

pub(crate) fn render_poly(p: &Poly, name: &dyn Fn(Var) -> String) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&render_term(m, &c.abs(), name));
    }
    out
}

fn render_term(m: &Monomial, c: &Coeff, name: &dyn Fn(Var) -> String) -> String {
    if m.is_one() {
        return render_coeff(c);
    }
    let mono = m
        .pairs()
        .iter()
        .map(|&(v, e)| {
            if e == 1 {
                name(v)
            } else {
                format!("{}^{}", name(v), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*");
    if c.is_one() {
        mono
    } else {
        format!("{}*{}", render_coeff(c), mono)
    }
}

pub(crate) fn render_coeff(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}
