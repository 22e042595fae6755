#![allow(dead_code)]

use constraint_forge_core::symexpr::{Expr, Var};
use proptest::prelude::*;

/// `(coefficient, exponents)` pairs; exponent vectors are as long as the
/// variable list they are later applied to (extra entries are ignored).
pub type Terms = Vec<(i64, Vec<u32>)>;

pub fn terms(nvars: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Terms> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0..=max_exp, nvars)), 1..=max_terms)
}

pub fn build(terms: &Terms, vars: &[Var]) -> Expr {
    terms
        .iter()
        .map(|(c, exps)| {
            vars.iter()
                .zip(exps)
                .fold(Expr::int(*c), |acc, (&v, &e)| &acc * &Expr::var(v).pow(e))
        })
        .sum()
}

/// Polynomial of total degree at most `max_deg`.
pub fn build_bounded(terms: &Terms, vars: &[Var], max_deg: u32) -> Expr {
    let kept: Terms = terms
        .iter()
        .filter(|(_, e)| e.iter().take(vars.len()).sum::<u32>() <= max_deg)
        .cloned()
        .collect();
    build(&kept, vars)
}
