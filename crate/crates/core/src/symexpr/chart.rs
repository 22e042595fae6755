//! Local chart on a constraint surface obtained by solving each constraint for
//! one pivot variable. Substituting the solved pivots realizes weak equality.

use std::collections::BTreeMap;

use super::expr::Expr;
use super::vars::Var;
use super::ExprError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChartError {
    #[error("constraint #{index} is not affine in any eligible variable")]
    Unsolvable { index: usize },
    #[error("constraint #{index} reduces to a nonzero constant on the surface")]
    Inconsistent { index: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Pivot solution of a constraint list.
///
/// Pivots are chosen greedily: each constraint, after substituting earlier
/// pivots, is solved for its lowest-ordered eligible variable in which it is
/// affine. Solved expressions are kept fully back-substituted, so they only
/// mention non-pivot variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chart {
    constraints: Vec<Expr>,
    solved: BTreeMap<Var, Expr>,
    pivots: Vec<(usize, Var)>,
    redundant: Vec<usize>,
}

impl Chart {
    pub fn empty() -> Self {
        Chart::default()
    }

    pub fn from_constraints(constraints: &[Expr], eligible: &dyn Fn(Var) -> bool) -> Result<Chart, ChartError> {
        let mut chart = Chart {
            constraints: constraints.to_vec(),
            ..Chart::default()
        };
        for (index, c) in constraints.iter().enumerate() {
            chart.push(index, c, eligible)?;
        }
        Ok(chart)
    }

    fn push(&mut self, index: usize, c: &Expr, eligible: &dyn Fn(Var) -> bool) -> Result<(), ChartError> {
        let r = self.reduce(c)?;
        if r.is_zero() {
            self.redundant.push(index);
            return Ok(());
        }
        if r.is_constant() {
            return Err(ChartError::Inconsistent { index });
        }
        // r = N/D vanishes exactly where N does.
        let num = Expr::from_poly(r.numerator().clone());
        let found = num
            .free_vars()
            .into_iter()
            .filter(|&v| eligible(v))
            .find_map(|v| num.affine_in(v).map(|(a, b)| (v, a, b)));
        let Some((pivot, a, b)) = found else {
            return Err(ChartError::Unsolvable { index });
        };
        let value = (-&b).checked_div(&a)?;
        for s in self.solved.values_mut() {
            *s = s.substitute_one(pivot, &value)?;
        }
        self.solved.insert(pivot, value);
        self.pivots.push((index, pivot));
        Ok(())
    }

    pub fn reduce(&self, e: &Expr) -> Result<Expr, ExprError> {
        e.substitute(&self.solved)
    }

    /// The constraints the chart was built from, in input order.
    pub fn constraints(&self) -> &[Expr] {
        &self.constraints
    }

    pub fn solved(&self) -> &BTreeMap<Var, Expr> {
        &self.solved
    }

    /// `(constraint index, pivot)` in solving order.
    pub fn pivots(&self) -> &[(usize, Var)] {
        &self.pivots
    }

    pub fn is_pivot(&self, v: Var) -> bool {
        self.solved.contains_key(&v)
    }

    /// Indices of constraints that were already implied by earlier ones.
    pub fn redundant(&self) -> &[usize] {
        &self.redundant
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{parse_expr, VarTable};

    #[test]
    fn example_one_pivots() {
        let t = VarTable::mechanics(4, false, "lambda", 2);
        let cs: Vec<Expr> = ["p1", "p2 - p3 + p4", "p3", "q2 + q4"]
            .iter()
            .map(|s| parse_expr(s, &t).unwrap())
            .collect();
        let chart = Chart::from_constraints(&cs, &|_| true).unwrap();
        let names: Vec<_> = chart.pivots().iter().map(|&(_, v)| t.name(v)).collect();
        assert_eq!(names, ["p1", "p2", "p3", "q2"]);
        assert_eq!(chart.solved()[&t.lookup("p2").unwrap()], parse_expr("-p4", &t).unwrap());
        let h = parse_expr("2*q2*q4", &t).unwrap();
        assert_eq!(chart.reduce(&h).unwrap(), parse_expr("-2*q4^2", &t).unwrap());
    }

    #[test]
    fn redundant_and_inconsistent() {
        let t = VarTable::mechanics(1, false, "l", 0);
        let cs: Vec<Expr> = ["q1 + p1", "2*q1 + 2*p1"].iter().map(|s| parse_expr(s, &t).unwrap()).collect();
        let chart = Chart::from_constraints(&cs, &|_| true).unwrap();
        assert_eq!(chart.redundant(), &[1]);
        let bad: Vec<Expr> = ["q1", "q1 + 1"].iter().map(|s| parse_expr(s, &t).unwrap()).collect();
        assert_eq!(
            Chart::from_constraints(&bad, &|_| true).unwrap_err(),
            ChartError::Inconsistent { index: 1 }
        );
    }

    #[test]
    fn nonlinear_everywhere_is_unsolvable() {
        let t = VarTable::mechanics(1, false, "l", 0);
        let cs = vec![parse_expr("q1^2 + p1^2 - 1", &t).unwrap()];
        assert_eq!(
            Chart::from_constraints(&cs, &|_| true).unwrap_err(),
            ChartError::Unsolvable { index: 0 }
        );
    }
}
