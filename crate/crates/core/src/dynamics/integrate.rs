use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::mechanics::PhaseSpace;
use crate::symexpr::{Expr, ExprError, Var};

use super::{DynamicsError, EquationsOfMotion};

/// Tolerance on the constraints at the initial state.
const INIT_TOLERANCE: f64 = 1e-12;

/// Floating-point value of `e` at `point`.
pub fn evaluate_at(e: &Expr, point: &BTreeMap<Var, f64>, space: &PhaseSpace) -> Result<f64, DynamicsError> {
    e.eval_f64(&|v| point.get(&v).copied()).map_err(|err| match err {
        ExprError::UnboundVariable(v) => DynamicsError::UnboundVariable(space.name(v).to_string()),
        ExprError::Pole => DynamicsError::Pole(space.render(e)),
        other => other.into(),
    })
}

/// Samples of a fixed-step integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub vars: Vec<Var>,
    pub names: Vec<String>,
    pub times: Vec<f64>,
    /// One row per sample, ordered like `vars`.
    pub states: Vec<Vec<f64>>,
    /// Multiplier bindings used, rendered.
    pub multipliers: Vec<(String, String)>,
}

impl Trajectory {
    pub fn value(&self, var: Var, sample: usize) -> Option<f64> {
        let i = self.vars.iter().position(|&v| v == var)?;
        self.states.get(sample).map(|s| s[i])
    }

    pub fn point(&self, sample: usize) -> BTreeMap<Var, f64> {
        self.vars.iter().copied().zip(self.states[sample].iter().copied()).collect()
    }

    pub fn last(&self) -> BTreeMap<Var, f64> {
        self.point(self.states.len() - 1)
    }

    /// CSV with a `t` column followed by one column per variable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.states) {
            write!(out, "{t:?}").expect("writing to a String");
            for x in row {
                write!(out, ",{x:?}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}

/// Classical fourth-order Runge–Kutta integration of the equations of motion
/// of the non-pivot variables. Pivot variables of the final surface are
/// reconstructed from the solved constraints at every evaluation.
///
/// `init` may omit pivot variables (they are reconstructed) and other
/// variables (they default to 0). The completed initial state must satisfy
/// every final constraint to 1e-12.
pub fn integrate(
    eom: &EquationsOfMotion,
    init: &BTreeMap<Var, f64>,
    multipliers: &BTreeMap<Var, Expr>,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    let space = eom.space();
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(DynamicsError::InvalidStep(format!("need 0 < dt and 0 < t_end, got dt={dt}, t_end={t_end}")));
    }
    let steps = (t_end / dt).round();
    if steps < 1.0 || ((steps * dt) - t_end).abs() > 1e-9 * t_end {
        return Err(DynamicsError::InvalidStep(format!("dt={dt} does not divide t_end={t_end}")));
    }
    let steps = steps as usize;

    let coords = space.phase_coords();
    let chart = eom.chart();
    let free: Vec<Var> = coords.iter().copied().filter(|&v| !chart.is_pivot(v)).collect();
    let pivots: Vec<(Var, Expr)> = chart.solved().iter().map(|(v, e)| (*v, e.clone())).collect();

    let mut rows = Vec::with_capacity(free.len());
    for &x in &free {
        let rhs = eom.rhs(x).expect("one row per coordinate").substitute(multipliers)?;
        if let Some(m) = rhs.free_vars().into_iter().find(|&v| space.is_multiplier(v)) {
            return Err(DynamicsError::UnboundMultiplier(space.name(m).to_string()));
        }
        rows.push(rhs);
    }

    let complete = |state: &[f64]| -> Result<BTreeMap<Var, f64>, DynamicsError> {
        let mut point: BTreeMap<Var, f64> = free.iter().copied().zip(state.iter().copied()).collect();
        for (v, e) in &pivots {
            let x = evaluate_at(e, &point, space)?;
            point.insert(*v, x);
        }
        Ok(point)
    };

    let mut start: BTreeMap<Var, f64> = coords.iter().map(|&v| (v, init.get(&v).copied().unwrap_or(0.0))).collect();
    for (v, e) in &pivots {
        if !init.contains_key(v) {
            let x = evaluate_at(e, &start, space)?;
            start.insert(*v, x);
        }
    }
    for c in eom.constraints() {
        let value = evaluate_at(c, &start, space)?;
        if value.abs() > INIT_TOLERANCE {
            return Err(DynamicsError::ConstraintViolation {
                constraint: space.render(c),
                value,
            });
        }
    }

    let field = |state: &[f64]| -> Result<Vec<f64>, DynamicsError> {
        let point = complete(state)?;
        rows.iter().map(|r| evaluate_at(r, &point, space)).collect()
    };
    let sample = |state: &[f64]| -> Result<Vec<f64>, DynamicsError> {
        let point = complete(state)?;
        // Adding 0.0 turns -0.0 into 0.0.
        Ok(coords.iter().map(|v| point[v] + 0.0).collect())
    };

    let mut y: Vec<f64> = free.iter().map(|v| start[v]).collect();
    let mut times = vec![0.0];
    let mut states = vec![sample(&y)?];
    let axpy = |a: &[f64], h: f64, b: &[f64]| a.iter().zip(b).map(|(x, k)| x + h * k).collect::<Vec<f64>>();
    for step in 1..=steps {
        let k1 = field(&y)?;
        let k2 = field(&axpy(&y, dt / 2.0, &k1))?;
        let k3 = field(&axpy(&y, dt / 2.0, &k2))?;
        let k4 = field(&axpy(&y, dt, &k3))?;
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        times.push(step as f64 * dt);
        states.push(sample(&y)?);
    }

    Ok(Trajectory {
        vars: coords.clone(),
        names: coords.iter().map(|&v| space.name(v).to_string()).collect(),
        times,
        states,
        multipliers: multipliers
            .iter()
            .map(|(m, e)| (space.name(*m).to_string(), space.render(e)))
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftReport {
    /// Rendered constraint and its largest absolute value along the trajectory.
    pub per_constraint: Vec<(String, f64)>,
    pub max: f64,
}

/// Largest `|φ|` over all samples, per constraint.
pub fn drift_report(traj: &Trajectory, constraints: &[Expr], space: &PhaseSpace) -> Result<DriftReport, DynamicsError> {
    let mut per_constraint = Vec::with_capacity(constraints.len());
    for c in constraints {
        let mut worst: f64 = 0.0;
        for i in 0..traj.states.len() {
            worst = worst.max(evaluate_at(c, &traj.point(i), space)?.abs());
        }
        per_constraint.push((space.render(c), worst));
    }
    let max = per_constraint.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    Ok(DriftReport { per_constraint, max })
}
