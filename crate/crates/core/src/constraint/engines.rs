use crate::exterior::{
    characteristic_distribution, differential, form_kernel, orthogonal_complement, pair_with, DifferentialForm,
    Distribution, Pairing,
};
use crate::mechanics::{canonical_contact_form, reeb, BracketKind, DiracStructure, MechanicsError, PhaseSpace, SpaceKind};
use crate::symexpr::{Chart, Expr, Var};

use super::{
    normalize_constraint, surface_chart, Constraint, ConstraintError, ConstraintLedger, Inconsistency, LedgerStatus,
    Origin,
};

/// Ambient distribution for the orthogonal complements of the contact engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContactAmbient {
    /// `TP_k^⊥` is taken inside `TP_k`.
    #[default]
    Stage,
    /// `TP_k^⊥` is taken inside `TP_0`.
    Primary,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StabilizeOptions {
    /// Stage limit; defaults to `2·dim + 1`.
    pub max_stages: Option<usize>,
    pub contact_ambient: ContactAmbient,
}

impl StabilizeOptions {
    fn cap(&self, space: &PhaseSpace) -> usize {
        self.max_stages.unwrap_or(2 * space.dim() + 1)
    }
}

enum Added {
    New,
    Implied,
    Contradiction(Expr),
}

/// Growing constraint list together with the chart of its surface.
struct Chain {
    ledger: ConstraintLedger,
    chart: Chart,
}

impl Chain {
    fn start(space: PhaseSpace, primaries: &[Expr]) -> Result<Chain, ConstraintError> {
        let mut chain = Chain {
            ledger: ConstraintLedger::new(space),
            chart: Chart::empty(),
        };
        for p in primaries {
            if let Added::Contradiction(_) = chain.add(p, 0, Origin::Legendre)? {
                return Err(ConstraintError::Inconsistent(chain.ledger.space.render(p)));
            }
        }
        Ok(chain)
    }

    /// Adds `candidate` unless it already vanishes on the current surface.
    fn add(&mut self, candidate: &Expr, stage: usize, origin: Origin) -> Result<Added, ConstraintError> {
        let r = self.chart.reduce(candidate)?;
        if r.is_zero() {
            return Ok(Added::Implied);
        }
        if r.is_constant() {
            return Ok(Added::Contradiction(r));
        }
        self.ledger.constraints.push(Constraint {
            expr: normalize_constraint(&r),
            stage,
            origin,
            classification: super::Classification::Unclassified,
        });
        self.chart = surface_chart(&self.ledger.exprs(), &self.ledger.space)?;
        Ok(Added::New)
    }

    fn fail(&mut self, stage: usize, source: Option<usize>, residual: Expr) {
        self.ledger.status = LedgerStatus::Inconsistent;
        self.ledger.inconsistency = Some(Inconsistency { stage, source, residual });
    }

    fn finish(mut self) -> ConstraintLedger {
        self.ledger.frozen = self.ledger.is_stabilized() && self.chart.rank() == self.ledger.space.dim();
        self.ledger
    }
}

fn require(space: &PhaseSpace, kind: SpaceKind) -> Result<(), ConstraintError> {
    if space.kind() == kind {
        Ok(())
    } else {
        Err(MechanicsError::WrongKind { expected: kind }.into())
    }
}

/// Dirac–Bergmann stabilization with the primary Hamiltonian
/// `H_P = H0 + λ_α φ^α`.
///
/// Each stage computes the time derivative of the constraints added by the
/// previous stage and weak-reduces it. A zero residual is discarded, a
/// nonzero constant makes the system inconsistent, a residual containing
/// multipliers fixes its lowest multiplier, and anything else is a new
/// constraint. Symplectic spaces use `{φ, H_P}`; contact spaces use
/// `{φ, H_P}_J − φ R(H_P)`.
pub fn stabilize_dirac_bergmann(
    h0: &Expr,
    primaries: &[Expr],
    space: &PhaseSpace,
    opts: &StabilizeOptions,
) -> Result<ConstraintLedger, ConstraintError> {
    let kind = match space.kind() {
        SpaceKind::Symplectic => BracketKind::Poisson,
        SpaceKind::Contact => BracketKind::Jacobi,
    };
    let sp = space.with_multipliers(primaries.len());
    let structure = DiracStructure::new(kind, &[], &sp, None)?;
    let mut hp = h0.clone();
    for (i, phi) in primaries.iter().enumerate() {
        hp = &hp + &(&Expr::var(sp.multiplier(i)) * phi);
    }
    let mut chain = Chain::start(sp.clone(), primaries)?;
    let cap = opts.cap(space);
    let mut active: Vec<usize> = (0..chain.ledger.constraints.len()).collect();
    let mut stage = 0;
    while !active.is_empty() {
        stage += 1;
        if stage > cap {
            chain.ledger.status = LedgerStatus::ExceededIterations;
            break;
        }
        chain.ledger.stages_run = stage;
        let mut added = Vec::new();
        for idx in active {
            let phi = chain.ledger.constraints[idx].expr.clone();
            let r = chain.chart.reduce(&structure.evolve(&phi, &hp))?;
            if r.is_zero() {
                continue;
            }
            if r.is_constant() {
                chain.fail(stage, Some(idx), r);
                return Ok(chain.finish());
            }
            let multipliers: Vec<Var> = r.free_vars().into_iter().filter(|&v| sp.is_multiplier(v)).collect();
            if !multipliers.is_empty() {
                let (m, value) = solve_multiplier(&r, &multipliers, &chain.chart)
                    .ok_or_else(|| ConstraintError::Classification(format!("cannot solve `{}` for a multiplier", sp.render(&r))))?;
                for v in chain.ledger.multiplier_fixings.values_mut() {
                    *v = v.substitute_one(m, &value)?;
                }
                chain.ledger.multiplier_fixings.insert(m, value.clone());
                hp = hp.substitute_one(m, &value)?;
                continue;
            }
            match chain.add(&r, stage, Origin::Consistency)? {
                Added::New => added.push(chain.ledger.constraints.len() - 1),
                Added::Implied => {}
                Added::Contradiction(c) => {
                    chain.fail(stage, Some(idx), c);
                    return Ok(chain.finish());
                }
            }
        }
        active = added;
    }
    Ok(chain.finish())
}

/// Solves `r = 0` for the lowest multiplier in which it is affine.
fn solve_multiplier(r: &Expr, multipliers: &[Var], chart: &Chart) -> Option<(Var, Expr)> {
    multipliers.iter().find_map(|&m| {
        let (a, b) = r.affine_in(m)?;
        let value = (-&b).checked_div(&a).ok()?;
        Some((m, chart.reduce(&value).ok()?))
    })
}

/// Adds the residuals of one geometric stage; returns whether anything new
/// appeared, or stops the chain on a contradiction.
fn absorb(chain: &mut Chain, residuals: Vec<Expr>, stage: usize, origin: Origin) -> Result<Option<bool>, ConstraintError> {
    let mut grew = false;
    for r in residuals {
        match chain.add(&r, stage, origin)? {
            Added::New => grew = true,
            Added::Implied => {}
            Added::Contradiction(c) => {
                chain.fail(stage, None, c);
                return Ok(None);
            }
        }
    }
    Ok(Some(grew))
}

fn run_geometric(
    space: &PhaseSpace,
    primaries: &[Expr],
    opts: &StabilizeOptions,
    mut stage_distribution: impl FnMut(usize, &Distribution, &Chart) -> Result<Distribution, ConstraintError>,
    alpha: &DifferentialForm,
) -> Result<ConstraintLedger, ConstraintError> {
    let coords = space.phase_coords();
    let mut chain = Chain::start(space.clone(), primaries)?;
    if chain.ledger.constraints.is_empty() {
        return Ok(chain.finish());
    }
    let t0 = Distribution::tangent(&coords, &chain.chart)?;
    let cap = opts.cap(space);
    let mut stage = 0;
    loop {
        stage += 1;
        if stage > cap {
            chain.ledger.status = LedgerStatus::ExceededIterations;
            break;
        }
        chain.ledger.stages_run = stage;
        let d = stage_distribution(stage, &t0, &chain.chart)?;
        let residuals = pair_with(alpha, &d)?;
        let origin = if stage == 1 {
            Origin::GeometricKernel
        } else {
            Origin::GeometricTangency
        };
        match absorb(&mut chain, residuals, stage, origin)? {
            Some(true) => {}
            Some(false) => break,
            None => return Ok(chain.finish()),
        }
    }
    Ok(chain.finish())
}

/// Presymplectic constraint algorithm on `M0 = {primaries = 0}`.
///
/// Stage 1 imposes `⟨dH0, ker ω0⟩ = 0`; stage `k + 1` imposes
/// `⟨dH0, TM_k^⊥⟩ = 0` with the complement taken inside `TM0`. Stops when a
/// stage adds nothing.
pub fn stabilize_geometric_symplectic(
    h0: &Expr,
    primaries: &[Expr],
    space: &PhaseSpace,
    opts: &StabilizeOptions,
) -> Result<ConstraintLedger, ConstraintError> {
    require(space, SpaceKind::Symplectic)?;
    let coords = space.phase_coords();
    let omega = DifferentialForm::from_terms(2, (0..space.n()).map(|i| (vec![space.q(i), space.p(i)], Expr::one())));
    let dh = differential(h0);
    run_geometric(
        space,
        primaries,
        opts,
        |stage, t0, chart| {
            if stage == 1 {
                return Ok(form_kernel(&omega, t0)?);
            }
            let tk = Distribution::tangent(&coords, chart)?;
            Ok(orthogonal_complement(&tk, Pairing::Symplectic(&omega), &t0.on_surface(chart)?)?)
        },
        &dh,
    )
}

/// Precontact constraint algorithm on `P0 = {primaries = 0}` with the Reeb
/// field `∂z`.
///
/// With `α0 = dH0 − (R(H0) + H0) η`, stage 1 imposes `⟨α0, ker η ∩ ker dη⟩ = 0`
/// on `TP0` and stage `k + 1` imposes `⟨α0, TP_k^⊥⟩ = 0` under the pairing
/// `dη + η ⊗ η`.
pub fn stabilize_geometric_contact(
    h0: &Expr,
    primaries: &[Expr],
    space: &PhaseSpace,
    opts: &StabilizeOptions,
) -> Result<ConstraintLedger, ConstraintError> {
    require(space, SpaceKind::Contact)?;
    let coords = space.phase_coords();
    let eta = canonical_contact_form(space)?;
    let coefficient = &reeb(h0, space) + h0;
    let alpha = differential(h0).sub(&eta.scale(&coefficient))?;
    let ambient = opts.contact_ambient;
    run_geometric(
        space,
        primaries,
        opts,
        |stage, t0, chart| {
            if stage == 1 {
                return Ok(characteristic_distribution(&eta, t0)?);
            }
            let tk = Distribution::tangent(&coords, chart)?;
            let amb = match ambient {
                ContactAmbient::Stage => tk.clone(),
                ContactAmbient::Primary => t0.on_surface(chart)?,
            };
            Ok(orthogonal_complement(&tk, Pairing::Contact(&eta), &amb)?)
        },
        &alpha,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanics::{legendre_analyze, LagrangianSystem};

    fn analyze(kind: SpaceKind, n: usize, l: &str) -> (PhaseSpace, Expr, Vec<Expr>) {
        let s = PhaseSpace::new(kind, n);
        let sys = LagrangianSystem::new(s.clone(), s.parse(l).unwrap()).unwrap();
        let r = legendre_analyze(&sys).unwrap();
        (s, r.h0, r.primaries)
    }

    const EXAMPLE_ONE: &str = "(1/2)*((q1 + v2 + v3)^2 + (v4 - v2)^2 - 2*q2*q4)";
    const EXAMPLE_TWO: &str = "(1/2)*(v1 + v2)^2 + q1 + q2*z";

    #[test]
    fn example_one_dirac_bergmann() {
        let (s, h0, prim) = analyze(SpaceKind::Symplectic, 4, EXAMPLE_ONE);
        let l = stabilize_dirac_bergmann(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        let e = |t: &str| l.space.parse(t).unwrap();
        assert_eq!(l.status, LedgerStatus::Stabilized);
        assert_eq!(l.stages_run, 2);
        assert_eq!(l.at_stage(1), vec![e("p3"), e("q2 + q4")]);
        assert_eq!(l.multiplier_fixings.len(), 1);
        assert_eq!(l.multiplier_fixings[&l.space.multiplier(1)], e("-(1/2)*p4"));
        assert!(l.constraints.iter().filter(|c| c.stage == 1).all(|c| c.origin == Origin::Consistency));
        assert!(!l.frozen);
    }

    #[test]
    fn example_one_geometric() {
        let (s, h0, prim) = analyze(SpaceKind::Symplectic, 4, EXAMPLE_ONE);
        let l = stabilize_geometric_symplectic(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        let e = |t: &str| s.parse(t).unwrap();
        assert_eq!(l.status, LedgerStatus::Stabilized);
        assert_eq!(l.stages_run, 2);
        assert_eq!(l.exprs(), vec![e("p1"), e("p2 - p3 + p4"), e("p3"), e("q2 + q4")]);
        assert_eq!(l.constraints[2].origin, Origin::GeometricKernel);
    }

    #[test]
    fn example_two_geometric_contact() {
        let (s, h0, prim) = analyze(SpaceKind::Contact, 2, EXAMPLE_TWO);
        let l = stabilize_geometric_contact(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        assert_eq!(l.status, LedgerStatus::Stabilized);
        assert_eq!(l.exprs(), vec![s.parse("p1 - p2").unwrap(), s.parse("1 - z").unwrap()]);
        assert_eq!(l.stages_run, 2);
    }

    #[test]
    fn example_two_primary_ambient_goes_further() {
        let (s, h0, prim) = analyze(SpaceKind::Contact, 2, EXAMPLE_TWO);
        let opts = StabilizeOptions {
            contact_ambient: ContactAmbient::Primary,
            ..StabilizeOptions::default()
        };
        let l = stabilize_geometric_contact(&h0, &prim, &s, &opts).unwrap();
        assert_eq!(l.at_stage(1), vec![s.parse("1 - z").unwrap()]);
        assert!(l.constraints.len() > 2);
    }

    #[test]
    fn contact_dirac_bergmann_continues_past_one_minus_z() {
        let (s, h0, prim) = analyze(SpaceKind::Contact, 2, EXAMPLE_TWO);
        let l = stabilize_dirac_bergmann(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        assert_eq!(l.at_stage(1), vec![s.parse("1 - z").unwrap()]);
        assert_eq!(l.at_stage(2), vec![s.parse("p2^2 + 2*q1 + 2*q2").unwrap()]);
    }

    #[test]
    fn regular_systems_have_empty_ledgers() {
        let (s, h0, prim) = analyze(SpaceKind::Symplectic, 2, "(1/2)*(v1^2 + v2^2)");
        for l in [
            stabilize_dirac_bergmann(&h0, &prim, &s, &StabilizeOptions::default()).unwrap(),
            stabilize_geometric_symplectic(&h0, &prim, &s, &StabilizeOptions::default()).unwrap(),
        ] {
            assert!(l.constraints.is_empty());
            assert_eq!(l.stages_run, 0);
            assert!(l.is_stabilized());
        }
        let (c, h0, prim) = analyze(SpaceKind::Contact, 1, "(1/2)*v1^2 - q1 - z");
        let l = stabilize_geometric_contact(&h0, &prim, &c, &StabilizeOptions::default()).unwrap();
        assert!(l.constraints.is_empty());
    }

    #[test]
    fn inconsistent_system() {
        let (s, h0, prim) = analyze(SpaceKind::Symplectic, 2, "(1/2)*v1^2 + q2");
        let l = stabilize_dirac_bergmann(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        assert_eq!(l.status, LedgerStatus::Inconsistent);
        let inc = l.inconsistency.unwrap();
        assert_eq!(inc.residual, Expr::one());
        assert_eq!(inc.source, Some(0));
        let g = stabilize_geometric_symplectic(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        assert_eq!(g.status, LedgerStatus::Inconsistent);
    }

    #[test]
    fn multiplier_fixed_to_zero() {
        let (s, h0, prim) = analyze(SpaceKind::Symplectic, 2, "(1/2)*v1^2 + (1/2)*q2^2");
        let l = stabilize_dirac_bergmann(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        assert!(l.is_stabilized());
        assert_eq!(l.exprs(), vec![s.parse("p2").unwrap(), s.parse("q2").unwrap()]);
        assert_eq!(l.multiplier_fixings[&l.space.multiplier(0)], Expr::zero());
    }

    #[test]
    fn frozen_dynamics_and_engine_agreement() {
        let (s, h0, prim) = analyze(SpaceKind::Symplectic, 2, "(1/2)*v1^2 + q1*q2");
        let a = stabilize_dirac_bergmann(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        let g = stabilize_geometric_symplectic(&h0, &prim, &s, &StabilizeOptions::default()).unwrap();
        assert!(a.frozen && g.frozen);
        assert_eq!(a.constraints.len(), 4);
        assert_eq!(g.constraints.len(), 4);
    }

    #[test]
    fn iteration_cap() {
        let (s, h0, prim) = analyze(SpaceKind::Symplectic, 2, "(1/2)*v1^2 + q1*q2");
        let opts = StabilizeOptions {
            max_stages: Some(1),
            ..StabilizeOptions::default()
        };
        let l = stabilize_dirac_bergmann(&h0, &prim, &s, &opts).unwrap();
        assert_eq!(l.status, LedgerStatus::ExceededIterations);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let (s, h0, prim) = analyze(SpaceKind::Contact, 2, EXAMPLE_TWO);
        assert!(stabilize_geometric_symplectic(&h0, &prim, &s, &StabilizeOptions::default()).is_err());
    }
}
