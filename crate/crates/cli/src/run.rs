//! The analysis pipeline behind each command.

use std::collections::BTreeMap;

use constraint_forge_core::constraint::{
    classify, coisotropy_check, stabilize_dirac_bergmann, stabilize_geometric_contact, stabilize_geometric_symplectic,
    ledgers_agree, ClassificationResult, ConstraintError, ConstraintLedger, ContactAmbient, LedgerStatus,
    StabilizeOptions,
};
use constraint_forge_core::dynamics::{
    drift_report, equations_of_motion, integrate, total_hamiltonian, DynamicsError, EquationsOfMotion,
};
use constraint_forge_core::exterior::SymMatrix;
use constraint_forge_core::mechanics::{
    cartan_forms, contact_class, legendre_analyze, LegendreResult, MechanicsError, PhaseSpace, SpaceKind,
};
use constraint_forge_core::symexpr::{Expr, ExprError, Var};

use crate::report::*;
use crate::sysfile::{Ambient, Engine, FileError, SystemFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Eom,
    Integrate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Eom => "eom",
            Command::Integrate => "integrate",
        }
    }
}

/// Command-line settings; each overrides the matching file option.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub engine: Option<Engine>,
    pub ambient: Option<Ambient>,
    pub multipliers: Vec<(String, String)>,
    pub init: Vec<(String, f64)>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    /// Where `integrate` writes the trajectory CSV.
    pub out: Option<String>,
    pub max_stages: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    File(#[from] FileError),
    #[error("symexpr: {0}")]
    Expr(#[from] ExprError),
    #[error("mechanics: {0}")]
    Mechanics(#[from] MechanicsError),
    #[error("constraint: {0}")]
    Constraint(#[from] ConstraintError),
    #[error("dynamics: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

/// Result of a run: the report plus the process exit status it implies.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: SystemReport,
    /// 0 when stabilized, 2 when inconsistent, 3 when the stage limit was hit.
    pub exit_code: i32,
    /// Human-readable reason for a nonzero exit code.
    pub diagnostic: Option<String>,
    pub csv: Option<String>,
}

fn render_matrix(m: &SymMatrix, space: &PhaseSpace) -> Vec<Vec<String>> {
    m.render(space.vars())
}

fn render_all(es: &[Expr], space: &PhaseSpace) -> Vec<String> {
    es.iter().map(|e| space.render(e)).collect()
}

fn ledger_section(engine: &str, l: &ConstraintLedger) -> LedgerSection {
    let sp = &l.space;
    LedgerSection {
        engine: engine.to_string(),
        status: l.status.as_str().to_string(),
        stages_run: l.stages_run,
        frozen: l.frozen,
        constraints: l
            .constraints
            .iter()
            .map(|c| ConstraintEntry {
                expr: sp.render(&c.expr),
                stage: c.stage,
                origin: c.origin.as_str().to_string(),
                classification: c.classification.as_str().to_string(),
            })
            .collect(),
        multiplier_fixings: l
            .multiplier_fixings
            .iter()
            .map(|(m, e)| (sp.name(*m).to_string(), sp.render(e)))
            .collect(),
        inconsistency: l.inconsistency.as_ref().map(|inc| InconsistencySection {
            stage: inc.stage,
            source: inc.source.map(|i| sp.render(&l.constraints[i].expr)),
            residual: sp.render(&inc.residual),
        }),
    }
}

fn legendre_section(r: &LegendreResult, energy: &Expr, space: &PhaseSpace) -> LegendreSection {
    LegendreSection {
        momenta: render_all(&r.momenta, space),
        hessian: render_matrix(&r.hessian, space),
        rank: r.rank,
        primaries: render_all(&r.primaries, space),
        h0: space.render(&r.h0),
        energy: space.render(energy),
        velocity_solution: r
            .velocity_solution
            .iter()
            .map(|(v, e)| (space.name(*v).to_string(), space.render(e)))
            .collect(),
    }
}

fn status_exit(status: LedgerStatus) -> i32 {
    match status {
        LedgerStatus::Stabilized => 0,
        LedgerStatus::Inconsistent => 2,
        LedgerStatus::ExceededIterations => 3,
    }
}

fn diagnostic(engine: &str, l: &ConstraintLedger) -> Option<String> {
    let sp = &l.space;
    match l.status {
        LedgerStatus::Stabilized => None,
        LedgerStatus::Inconsistent => {
            let inc = l.inconsistency.as_ref()?;
            let what = inc
                .source
                .map(|i| format!("preserving `{}`", sp.render(&l.constraints[i].expr)))
                .unwrap_or_else(|| "the consistency condition".to_string());
            Some(format!(
                "{engine} engine: inconsistent system at stage {}: {what} requires {} = 0",
                inc.stage,
                sp.render(&inc.residual)
            ))
        }
        LedgerStatus::ExceededIterations => Some(format!(
            "{engine} engine: no stabilization within {} stage(s)",
            l.stages_run
        )),
    }
}

/// Parses `NAME=VALUE` command-line pairs.
pub fn split_binding(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, found `{s}`"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(format!("expected NAME=VALUE, found `{s}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

pub fn run(command: Command, file: &SystemFile, opts: &RunOptions) -> Result<Outcome, CliError> {
    let sys = file.system()?;
    let space = sys.space().clone();
    let legendre = legendre_analyze(&sys)?;
    let forms = cartan_forms(&sys);

    let contact = match &forms.eta {
        Some(eta) => {
            let k = contact_class(eta)?;
            Some(ContactSection {
                eta: eta.render(space.vars()),
                class: 2 * k + 1,
                reeb: format!("d/d{}", space.name(space.z().expect("contact space"))),
                reeb_unique: 2 * k + 1 == space.dim(),
            })
        }
        None => None,
    };

    let engine = opts.engine.or(file.options.engine).unwrap_or(match space.kind() {
        SpaceKind::Symplectic => Engine::Both,
        SpaceKind::Contact => Engine::Geometric,
    });
    let stab = StabilizeOptions {
        max_stages: opts.max_stages,
        contact_ambient: match opts.ambient.or(file.options.ambient) {
            Some(Ambient::Primary) => ContactAmbient::Primary,
            _ => ContactAmbient::Stage,
        },
    };
    let geometric = |h0: &Expr, prim: &[Expr]| match space.kind() {
        SpaceKind::Symplectic => stabilize_geometric_symplectic(h0, prim, &space, &stab),
        SpaceKind::Contact => stabilize_geometric_contact(h0, prim, &space, &stab),
    };
    let mut ledgers: Vec<(&str, ConstraintLedger)> = Vec::new();
    if matches!(engine, Engine::Geometric | Engine::Both) {
        ledgers.push(("geometric", geometric(&legendre.h0, &legendre.primaries)?));
    }
    if matches!(engine, Engine::Algebraic | Engine::Both) {
        ledgers.push((
            "algebraic",
            stabilize_dirac_bergmann(&legendre.h0, &legendre.primaries, &space, &stab)?,
        ));
    }
    let engines_agree = if ledgers.len() == 2 {
        Some(ledgers_agree(&ledgers[0].1, &ledgers[1].1, &space)?)
    } else {
        None
    };

    let exit_code = ledgers.iter().map(|(_, l)| status_exit(l.status)).max().unwrap_or(0);
    let diag = ledgers
        .iter()
        .filter_map(|(e, l)| diagnostic(e, l))
        .collect::<Vec<_>>();

    let mut report = SystemReport {
        command: command.as_str().to_string(),
        system: SystemSection {
            kind: match space.kind() {
                SpaceKind::Symplectic => "symplectic".into(),
                SpaceKind::Contact => "contact".into(),
            },
            n: space.n(),
            lagrangian: space.render(sys.lagrangian()),
            phase_coordinates: space.phase_coords().iter().map(|&v| space.name(v).to_string()).collect(),
        },
        legendre: legendre_section(&legendre, &sys.energy(), &space),
        contact,
        ledgers: Vec::new(),
        engines_agree,
        classification: None,
        total_hamiltonian: None,
        equations_of_motion: None,
        tangency: None,
        integration: None,
    };

    let primary = &ledgers[0].1;
    let mut csv = None;
    if exit_code == 0 {
        let classification = classify(primary, &space)?;
        let coisotropic = match space.kind() {
            SpaceKind::Symplectic => Some(coisotropy_check(&classification.first, &classification.second, &space)?.coisotropic),
            SpaceKind::Contact => None,
        };
        report.classification = Some(classification_section(&classification, coisotropic, &space));
        for (_, l) in ledgers.iter_mut() {
            if let Ok(c) = classify(l, &space) {
                *l = l.with_classification(&c);
            }
        }
        if command != Command::Analyze {
            let ht = total_hamiltonian(&legendre.h0, &classification, &space, true)?;
            let eom = equations_of_motion(&ht, &classification)?;
            let sp = &ht.space;
            report.total_hamiltonian = Some(TotalHamiltonianSection {
                base: sp.render(&ht.base),
                terms: ht
                    .terms
                    .iter()
                    .map(|(m, c)| MultiplierTerm {
                        multiplier: sp.name(*m).to_string(),
                        constraint: sp.render(c),
                    })
                    .collect(),
                expr: sp.render(&ht.expr()),
            });
            report.equations_of_motion = Some(
                eom.rows()
                    .iter()
                    .map(|(x, rhs)| EomRow {
                        variable: sp.name(*x).to_string(),
                        rhs: sp.render(rhs),
                    })
                    .collect(),
            );
            let residuals = eom.tangency_residuals()?;
            report.tangency = Some(
                eom.constraints()
                    .iter()
                    .zip(&residuals)
                    .map(|(c, r)| TangencyEntry {
                        constraint: sp.render(c),
                        derivative: sp.render(r),
                        tangent: r.is_zero(),
                    })
                    .collect(),
            );
            if command == Command::Integrate {
                let (section, text) = run_integration(&eom, file, opts)?;
                report.integration = Some(section);
                csv = Some(text);
            }
        }
    }
    report.ledgers = ledgers.iter().map(|(e, l)| ledger_section(e, l)).collect();

    Ok(Outcome {
        report,
        exit_code,
        diagnostic: if diag.is_empty() { None } else { Some(diag.join("\n")) },
        csv,
    })
}

fn classification_section(c: &ClassificationResult, coisotropic: Option<bool>, space: &PhaseSpace) -> ClassificationSection {
    let vecs = |vs: &[Vec<Expr>]| vs.iter().map(|v| render_all(v, space)).collect();
    ClassificationSection {
        bracket: match c.bracket {
            constraint_forge_core::mechanics::BracketKind::Poisson => "poisson".into(),
            constraint_forge_core::mechanics::BracketKind::Jacobi => "jacobi".into(),
        },
        matrix: render_matrix(&c.matrix, space),
        rank: c.rank(),
        kernel_vectors: vecs(&c.kernel_vectors),
        complement_vectors: vecs(&c.complement_vectors),
        first: render_all(&c.first, space),
        second: render_all(&c.second, space),
        c_matrix: render_matrix(&c.c_matrix, space),
        c_inverse: render_matrix(&c.c_inverse, space),
        coisotropic,
    }
}

fn lookup(space: &PhaseSpace, name: &str) -> Result<Var, CliError> {
    space
        .vars()
        .lookup(name)
        .ok_or_else(|| CliError::Usage(format!("unknown variable `{name}`")))
}

fn run_integration(
    eom: &EquationsOfMotion,
    file: &SystemFile,
    opts: &RunOptions,
) -> Result<(IntegrationSection, String), CliError> {
    let space = eom.space();
    let mut multipliers: BTreeMap<Var, Expr> = BTreeMap::new();
    for (name, text) in file.options.multipliers.iter().chain(&opts.multipliers) {
        let m = lookup(space, name)?;
        if !space.is_multiplier(m) {
            return Err(CliError::Usage(format!("`{name}` is not a multiplier")));
        }
        multipliers.insert(m, space.parse(text)?);
    }
    let mut init: BTreeMap<Var, f64> = BTreeMap::new();
    for (name, x) in file.options.init.iter().chain(&opts.init) {
        let v = lookup(space, name)?;
        if !space.phase_coords().contains(&v) {
            return Err(CliError::Usage(format!("`{name}` is not a phase-space coordinate")));
        }
        init.insert(v, *x);
    }
    let t_end = opts.t_end.or(file.options.t_end).unwrap_or(1.0);
    let dt = opts.dt.or(file.options.dt).unwrap_or(1e-3);
    let traj = integrate(eom, &init, &multipliers, t_end, dt)?;
    let drift = drift_report(&traj, eom.constraints(), space)?;
    let csv = traj.to_csv();
    if let Some(path) = &opts.out {
        std::fs::write(path, &csv).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    }
    let last = traj.last();
    Ok((
        IntegrationSection {
            t_end,
            dt,
            samples: traj.states.len(),
            multipliers: traj.multipliers.iter().cloned().collect(),
            final_state: last.iter().map(|(v, x)| (space.name(*v).to_string(), *x)).collect(),
            drift: drift
                .per_constraint
                .into_iter()
                .map(|(constraint, max_abs)| DriftEntry { constraint, max_abs })
                .collect(),
            max_drift: drift.max,
            csv: opts.out.clone(),
        },
        csv,
    ))
}
