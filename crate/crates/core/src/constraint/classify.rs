use crate::exterior::{Distribution, SymMatrix};
use crate::mechanics::{BracketKind, DiracStructure, MechanicsError, PhaseSpace, SpaceKind};
use crate::symexpr::Expr;

use super::{normalize_constraint, surface_chart, Classification, ConstraintError, ConstraintLedger};

/// First/second-class split of a stabilized constraint set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationResult {
    pub bracket: BracketKind,
    pub constraints: Vec<Expr>,
    /// Weakly reduced bracket matrix `{φ^α, φ^β}` (Poisson or Jacobi).
    pub matrix: SymMatrix,
    /// Left null vectors `v` of the bracket matrix; `Ω = v_α φ^α`.
    pub kernel_vectors: Vec<Vec<Expr>>,
    /// Standard basis vectors completing the kernel; `χ = w_α φ^α`.
    pub complement_vectors: Vec<Vec<Expr>>,
    pub first: Vec<Expr>,
    pub second: Vec<Expr>,
    pub c_matrix: SymMatrix,
    pub c_inverse: SymMatrix,
    /// Per-constraint label: second when the constraint was picked as a
    /// complement vector, first otherwise.
    pub labels: Vec<Classification>,
}

impl ClassificationResult {
    pub fn rank(&self) -> usize {
        self.second.len()
    }
}

fn bracket_kind(space: &PhaseSpace) -> BracketKind {
    match space.kind() {
        SpaceKind::Symplectic => BracketKind::Poisson,
        SpaceKind::Contact => BracketKind::Jacobi,
    }
}

fn combine(v: &[Expr], phi: &[Expr]) -> Expr {
    normalize_constraint(&v.iter().zip(phi).map(|(a, b)| a * b).sum::<Expr>())
}

/// Classifies the constraints of a stabilized ledger.
///
/// The kernel vectors of the weakly reduced bracket matrix give the
/// first-class combinations. Standard basis vectors, in constraint order,
/// complete them to a basis and pick the second-class constraints, whose
/// bracket matrix `C` is then inverted exactly.
pub fn classify(ledger: &ConstraintLedger, space: &PhaseSpace) -> Result<ClassificationResult, ConstraintError> {
    if !ledger.is_stabilized() {
        return Err(ConstraintError::NotStabilized);
    }
    let kind = bracket_kind(space);
    let phi = ledger.exprs();
    let chart = surface_chart(&phi, space)?;
    let m = phi.len();
    let matrix = SymMatrix::from_fn(m, m, |a, b| kind.eval(&phi[a], &phi[b], space)).reduce(&chart)?;
    let kernel_vectors = matrix.left_nullspace();
    let first: Vec<Expr> = kernel_vectors.iter().map(|v| combine(v, &phi)).collect();

    let mut basis = kernel_vectors.clone();
    let mut complement_vectors = Vec::new();
    let mut labels = vec![Classification::First; m];
    for (j, label) in labels.iter_mut().enumerate() {
        let mut e = vec![Expr::zero(); m];
        e[j] = Expr::one();
        let mut trial = basis.clone();
        trial.push(e.clone());
        if SymMatrix::from_rows(m, trial.clone())?.rank() == trial.len() {
            basis = trial;
            complement_vectors.push(e);
            *label = Classification::Second;
        }
    }
    let second: Vec<Expr> = complement_vectors.iter().map(|w| combine(w, &phi)).collect();
    if second.len() != matrix.rank() {
        return Err(ConstraintError::Classification(format!(
            "{} second-class constraints for a bracket matrix of rank {}",
            second.len(),
            matrix.rank()
        )));
    }
    let dirac = DiracStructure::new(kind, &second, space, Some(&chart)).map_err(|e| match e {
        MechanicsError::SingularConstraintMatrix => {
            ConstraintError::Classification("bracket matrix of the second-class constraints is singular".into())
        }
        other => other.into(),
    })?;
    for (a, omega) in first.iter().enumerate() {
        for p in &phi {
            if !chart.reduce(&kind.eval(omega, p, space))?.is_zero() {
                return Err(ConstraintError::Classification(format!(
                    "first-class combination #{a} `{}` does not commute with `{}`",
                    space.render(omega),
                    space.render(p)
                )));
            }
        }
    }
    Ok(ClassificationResult {
        bracket: kind,
        constraints: phi,
        matrix,
        kernel_vectors,
        complement_vectors,
        first,
        second,
        c_matrix: dirac.c_matrix().clone(),
        c_inverse: dirac.c_inverse().clone(),
        labels,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoisotropyReport {
    pub coisotropic: bool,
    /// Indices into `first` of a pair that fails the check.
    pub witness: Option<(usize, usize)>,
}

/// Checks that the first-class set is involutive on the surface where the
/// second-class constraints hold strongly: every Dirac bracket `{Ωa, Ωb}_D`
/// vanishes weakly and every commutator `[X_a, X_b]` of their Hamiltonian
/// fields lies in the span of the `X_a`.
pub fn coisotropy_check(first: &[Expr], chi: &[Expr], space: &PhaseSpace) -> Result<CoisotropyReport, ConstraintError> {
    if space.kind() != SpaceKind::Symplectic {
        return Err(MechanicsError::WrongKind {
            expected: SpaceKind::Symplectic,
        }
        .into());
    }
    let mut all = first.to_vec();
    all.extend(chi.iter().cloned());
    let chart = surface_chart(&all, space)?;
    let dirac = DiracStructure::new(BracketKind::Poisson, chi, space, Some(&chart))?;
    let fields = first
        .iter()
        .map(|f| dirac.hamiltonian_field(f).reduce(&chart))
        .collect::<Result<Vec<_>, _>>()?;
    let span = Distribution::span(&space.phase_coords(), &fields, &chart)?;
    for a in 0..first.len() {
        for b in a + 1..first.len() {
            let bracket = chart.reduce(&dirac.bracket(&first[a], &first[b]))?;
            let commutator = fields[a].lie_bracket(&fields[b]);
            if !bracket.is_zero() || !span.contains(&commutator)? {
                return Ok(CoisotropyReport {
                    coisotropic: false,
                    witness: Some((a, b)),
                });
            }
        }
    }
    Ok(CoisotropyReport {
        coisotropic: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{stabilize_geometric_contact, stabilize_geometric_symplectic, StabilizeOptions};
    use crate::mechanics::{legendre_analyze, LagrangianSystem};

    fn ledger(kind: SpaceKind, n: usize, l: &str) -> (PhaseSpace, ConstraintLedger) {
        let s = PhaseSpace::new(kind, n);
        let sys = LagrangianSystem::new(s.clone(), s.parse(l).unwrap()).unwrap();
        let r = legendre_analyze(&sys).unwrap();
        let opts = StabilizeOptions::default();
        let l = match kind {
            SpaceKind::Symplectic => stabilize_geometric_symplectic(&r.h0, &r.primaries, &s, &opts),
            SpaceKind::Contact => stabilize_geometric_contact(&r.h0, &r.primaries, &s, &opts),
        };
        (s, l.unwrap())
    }

    #[test]
    fn example_one() {
        let (s, l) = ledger(SpaceKind::Symplectic, 4, "(1/2)*((q1 + v2 + v3)^2 + (v4 - v2)^2 - 2*q2*q4)");
        let c = classify(&l, &s).unwrap();
        let e = |t: &str| s.parse(t).unwrap();
        assert_eq!(c.matrix.rank(), 2);
        assert_eq!(c.matrix.get(1, 3), &Expr::int(-2));
        assert_eq!(c.first, vec![e("p1"), e("p3")]);
        assert_eq!(c.second, vec![e("p2 - p3 + p4"), e("q2 + q4")]);
        let half = Expr::frac(1, 2);
        assert_eq!(
            c.c_inverse.to_rows(),
            vec![vec![Expr::zero(), half.clone()], vec![-&half, Expr::zero()]]
        );
        use Classification::*;
        assert_eq!(c.labels, vec![First, Second, First, Second]);
        let report = coisotropy_check(&c.first, &c.second, &s).unwrap();
        assert!(report.coisotropic);
        let labelled = l.with_classification(&c);
        assert_eq!(labelled.constraints[3].classification, Second);
    }

    #[test]
    fn example_two_all_first_class() {
        let (s, l) = ledger(SpaceKind::Contact, 2, "(1/2)*(v1 + v2)^2 + q1 + q2*z");
        let c = classify(&l, &s).unwrap();
        assert!(c.matrix.is_zero());
        assert_eq!(c.first, vec![s.parse("p1 - p2").unwrap(), s.parse("1 - z").unwrap()]);
        assert!(c.second.is_empty());
        assert_eq!(c.bracket, BracketKind::Jacobi);
    }

    #[test]
    fn single_constraint_is_first_class() {
        let s = PhaseSpace::new(SpaceKind::Symplectic, 1);
        let mut l = ConstraintLedger::new(s.clone());
        let (_, g) = ledger(SpaceKind::Symplectic, 1, "q1*v1");
        l.constraints = g.constraints.clone();
        let c = classify(&l, &s).unwrap();
        assert_eq!(c.first.len() + c.second.len(), l.constraints.len());
    }

    #[test]
    fn coisotropy_witnesses() {
        let s = PhaseSpace::new(SpaceKind::Symplectic, 2);
        let e = |t: &str| s.parse(t).unwrap();
        assert!(coisotropy_check(&[e("p1"), e("p2")], &[], &s).unwrap().coisotropic);
        let bad = coisotropy_check(&[e("q1"), e("p1")], &[], &s).unwrap();
        assert!(!bad.coisotropic);
        assert_eq!(bad.witness, Some((0, 1)));
    }

    #[test]
    fn unstabilized_ledger_is_rejected() {
        let (s, mut l) = ledger(SpaceKind::Symplectic, 1, "q1*v1");
        l.status = crate::constraint::LedgerStatus::Inconsistent;
        assert_eq!(classify(&l, &s), Err(ConstraintError::NotStabilized));
    }
}
