mod common;

use common::{build, build_bounded, terms, Terms};
use constraint_forge_core::constraint::surface_chart;
use constraint_forge_core::exterior::{exterior_derivative, interior_product, DifferentialForm};
use constraint_forge_core::mechanics::{
    canonical_contact_form, contact_hamiltonian_vector_field, dirac_jacobi_bracket, jacobi_bracket,
    poisson_bracket, reeb, BracketKind, DiracStructure, PhaseSpace, SpaceKind,
};
use constraint_forge_core::symexpr::{Expr, Var};
use proptest::prelude::*;

fn space(kind: SpaceKind) -> (PhaseSpace, Vec<Var>) {
    let s = PhaseSpace::new(kind, 2);
    let c = s.phase_coords();
    (s, c)
}

fn small(t: &Terms, vs: &[Var]) -> Expr {
    build_bounded(t, vs, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn poisson_bracket_axioms(f in terms(4, 4, 2), g in terms(4, 4, 2), h in terms(4, 4, 2)) {
        let (s, vs) = space(SpaceKind::Symplectic);
        let (f, g, h) = (small(&f, &vs), small(&g, &vs), small(&h, &vs));
        let pb = |a: &Expr, b: &Expr| poisson_bracket(a, b, &s);
        prop_assert_eq!(pb(&f, &g), -pb(&g, &f));
        let jacobi = &(&pb(&f, &pb(&g, &h)) + &pb(&g, &pb(&h, &f))) + &pb(&h, &pb(&f, &g));
        prop_assert!(jacobi.is_zero());
        prop_assert_eq!(pb(&f, &(&g * &h)), &(&pb(&f, &g) * &h) + &(&g * &pb(&f, &h)));
    }

    #[test]
    fn jacobi_bracket_axioms(f in terms(5, 4, 2), g in terms(5, 4, 2), h in terms(5, 4, 2)) {
        let (s, vs) = space(SpaceKind::Contact);
        let (f, g, h) = (small(&f, &vs), small(&g, &vs), small(&h, &vs));
        let jb = |a: &Expr, b: &Expr| jacobi_bracket(a, b, &s);
        prop_assert_eq!(jb(&f, &g), -jb(&g, &f));
        let jacobi = &(&jb(&f, &jb(&g, &h)) + &jb(&g, &jb(&h, &f))) + &jb(&h, &jb(&f, &g));
        prop_assert!(jacobi.is_zero());
        // Generalized Leibniz rule: {f,gh}_J = g{f,h}_J + h{f,g}_J + gh R(f).
        let rhs = &(&(&g * &jb(&f, &h)) + &(&h * &jb(&f, &g))) + &(&(&g * &h) * &reeb(&f, &s));
        prop_assert_eq!(jb(&f, &(&g * &h)), rhs);
    }

    #[test]
    fn dirac_bracket_annihilates_second_class(
        r1 in terms(4, 2, 2),
        r2 in terms(4, 3, 2),
        f in terms(4, 4, 2),
        contact in any::<bool>(),
    ) {
        let kind = if contact { SpaceKind::Contact } else { SpaceKind::Symplectic };
        let (s, vs) = space(kind);
        let bk = if contact { BracketKind::Jacobi } else { BracketKind::Poisson };
        // χ = {q1 + r1(q2), p1 + r2(q2, p2)} always pairs q1 with p1.
        let others = [s.q(1), s.p(1)];
        let chi = vec![
            &Expr::var(s.q(0)) + &build(&r1, &others[..1]),
            &Expr::var(s.p(0)) + &small(&r2, &others),
        ];
        let f = small(&f, &vs);
        let Ok(d) = DiracStructure::new(bk, &chi, &s, None) else { return Ok(()) };
        for c in &chi {
            prop_assert!(d.bracket(c, &f).is_zero());
            prop_assert!(d.bracket(&f, c).is_zero());
        }
        let chart = surface_chart(&chi, &s).unwrap();
        let Ok(weak) = DiracStructure::new(bk, &chi, &s, Some(&chart)) else { return Ok(()) };
        for c in &chi {
            prop_assert!(chart.reduce(&weak.bracket(c, &f)).unwrap().is_zero());
        }
    }

    #[test]
    fn dirac_jacobi_without_constraints_is_jacobi(f in terms(5, 4, 3), g in terms(5, 4, 3)) {
        let (s, vs) = space(SpaceKind::Contact);
        let (f, g) = (build(&f, &vs), build(&g, &vs));
        prop_assert_eq!(dirac_jacobi_bracket(&f, &g, &[], &s).unwrap(), jacobi_bracket(&f, &g, &s));
        let d = DiracStructure::new(BracketKind::Jacobi, &[], &s, None).unwrap();
        prop_assert_eq!(d.reeb(&f), reeb(&f, &s));
    }

    #[test]
    fn contact_hamilton_equations(v in terms(1, 4, 4), gamma in -3i64..=3) {
        let s = PhaseSpace::new(SpaceKind::Contact, 1);
        let (q, p, z) = (s.q(0), s.p(0), s.z().unwrap());
        let potential = build(&v, &[q]);
        let h = &(&(&Expr::frac(1, 2) * &Expr::var(p).pow(2)) + &potential) + &(&Expr::int(gamma) * &Expr::var(z));
        let x = contact_hamiltonian_vector_field(&h, &s).unwrap();

        let eta = canonical_contact_form(&s).unwrap();
        let flat = interior_product(&x, &exterior_derivative(&eta))
            .unwrap()
            .add(&eta.scale(&interior_product(&x, &eta).unwrap().as_scalar().unwrap()))
            .unwrap();
        let dh = exterior_derivative(&DifferentialForm::scalar(h.clone()));
        let alpha = dh.sub(&eta.scale(&(&h.diff(z) + &h))).unwrap();
        prop_assert_eq!(flat, alpha);

        let pdot = -(&potential.diff(q) + &(&Expr::int(gamma) * &Expr::var(p)));
        prop_assert_eq!(x.component(p), pdot);
        prop_assert_eq!(x.component(q), Expr::var(p));
    }
}
