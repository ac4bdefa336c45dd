mod common;

use common::*;
use germcalc_core::implicit::{
    check_solution, closure_compose, closure_derivative, closure_implicit, closure_schwarz,
    eval_residual, ExpPolynomial, ImplicitSolution, ImplicitSystem,
};
use germcalc_core::json::{solution_from_json, solution_to_json, system_from_json, system_to_json};
use germcalc_core::{GaussianRational, Jet, Point};
use num_traits::Zero;
use proptest::prelude::*;

const ORDER: usize = 7;

/// Terms `c x^a e^{b x}` of a polynomial in the coordinate and its exponential.
fn terms() -> impl Strategy<Value = Vec<(u32, u32, GaussianRational)>> {
    proptest::collection::vec((0u32..=2, 0u32..=2, gauss()), 1..=4)
}

/// `t = P(x, e^x) - P(0, 1)` with its solution at the origin.
fn explicit(terms: &[(u32, u32, GaussianRational)]) -> (ImplicitSystem, ImplicitSolution) {
    let vars = 2;
    let z = Jet::coordinate(ORDER, Point::origin(1), 0);
    let e = Jet::exp_at_origin(ORDER);
    let mut p = ExpPolynomial::zero(vars);
    let mut psi = Jet::zero(1, ORDER, Point::origin(1));
    for (a, b, c) in terms {
        let mut mono = ExpPolynomial::constant(vars, c.clone());
        let mut jet = Jet::constant(1, ORDER, Point::origin(1), c.clone());
        for _ in 0..*a {
            mono = mono.mul(&ExpPolynomial::x(vars, 0));
            jet = jet.mul(&z).unwrap();
        }
        for _ in 0..*b {
            mono = mono.mul(&ExpPolynomial::y(vars, 0));
            jet = jet.mul(&e).unwrap();
        }
        p = p.add(&mono);
        psi = psi.add(&jet).unwrap();
    }
    let v = psi.value();
    let psi = psi
        .sub(&Jet::constant(1, ORDER, Point::origin(1), v.clone()))
        .unwrap();
    let p = p.sub(&ExpPolynomial::constant(vars, v));
    let system = ImplicitSystem::new(1, vec![ExpPolynomial::x(vars, 1).sub(&p)]).unwrap();
    (system, ImplicitSolution::new(vec![psi]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn explicit_systems_are_solved(ts in terms()) {
        let (f, psi) = explicit(&ts);
        prop_assert!(check_solution(&f, &psi, ORDER).unwrap().passes());
    }

    #[test]
    fn schwarz_closure_solves(ts in terms()) {
        let (f, psi) = explicit(&ts);
        let (f2, psi2) = closure_schwarz(&f, &psi).unwrap();
        prop_assert!(check_solution(&f2, &psi2, ORDER).unwrap().passes());
        prop_assert_eq!(psi2.function(), &germcalc_core::operators::schwarz(psi.function()));
    }

    #[test]
    fn derivative_closure_solves(ts in terms()) {
        let (f, psi) = explicit(&ts);
        let (f2, psi2) = closure_derivative(&f, &psi, 0).unwrap();
        prop_assert!(check_solution(&f2, &psi2, ORDER - 1).unwrap().passes());
        prop_assert_eq!(psi2.function(), &psi.function().partial_derivative(0).unwrap());
        prop_assert_eq!(f2.size(), 2 * f.size());
    }

    #[test]
    fn compose_closure_solves(ts in terms(), us in terms()) {
        let (g_sys, g_sol) = explicit(&ts);
        let (f_sys, f_sol) = explicit(&us);
        let (h_sys, h_sol) = closure_compose(&g_sys, &g_sol, &f_sys, &f_sol).unwrap();
        prop_assert!(check_solution(&h_sys, &h_sol, ORDER).unwrap().passes());
        let direct = germcalc_core::operators::compose(f_sol.function(), &[g_sol.function().clone()]).unwrap();
        prop_assert_eq!(h_sol.function(), &direct);
        prop_assert_eq!(h_sys.size(), g_sys.size() + f_sys.size());
    }

    #[test]
    fn implicit_closure_solves(ts in terms(), slope in gauss()) {
        prop_assume!(!slope.is_zero());
        // t = slope·w + P(x, e^x) - P(0, 1) in coordinates (x, w)
        let (f1, psi1) = explicit(&ts);
        let vars = 3;
        let p = f1.components()[0].remap(vars, &[0, 2]).sub(&ExpPolynomial::x(vars, 2));
        let t = ExpPolynomial::x(vars, 2);
        let w = ExpPolynomial::x(vars, 1).scale(&slope);
        let comp = t.sub(&w).add(&p);
        let f = ImplicitSystem::new(2, vec![comp]).unwrap();
        let base = Point::origin(2);
        let w_jet = Jet::coordinate(ORDER, base.clone(), 1).scale(&slope);
        let lifted = germcalc_core::operators::compose(psi1.function(), &[Jet::coordinate(ORDER, base.clone(), 0)]).unwrap();
        let psi = ImplicitSolution::new(vec![w_jet.add(&lifted).unwrap()]).unwrap();
        prop_assert!(check_solution(&f, &psi, ORDER).unwrap().passes());
        let (f2, psi2) = closure_implicit(&f, &psi).unwrap();
        prop_assert!(check_solution(&f2, &psi2, ORDER).unwrap().passes());
        prop_assert_eq!(f2.coords(), 1);
        // f(z, φ(z)) = 0 means slope·φ = -P(z, e^z) + P(0, 1)
        let expect = psi1.function().scale(&(-GaussianRational::from(1) / slope));
        prop_assert_eq!(psi2.function(), &expect);
    }

    #[test]
    fn residuals_detect_perturbations(ts in terms(), c in gauss(), deg in 1usize..=ORDER) {
        prop_assume!(!c.is_zero());
        let (f, psi) = explicit(&ts);
        let mut coeffs = vec![GaussianRational::zero(); ORDER + 1];
        coeffs[deg] = c;
        let bumped = psi.function().add(&Jet::univariate(0.into(), coeffs)).unwrap();
        let bad = ImplicitSolution::new(vec![bumped]).unwrap();
        let r = eval_residual(&f, &bad, ORDER).unwrap();
        prop_assert_eq!(r[0].coeffs().keys().next().map(|a| a.degree()), Some(deg));
    }

    #[test]
    fn documents_round_trip(ts in terms()) {
        let (f, psi) = explicit(&ts);
        prop_assert_eq!(system_from_json(&system_to_json(&f)).unwrap(), f);
        prop_assert_eq!(solution_from_json(&solution_to_json(&psi)).unwrap(), psi);
    }
}
