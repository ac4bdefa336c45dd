//! Scripted verification scenarios. Every check is exact; a report passes iff all of its
//! checks do.

use std::fmt;

use germcalc_core::blowup::{
    blow_down_reconstruct, blow_up_jet, chart_transition_check, divisor_constancy_check,
    divisor_constancy_in_chart, nonlocality_witness, reconstruct_from_chart, Chart,
};
use germcalc_core::calculus::{
    apply_expr, certified_lower_bound, classify, parse_expr, shift_bound, vanishing_stability_test,
    Env, NodeKind, OperatorClass, OperatorExpr, PolyLeaf, StabilityConfig,
};
use germcalc_core::gaussian::factorial;
use germcalc_core::implicit::{
    check_solution, closure_compose, closure_derivative, closure_implicit, exp_of, ExpPolynomial,
    ImplicitSolution, ImplicitSystem,
};
use germcalc_core::operators::{compose, implicit_fn, ramify};
use germcalc_core::{GaussianRational, Jet, MultiIndex, Point, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::HarnessError;
use crate::oracle::naive_compose;
use crate::random::{random_gaussian, random_jet_at, SeededTails, HEURISTIC_NOTICE};

type Result<T> = std::result::Result<T, HarnessError>;

pub const DEFAULT_ORDER: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub order: usize,
    pub seed: u64,
    /// Polynomial degree for `blowdown-roundtrip`.
    pub degree: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            order: DEFAULT_ORDER,
            seed: 0,
            degree: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    /// The identity or bound being checked.
    pub anchor: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub scenario: String,
    pub options: Options,
    /// Sorted by name.
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEURISTIC_NOTICE}")?;
        writeln!(
            f,
            "scenario: {} (order {}, seed {}, degree {})",
            self.scenario, self.options.order, self.options.seed, self.options.degree
        )?;
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark} {} [{}] {}", c.name, c.anchor, c.detail)?;
        }
        if self.passed() {
            write!(f, "result: PASS ({} checks)", self.checks.len())
        } else {
            write!(
                f,
                "result: FAIL ({} of {} checks failed)",
                self.failures(),
                self.checks.len()
            )
        }
    }
}

type Runner = fn(&Options) -> Result<Vec<Check>>;

const SCENARIOS: &[(&str, Runner)] = &[
    ("blowdown-roundtrip", blowdown_roundtrip),
    ("closure-sizes", closure_sizes),
    ("compose-oracle", compose_oracle),
    ("deram-identity", deram_identity),
    ("deram-identity-falsify", deram_identity_falsify),
    ("implicit-backsub", implicit_backsub),
    ("nonlocality", nonlocality),
    ("shift-deram-growth", shift_deram_growth),
    ("shift-elementary", shift_elementary),
    ("theorem-a-coeffs", theorem_a_coeffs),
    ("vanishing-stability", vanishing_stability),
];

pub fn scenario_names() -> impl Iterator<Item = &'static str> {
    SCENARIOS.iter().map(|(n, _)| *n)
}

pub fn run_scenario(name: &str, options: &Options) -> Result<Report> {
    let (_, run) = SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| HarnessError::UnknownScenario(name.to_string()))?;
    let mut checks = run(options)?;
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report {
        scenario: name.to_string(),
        options: options.clone(),
        checks,
    })
}

fn rat(num: i64, den: BigInt) -> GaussianRational {
    GaussianRational::real(BigRational::new(BigInt::from(num), den))
}

fn origin1() -> Point {
    Point::origin(1)
}

fn expr(text: &str) -> OperatorExpr {
    parse_expr(text).expect("built-in expressions parse")
}

/// `1/(1+z²)` to order `k`.
pub fn inverse_one_plus_square(k: usize) -> Jet {
    let coeffs = (0..=k)
        .map(|j| match j % 4 {
            0 => GaussianRational::one(),
            2 => -GaussianRational::one(),
            _ => GaussianRational::zero(),
        })
        .collect();
    Jet::univariate(0.into(), coeffs)
}

/// `1/(1+z)` to order `k`.
pub fn inverse_one_plus(k: usize) -> Jet {
    let coeffs = (0..=k)
        .map(|j| {
            if j % 2 == 0 {
                GaussianRational::one()
            } else {
                -GaussianRational::one()
            }
        })
        .collect();
    Jet::univariate(0.into(), coeffs)
}

pub const DIVIDED_EXP: &str = "(mdiv (poly-apply (- y 1) (germ exp 0)))";
/// `deramify(compose(f, z²), 2)`, which is `f` itself.
pub const LITERAL_SIDE: &str = "(deram 2 (compose (germ f 0) (poly (^ z 2) 0)))";
/// `f(√z)` for an even `f`.
pub const SQRT_SIDE: &str = "(deram 2 (germ f 0))";
pub const DERIVATIVE_SIDE: &str =
    "(poly-apply (+ z1 (* 1/2 z2)) (germ f 0) (partial 1 (germ f 0)))";

/// The coefficients of `(e^z - 1)/z` to order `n_max`, by the library and by `1/(n+1)!`.
pub fn divided_exp_coefficients(n_max: usize) -> Result<Vec<(GaussianRational, GaussianRational)>> {
    let e = expr(DIVIDED_EXP);
    let env = Env::new().with("exp", Jet::exp_at_origin(n_max + 1));
    let out = apply_expr(&e, &env, n_max)?;
    Ok((0..=n_max as u32)
        .map(|n| (out.coeff1(n), rat(1, factorial(n + 1))))
        .collect())
}

fn theorem_a_coeffs(opts: &Options) -> Result<Vec<Check>> {
    let n_max = opts.order.max(20);
    let mut checks = Vec::new();
    for (n, (got, want)) in divided_exp_coefficients(n_max)?.into_iter().enumerate() {
        checks.push(Check::new(
            format!("c_{n:02}"),
            "(e^z-1)/z = sum z^n/(n+1)!",
            got == want,
            format!("c_{n} = {got}, 1/({}!) = {want}", n + 1),
        ));
    }
    let class = classify(&expr(DIVIDED_EXP));
    checks.push(Check::new(
        "classification",
        "C* and definable without parameters",
        class.class == OperatorClass::C && class.gaussian,
        class.to_string(),
    ));
    Ok(checks)
}

/// `deramify(compose(f, z²), 2)` and `f + ½f'` at order `k`, for `f` given to order `2k`.
pub fn deram_identity_sides(f: &Jet, k: usize) -> Result<(Jet, Jet)> {
    let env = Env::new().with("f", f.clone());
    let lhs = apply_expr(&expr(LITERAL_SIDE), &env, k)?;
    let rhs = apply_expr(&expr(DERIVATIVE_SIDE), &env, k)?;
    Ok((lhs, rhs))
}

/// `deramify(f, 2) = f(√z)` at order `k`, for an even `f` given to order `2k`.
pub fn sqrt_side(f: &Jet, k: usize) -> Result<Jet> {
    Ok(apply_expr(
        &expr(SQRT_SIDE),
        &Env::new().with("f", f.clone()),
        k,
    )?)
}

fn describe_difference(lhs: &Jet, rhs: &Jet) -> Result<String> {
    Ok(match lhs.first_difference(rhs)? {
        None => format!("equal to order {}", lhs.order().min(rhs.order())),
        Some(d) => {
            let a = MultiIndex::new(vec![d as u32]);
            format!(
                "first difference at degree {d}: {} vs {}",
                lhs.coeff(&a),
                rhs.coeff(&a)
            )
        }
    })
}

fn deram_identity(opts: &Options) -> Result<Vec<Check>> {
    let k = opts.order;
    let f = inverse_one_plus_square(2 * k);
    let (literal, rhs) = deram_identity_sides(&f, k)?;
    let root = sqrt_side(&f, k)?;
    let f_k = f.truncate(k)?;
    let sqrt_value = inverse_one_plus(k);
    Ok(vec![
        Check::new(
            "literal-side-value",
            "deramify(compose(f, z²), 2) = f",
            literal == f_k,
            describe_difference(&literal, &f_k)?,
        ),
        Check::new(
            "literal-identity",
            "deramify(compose(f, z²), 2) = f + ½f'",
            literal == rhs,
            describe_difference(&literal, &rhs)?,
        ),
        Check::new(
            "sqrt-side-value",
            "f(√z) = 1/(1+z) for f = 1/(1+z²)",
            root == sqrt_value,
            describe_difference(&root, &sqrt_value)?,
        ),
        Check::new(
            "sqrt-identity",
            "f(√z) = f(z) + ½f'(z)",
            root == rhs,
            describe_difference(&root, &rhs)?,
        ),
    ])
}

/// Seeds for which the identity of `deram-identity` is tested on random `f`.
pub fn falsification_seeds(base_seed: u64) -> Vec<u64> {
    (0..50).map(|i| base_seed.wrapping_add(i)).collect()
}

/// Whether `f(√z) = f(z) + ½f'(z)` holds to order `k` for the seeded random `f`.
pub fn identity_holds_for_seed(seed: u64, k: usize) -> Result<bool> {
    let f = crate::random::generate_random_jet(1, 2 * k, seed, 9);
    let (lhs, rhs) = deram_identity_sides(&f, k)?;
    Ok(lhs == rhs)
}

fn deram_identity_falsify(opts: &Options) -> Result<Vec<Check>> {
    let k = opts.order;
    let seeds = falsification_seeds(opts.seed);
    let mut held = Vec::new();
    for &s in &seeds {
        if identity_holds_for_seed(s, k)? {
            held.push(s);
        }
    }
    let failed = seeds.len() - held.len();
    let repeat = identity_holds_for_seed(seeds[0], k)? == held.contains(&seeds[0]);
    Ok(vec![
        Check::new(
            "falsified-seeds",
            "f(√z) = f(z) + ½f'(z) fails on random f",
            failed >= 49,
            format!(
                "fails for {failed} of {} seeds {}..={}, holds for {held:?}",
                seeds.len(),
                seeds[0],
                seeds[seeds.len() - 1]
            ),
        ),
        Check::new(
            "deterministic",
            "same seed, same verdict",
            repeat,
            format!("seed {}", seeds[0]),
        ),
    ])
}

fn deram_product(e: &OperatorExpr) -> u32 {
    e.nodes()
        .filter_map(|(_, n)| match n.kind {
            NodeKind::Deram(m) => Some(m),
            _ => None,
        })
        .product()
}

/// Whether some operator of `e` needs its input to vanish: the inner slots of a composition
/// with a germ, monomial division and the implicit function.
fn needs_vanishing(e: &OperatorExpr) -> bool {
    e.nodes().any(|(_, n)| match n.kind {
        NodeKind::MonomialDiv | NodeKind::Implicit => true,
        NodeKind::Compose => !matches!(
            e.node(n.children[0]).kind,
            NodeKind::GaussianPoly(PolyLeaf { base: None, .. })
        ),
        _ => false,
    })
}

/// Seeded generic inputs for every germ of `e`, long enough to evaluate at order `n`.
///
/// When some operator needs it, each input is `(z_d - a_d)·h` for a random `h`, so it
/// vanishes at its base and is divisible by its last coordinate. Inputs are then ramified by
/// the product of the deramification indices of `e` so that every `deram` sees an
/// invariant germ.
pub fn generic_inputs(e: &OperatorExpr, n: usize, seed: u64) -> Result<Env> {
    let need = germcalc_core::calculus::required_orders(e, n);
    let m = deram_product(e);
    let vanish = needs_vanishing(e);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = Env::new();
    for ((name, base), k) in need {
        let dim = base.dim();
        let mut g = random_jet_at(&mut rng, base.clone(), k, 9);
        if vanish {
            let last = Jet::coordinate(k, base.clone(), dim - 1).sub(&Jet::constant(
                dim,
                k,
                base.clone(),
                base.coords()[dim - 1].clone(),
            ))?;
            g = g.mul(&last)?;
        }
        if m > 1 {
            g = ramify(&g, m)?;
        }
        env.bind(name, g);
    }
    Ok(env)
}

/// Structural upper bound and certified lower bound of the shift of `e` at `n`.
pub fn shift_pair(e: &OperatorExpr, env: &Env, n: usize) -> Result<(usize, usize)> {
    Ok((shift_bound(e).eval(n), certified_lower_bound(e, env, n)?))
}

/// Name, expression text and exact shift function of an elementary operator.
pub type Elementary = (&'static str, &'static str, fn(usize) -> usize);

/// Elementary operators with their shift functions.
pub fn elementary_operators() -> Vec<Elementary> {
    vec![
        ("schwarz", "(schwarz (germ f 0))", |n| n),
        ("compose", "(compose (germ f 0) (germ g 0))", |n| n),
        (
            "polynomial",
            "(poly-apply (* z1 z2) (germ f 0) (germ g 0))",
            |n| n,
        ),
        ("implicit", "(implicit (germ f [0 0]))", |n| n),
        ("partial", "(partial 1 (germ f 0))", |n| n + 1),
        ("mdiv", "(mdiv (germ f 0))", |n| n + 1),
        ("deram-2", "(deram 2 (germ g 0))", |n| 2 * n),
        ("deram-3", "(deram 3 (germ g 0))", |n| 3 * n),
    ]
}

pub const SHIFT_MAX_N: usize = 12;

fn shift_elementary(opts: &Options) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, text, expected) in elementary_operators() {
        let e = expr(text);
        let mut bad = Vec::new();
        for n in 0..=SHIFT_MAX_N {
            let env = generic_inputs(&e, n, opts.seed.wrapping_add(n as u64))?;
            let (upper, lower) = shift_pair(&e, &env, n)?;
            if upper != expected(n) || lower != expected(n) {
                bad.push(format!(
                    "n={n}: upper {upper}, lower {lower}, expected {}",
                    expected(n)
                ));
            }
        }
        let detail = if bad.is_empty() {
            format!("lower = upper = {} for n <= {SHIFT_MAX_N}", shift_bound(&e))
        } else {
            bad.join("; ")
        };
        checks.push(Check::new(
            name,
            format!("d(n) = {}", shift_bound(&e)),
            bad.is_empty(),
            detail,
        ));
    }
    Ok(checks)
}

/// Certified lower bound of the shift of `f ↦ f(√·)` at `ell`, on `g(z) = f(z²)` for a
/// seeded random `f`.
pub fn sqrt_shift_lower_bound(ell: usize, seed: u64) -> Result<usize> {
    let e = expr("(deram 2 (germ g 0))");
    let f = crate::random::generate_random_jet(1, 2 * ell, seed, 9);
    let g = ramify(&f, 2)?;
    Ok(certified_lower_bound(&e, &Env::new().with("g", g), ell)?)
}

fn shift_deram_growth(opts: &Options) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for ell in 4..=12usize {
        let lower = sqrt_shift_lower_bound(ell, opts.seed.wrapping_add(ell as u64))?;
        // every C* expression with N_L <= ell - 1 has d(ell) <= 2 ell - 1
        let c_star_cap = ell + (ell - 1);
        checks.push(Check::new(
            format!("ell-{ell:02}"),
            "d(ell) >= 2 ell > ell + N_L",
            lower >= 2 * ell && lower > c_star_cap,
            format!(
                "certified lower {lower}, 2 ell = {}, C* cap {c_star_cap}",
                2 * ell
            ),
        ));
    }
    Ok(checks)
}

/// A random composition instance: `f` of dimension `k` at the values of `s`-variate inner
/// jets at a random base point.
pub fn compose_case(rng: &mut impl Rng) -> (Jet, Vec<Jet>) {
    let k = rng.gen_range(1..=3);
    let s = rng.gen_range(1..=3);
    let b = Point((0..s).map(|_| random_gaussian(rng, 3)).collect());
    let inner: Vec<Jet> = (0..k)
        .map(|_| {
            let order = rng.gen_range(0..=8);
            random_jet_at(rng, b.clone(), order, 5)
        })
        .collect();
    let a = Point(inner.iter().map(Jet::value).collect());
    let order = rng.gen_range(0..=8);
    let f = random_jet_at(rng, a, order, 5);
    (f, inner)
}

pub const COMPOSE_CASES: usize = 200;

/// Number of cases on which [`compose`] and the oracle agree, out of `cases`.
pub fn compose_agreement(seed: u64, cases: usize) -> Result<(usize, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for i in 0..cases {
        let (f, inner) = compose_case(&mut rng);
        let fast = compose(&f, &inner)?;
        if naive_compose(&f, &inner).as_ref() != Some(&fast) {
            bad.push(i);
        }
    }
    Ok((cases - bad.len(), bad))
}

fn compose_oracle(opts: &Options) -> Result<Vec<Check>> {
    let (agree, bad) = compose_agreement(opts.seed, COMPOSE_CASES)?;
    Ok(vec![Check::new(
        "agreement",
        "Faà di Bruno = brute-force substitution",
        bad.is_empty(),
        format!("{agree} of {COMPOSE_CASES} cases agree, mismatches at {bad:?}"),
    )])
}

/// A random `f` in `dim` variables with `f(a) = 0` and `∂f/∂z_d(a) ≠ 0` at a random base
/// point.
pub fn implicit_case(rng: &mut impl Rng, dim: usize, order: usize) -> Jet {
    let base = Point((0..dim).map(|_| random_gaussian(rng, 3)).collect());
    let f = random_jet_at(rng, base.clone(), order, 5);
    let slope = MultiIndex::unit(dim, dim - 1);
    let mut coeffs: Vec<(MultiIndex, GaussianRational)> = f
        .coeffs()
        .iter()
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, c)| (a.clone(), c.clone()))
        .collect();
    if f.coeff(&slope).is_zero() {
        coeffs.retain(|(a, _)| a != &slope);
        coeffs.push((slope, GaussianRational::one()));
    }
    Jet::new(dim, order, base, coeffs).expect("indices fit the order")
}

pub const IMPLICIT_CASES: usize = 100;
pub const IMPLICIT_ORDER: usize = 12;

/// `f(z', φ(z'))` for the implicit function `φ` of `f`.
pub fn back_substitute(f: &Jet, order: usize) -> Result<Jet> {
    let phi = implicit_fn(f, order)?;
    let dim = f.dim();
    let base = phi.base().clone();
    let mut inner: Vec<Jet> = (0..dim - 1)
        .map(|j| Jet::coordinate(order, base.clone(), j))
        .collect();
    inner.push(phi);
    Ok(compose(f, &inner)?)
}

pub fn implicit_residuals(seed: u64, cases: usize, order: usize) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for i in 0..cases {
        let f = implicit_case(&mut rng, 2, order);
        if !back_substitute(&f, order)?.is_zero() {
            bad.push(i);
        }
    }
    Ok(bad)
}

fn implicit_backsub(opts: &Options) -> Result<Vec<Check>> {
    let bad = implicit_residuals(opts.seed, IMPLICIT_CASES, IMPLICIT_ORDER)?;
    Ok(vec![Check::new(
        "back-substitution",
        "f(z', φ(z')) = 0",
        bad.is_empty(),
        format!(
            "{} of {IMPLICIT_CASES} residuals vanish to order {IMPLICIT_ORDER}",
            IMPLICIT_CASES - bad.len()
        ),
    )])
}

pub const CLOSURE_ORDER: usize = 10;

fn xv(vars: usize, j: usize) -> ExpPolynomial {
    ExpPolynomial::x(vars, j)
}

fn yv(vars: usize, j: usize) -> ExpPolynomial {
    ExpPolynomial::y(vars, j)
}

/// `(g, u) = (e^z - 1, e^{e^z - 1})`, with one coordinate and two unknowns.
pub fn inner_instance() -> Result<(ImplicitSystem, ImplicitSolution)> {
    let v = 3;
    let one = ExpPolynomial::constant(v, GaussianRational::one());
    let sys = ImplicitSystem::new(
        1,
        vec![xv(v, 1).sub(&yv(v, 0)).add(&one), xv(v, 2).sub(&yv(v, 1))],
    )?;
    let e = Jet::exp_at_origin(CLOSURE_ORDER);
    let g = e.sub(&Jet::constant(
        1,
        CLOSURE_ORDER,
        origin1(),
        GaussianRational::one(),
    ))?;
    let u = exp_of(&g)?;
    Ok((sys, ImplicitSolution::new(vec![g, u])?))
}

/// `(f, v) = (z e^z, e^z)`, with one coordinate and two unknowns.
pub fn outer_instance() -> Result<(ImplicitSystem, ImplicitSolution)> {
    let v = 3;
    let sys = ImplicitSystem::new(
        1,
        vec![
            xv(v, 1).sub(&xv(v, 0).mul(&xv(v, 2))),
            xv(v, 2).sub(&yv(v, 0)),
        ],
    )?;
    let e = Jet::exp_at_origin(CLOSURE_ORDER);
    let f = Jet::coordinate(CLOSURE_ORDER, origin1(), 0).mul(&e)?;
    Ok((sys, ImplicitSolution::new(vec![f, e])?))
}

/// `(f, v) = (z2 + z1 e^{z1}, e^{z1})`, with two coordinates and two unknowns.
pub fn bivariate_instance() -> Result<(ImplicitSystem, ImplicitSolution)> {
    let v = 4;
    let sys = ImplicitSystem::new(
        2,
        vec![
            xv(v, 2).sub(&xv(v, 1)).sub(&xv(v, 0).mul(&xv(v, 3))),
            xv(v, 3).sub(&yv(v, 0)),
        ],
    )?;
    let base = Point::origin(2);
    let z1 = Jet::coordinate(CLOSURE_ORDER, base.clone(), 0);
    let z2 = Jet::coordinate(CLOSURE_ORDER, base.clone(), 1);
    let e1 = compose(
        &Jet::exp_at_origin(CLOSURE_ORDER),
        std::slice::from_ref(&z1),
    )?;
    let f = z2.add(&z1.mul(&e1)?)?;
    Ok((sys, ImplicitSolution::new(vec![f, e1])?))
}

/// Name, expected size, size found, whether `check_solution` passes and whether the defined
/// germ is the one computed directly.
pub type ClosureRow = (&'static str, usize, usize, bool, bool);

/// One row per closure.
pub fn closure_rows() -> Result<Vec<ClosureRow>> {
    let (g_sys, g_sol) = inner_instance()?;
    let (f_sys, f_sol) = outer_instance()?;
    let (b_sys, b_sol) = bivariate_instance()?;
    let mut rows = Vec::new();

    let (h_sys, h_sol) = closure_compose(&g_sys, &g_sol, &f_sys, &f_sol)?;
    let k = f_sys.coords();
    let m = g_sys.size() - k;
    let direct = compose(f_sol.function(), &g_sol.unknowns()[..k])?;
    rows.push((
        "compose",
        k + m + f_sys.size(),
        h_sys.size(),
        check_solution(&h_sys, &h_sol, h_sol.order())?.passes(),
        h_sol.function() == &direct,
    ));

    let (d_sys, d_sol) = closure_derivative(&f_sys, &f_sol, 0)?;
    let direct = f_sol.function().partial_derivative(0)?;
    rows.push((
        "derivative",
        2 * f_sys.size(),
        d_sys.size(),
        check_solution(&d_sys, &d_sol, d_sol.order())?.passes(),
        d_sol.function() == &direct,
    ));

    let (i_sys, i_sol) = closure_implicit(&b_sys, &b_sol)?;
    // z2 + z1 e^{z1} = 0 along z2 gives φ = -z1 e^{z1}
    let z = Jet::coordinate(CLOSURE_ORDER, origin1(), 0);
    let direct = z.mul(&Jet::exp_at_origin(CLOSURE_ORDER))?.neg();
    rows.push((
        "implicit",
        b_sys.size() + 1,
        i_sys.size(),
        check_solution(&i_sys, &i_sol, i_sol.order())?.passes(),
        i_sol.function() == &direct,
    ));
    Ok(rows)
}

fn closure_sizes(_: &Options) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, want, got, valid, value) in closure_rows()? {
        checks.push(Check::new(
            format!("{name}-size"),
            "implicit system size",
            want == got,
            format!("{got} (expected {want})"),
        ));
        checks.push(Check::new(
            format!("{name}-valid"),
            "residual 0, Jacobian invertible",
            valid,
            format!("check_solution: {valid}"),
        ));
        checks.push(Check::new(
            format!("{name}-value"),
            "defined germ",
            value,
            format!("matches direct computation: {value}"),
        ));
    }
    Ok(checks)
}

pub fn round_trip_charts() -> Vec<Chart> {
    vec![
        Chart::zero(),
        Chart::Finite(GaussianRational::one()),
        Chart::Finite(GaussianRational::i()),
        Chart::Infinity,
    ]
}

/// Failures of the blow-up round trip of `f` (order `2k`) back to order `k`.
pub fn round_trip_failures(f: &Jet, k: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let want = f.truncate(k)?;
    let g0 = blow_up_jet(f, &Chart::zero(), 2 * k)?;
    if blow_down_reconstruct(&g0, k)? != want {
        out.push("chart 0 reconstruction".to_string());
    }
    for chart in round_trip_charts() {
        let g = blow_up_jet(f, &chart, 2 * k)?;
        if reconstruct_from_chart(&g, &chart, k)? != want {
            out.push(format!("chart {chart} reconstruction"));
        }
        if !chart_transition_check(f, &Chart::zero(), &chart, k)? {
            out.push(format!("transition 0 -> {chart}"));
        }
        if !divisor_constancy_in_chart(&g, &chart) {
            out.push(format!("chart {chart} not constant on the divisor"));
        }
        if chart != Chart::Infinity && !divisor_constancy_check(&g) {
            out.push(format!("chart {chart} not constant on z1 = 0"));
        }
    }
    Ok(out)
}

/// A random polynomial of degree `d` in two variables, as a jet of order `2d`.
pub fn random_polynomial_jet(rng: &mut impl Rng, d: usize) -> Result<Jet> {
    let terms: Vec<(MultiIndex, GaussianRational)> = MultiIndex::up_to(2, d)
        .into_iter()
        .map(|a| (a, random_gaussian(rng, 5)))
        .collect();
    let p = Polynomial::from_terms(2, terms)?;
    Ok(Jet::from_polynomial(&p, Point::origin(2), 2 * d)?)
}

fn blowdown_roundtrip(opts: &Options) -> Result<Vec<Check>> {
    let d = opts.degree;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut bad = Vec::new();
    for i in 0..100 {
        let f = random_polynomial_jet(&mut rng, d)?;
        let fails = round_trip_failures(&f, d)?;
        if !fails.is_empty() {
            bad.push(format!("case {i}: {}", fails.join(", ")));
        }
    }
    Ok(vec![Check::new(
        "round-trip",
        "blow-down of f∘π_λ = f in charts 0, 1, i, inf",
        bad.is_empty(),
        if bad.is_empty() {
            format!("100 polynomials of degree {d} recovered exactly")
        } else {
            bad.join("; ")
        },
    )])
}

fn vanishing_stability(opts: &Options) -> Result<Vec<Check>> {
    let k = 8;
    let cfg = StabilityConfig {
        keep_order: 2,
        tested_order: k,
        trials: 20,
    };
    let f = crate::random::generate_random_jet(1, 2 * k, opts.seed, 9);

    // f(√(z²)) - f vanishes for every f
    let genuine =
        expr("(poly-apply (- z1 z2) (deram 2 (compose (germ f 0) (poly (^ z 2) 0))) (germ f 0))");
    let env = Env::new().with("f", f.clone());
    let r1 = vanishing_stability_test(&genuine, &env, cfg, &mut SeededTails::new(opts.seed, 9))?;

    // f - g vanishes only because g was chosen equal to f
    let coincidence = expr("(poly-apply (- z1 z2) (germ f 0) (germ g 0))");
    let env = Env::new().with("f", f.clone()).with("g", f);
    let r2 =
        vanishing_stability_test(&coincidence, &env, cfg, &mut SeededTails::new(opts.seed, 9))?;

    Ok(vec![
        Check::new(
            "genuine-identity",
            "f(√(z²)) = f holds near every f",
            r1.is_stable() && r1.stable_trials == cfg.trials,
            format!("{} of {} trials vanish", r1.stable_trials, r1.trials),
        ),
        Check::new(
            "coincidence",
            "f = g fails once tails are redrawn",
            r2.base_vanishes && r2.failures.len() == cfg.trials,
            format!(
                "vanishes on inputs: {}, {} of {} trials fail",
                r2.base_vanishes,
                r2.failures.len(),
                r2.trials
            ),
        ),
    ])
}

fn nonlocality(_: &Options) -> Result<Vec<Check>> {
    let mus = vec![
        GaussianRational::zero(),
        GaussianRational::one(),
        GaussianRational::i(),
    ];
    let k = 2u32;
    let lambda = GaussianRational::from(2);
    let w = nonlocality_witness(&mus, k, &lambda)?;
    let expected = (mus.len() as u32 + 1) * k;
    let orders_ok = w
        .chart_vanishing_orders
        .iter()
        .all(|&o| o == expected as usize);

    // chart jets of h below the vanishing order agree with those of 0
    let below = expected as usize - 1;
    let h = Jet::from_polynomial(&w.poly, Point::origin(2), below)?;
    let mut silent = true;
    for mu in &mus {
        silent &= blow_up_jet(&h, &Chart::Finite(mu.clone()), below)?.is_zero();
    }
    Ok(vec![
        Check::new(
            "chart-orders",
            "h = prod (z2 - mu z1)^K vanishes to order (|mu|+1)K in each chart",
            orders_ok,
            format!("{:?}, expected {expected}", w.chart_vanishing_orders),
        ),
        Check::new(
            "chart-jets-silent",
            "chart jets of h and 0 agree",
            silent,
            format!("blow-ups of order {below} vanish at lambda in {{0, 1, i}}: {silent}"),
        ),
        Check::new(
            "value-off-image",
            "h differs from 0 outside the chart images",
            !w.value.is_zero(),
            format!("h{} = {}", w.point, w.value),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_names() {
        let names: Vec<_> = scenario_names().collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert!(matches!(
            run_scenario("nope", &Options::default()),
            Err(HarnessError::UnknownScenario(_))
        ));
    }

    #[test]
    fn geometric_series() {
        let f = inverse_one_plus_square(6);
        assert_eq!(f.coeff1(4), GaussianRational::one());
        assert_eq!(f.coeff1(6), -GaussianRational::one());
        assert_eq!(inverse_one_plus(3).coeff1(3), -GaussianRational::one());
    }

    #[test]
    fn generic_inputs_match_requirements() {
        let e = expr("(mdiv (deram 2 (germ g 0)))");
        let env = generic_inputs(&e, 3, 1).unwrap();
        let g = env.get("g", &origin1()).unwrap();
        assert_eq!(g.order(), 8);
        assert!(g.value().is_zero());
        assert!(apply_expr(&e, &env, 3).is_ok());
    }

    #[test]
    fn reports_sort_checks() {
        let r = run_scenario("nonlocality", &Options::default()).unwrap();
        let names: Vec<_> = r.checks.iter().map(|c| c.name.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert!(r.passed(), "{r}");
        assert!(r.to_string().starts_with(HEURISTIC_NOTICE));
    }
}
