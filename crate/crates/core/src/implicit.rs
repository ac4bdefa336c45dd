//! Exponential-polynomial implicit systems `F(x) = P(x, e^x)`.
//!
//! A system has `k` coordinate variables `z` followed by `n` unknowns `t`, and `n`
//! components. A solution is a tuple of germs `Φ = (φ_1, …, φ_n)` at a base point `a` of
//! `C^k` such that `F(z, Φ(z)) = 0` and `∂F/∂t` is invertible along it. The first unknown is
//! the function the system defines.

use num_traits::{One, Zero};

use crate::error::{GermError, Result};
use crate::gaussian::GaussianRational;
use crate::jet::{Jet, Point};
use crate::multi_index::MultiIndex;
use crate::operators::{compose, implicit_fn};
use crate::poly::Polynomial;

/// `P(x, y)` in `2·vars` variables, read as `F(x) = P(x, e^x)`. Variable `j < vars` is `x_j`
/// and variable `vars + j` is `y_j = e^{x_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpPolynomial {
    vars: usize,
    poly: Polynomial,
}

impl ExpPolynomial {
    pub fn new(vars: usize, poly: Polynomial) -> Result<Self> {
        if poly.nvars() != 2 * vars {
            return Err(GermError::DimensionMismatch {
                expected: 2 * vars,
                found: poly.nvars(),
            });
        }
        Ok(Self { vars, poly })
    }

    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            poly: Polynomial::zero(2 * vars),
        }
    }

    pub fn constant(vars: usize, c: GaussianRational) -> Self {
        Self {
            vars,
            poly: Polynomial::constant(2 * vars, c),
        }
    }

    pub fn x(vars: usize, j: usize) -> Self {
        Self {
            vars,
            poly: Polynomial::var(2 * vars, j),
        }
    }

    pub fn y(vars: usize, j: usize) -> Self {
        Self {
            vars,
            poly: Polynomial::var(2 * vars, vars + j),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            vars: self.vars,
            poly: self.poly.add(&other.poly),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            vars: self.vars,
            poly: self.poly.sub(&other.poly),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            vars: self.vars,
            poly: self.poly.mul(&other.poly),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            vars: self.vars,
            poly: self.poly.scale(c),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            vars: self.vars,
            poly: self.poly.conj(),
        }
    }

    /// Whether `e^{x_j}` occurs.
    pub fn uses_exp(&self, j: usize) -> bool {
        self.poly.involves(self.vars + j)
    }

    /// `∂F/∂x_j = ∂P/∂x_j + y_j ∂P/∂y_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let dx = self.poly.derivative(j);
        let dy = self
            .poly
            .derivative(self.vars + j)
            .mul(&Polynomial::var(2 * self.vars, self.vars + j));
        Self {
            vars: self.vars,
            poly: dx.add(&dy),
        }
    }

    /// Moves `x_j` (and `y_j`) to `x_{targets[j]}` in a space of `vars` variables.
    pub fn remap(&self, vars: usize, targets: &[usize]) -> Self {
        let mut all: Vec<usize> = targets.to_vec();
        all.extend(targets.iter().map(|t| vars + t));
        Self {
            vars,
            poly: self.poly.remap(2 * vars, &all),
        }
    }
}

/// `F = (F_1, …, F_n)` over `coords` coordinates and `n` unknowns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ImplicitSystem {
    coords: usize,
    components: Vec<ExpPolynomial>,
}

impl ImplicitSystem {
    pub fn new(coords: usize, components: Vec<ExpPolynomial>) -> Result<Self> {
        if coords == 0 {
            return Err(GermError::Malformed(
                "an implicit system needs a coordinate variable".into(),
            ));
        }
        if components.is_empty() {
            return Err(GermError::Malformed(
                "an implicit system needs a component".into(),
            ));
        }
        let vars = coords + components.len();
        for c in &components {
            if c.vars != vars {
                return Err(GermError::DimensionMismatch {
                    expected: vars,
                    found: c.vars,
                });
            }
        }
        Ok(Self { coords, components })
    }

    pub fn size(&self) -> usize {
        self.components.len()
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn vars(&self) -> usize {
        self.coords + self.size()
    }

    pub fn components(&self) -> &[ExpPolynomial] {
        &self.components
    }

    fn uses_exp(&self, j: usize) -> bool {
        self.components.iter().any(|c| c.uses_exp(j))
    }

    /// Componentwise sum, for systems of the same shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.coords != other.coords || self.size() != other.size() {
            return Err(GermError::DimensionMismatch {
                expected: self.vars(),
                found: other.vars(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect();
        Self::new(self.coords, components)
    }
}

/// The unknowns of an implicit solution, as jets at a common base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ImplicitSolution {
    base: Point,
    order: usize,
    unknowns: Vec<Jet>,
}

impl ImplicitSolution {
    /// Truncates every jet to the smallest order among them.
    pub fn new(unknowns: Vec<Jet>) -> Result<Self> {
        let Some(first) = unknowns.first() else {
            return Err(GermError::Malformed(
                "a solution needs at least one germ".into(),
            ));
        };
        let base = first.base().clone();
        for j in &unknowns {
            if j.base() != &base {
                return Err(GermError::BaseMismatch {
                    left: base.to_string(),
                    right: j.base().to_string(),
                });
            }
        }
        let order = unknowns.iter().map(Jet::order).min().unwrap_or(0);
        let unknowns = unknowns
            .iter()
            .map(|j| j.truncate(order))
            .collect::<Result<_>>()?;
        Ok(Self {
            base,
            order,
            unknowns,
        })
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn unknowns(&self) -> &[Jet] {
        &self.unknowns
    }

    /// The germ the system defines.
    pub fn function(&self) -> &Jet {
        &self.unknowns[0]
    }

    /// `(z_1, …, z_k, φ_1, …, φ_n)`.
    pub fn full(&self) -> Vec<Jet> {
        let k = self.base.dim();
        let mut out: Vec<Jet> = (0..k)
            .map(|j| Jet::coordinate(self.order, self.base.clone(), j))
            .collect();
        out.extend(self.unknowns.iter().cloned());
        out
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        Self::new(
            self.unknowns
                .iter()
                .map(|j| j.truncate(order))
                .collect::<Result<_>>()?,
        )
    }
}

fn check_shape(f: &ImplicitSystem, psi: &ImplicitSolution) -> Result<()> {
    if psi.base.dim() != f.coords {
        return Err(GermError::DimensionMismatch {
            expected: f.coords,
            found: psi.base.dim(),
        });
    }
    if psi.unknowns.len() != f.size() {
        return Err(GermError::DimensionMismatch {
            expected: f.size(),
            found: psi.unknowns.len(),
        });
    }
    Ok(())
}

/// `e^{g}` for a germ vanishing at its base, where the exponential series is exact.
pub fn exp_of(g: &Jet) -> Result<Jet> {
    let v = g.value();
    if !v.is_zero() {
        return Err(GermError::NonGaussianExponential {
            value: v.to_string(),
        });
    }
    compose(&Jet::exp_at_origin(g.order()), std::slice::from_ref(g))
}

/// The jets substituted for `(x, y)`, with a constant zero wherever no `y_j` occurs.
fn substitution(f: &ImplicitSystem, psi: &ImplicitSolution, order: usize) -> Result<Vec<Jet>> {
    let xs: Vec<Jet> = psi
        .full()
        .iter()
        .map(|j| j.truncate(order))
        .collect::<Result<_>>()?;
    let mut ys = Vec::with_capacity(xs.len());
    for (j, x) in xs.iter().enumerate() {
        if f.uses_exp(j) {
            ys.push(exp_of(x)?);
        } else {
            ys.push(Jet::zero(x.dim(), order, x.base().clone()));
        }
    }
    let mut all = xs;
    all.extend(ys);
    Ok(all)
}

/// Values of `(x, y)` along the solution at its base point.
fn base_values(
    components: &[ExpPolynomial],
    psi: &ImplicitSolution,
) -> Result<Vec<GaussianRational>> {
    let xs: Vec<GaussianRational> = psi.full().iter().map(Jet::value).collect();
    let mut out = xs.clone();
    for (j, x) in xs.iter().enumerate() {
        if components.iter().any(|c| c.uses_exp(j)) {
            if !x.is_zero() {
                return Err(GermError::NonGaussianExponential {
                    value: x.to_string(),
                });
            }
            out.push(GaussianRational::one());
        } else {
            out.push(GaussianRational::zero());
        }
    }
    Ok(out)
}

/// The jets of `F_i(z, Φ(z))` to order `k`.
pub fn eval_residual(f: &ImplicitSystem, psi: &ImplicitSolution, k: usize) -> Result<Vec<Jet>> {
    check_shape(f, psi)?;
    if k > psi.order {
        return Err(GermError::InsufficientOrder {
            have: psi.order,
            need: k,
        });
    }
    let inputs = substitution(f, psi, k)?;
    let at = Point(inputs.iter().map(Jet::value).collect());
    f.components
        .iter()
        .map(|c| compose(&Jet::from_polynomial(&c.poly, at.clone(), k)?, &inputs))
        .collect()
}

/// `∂F_i/∂t_j` at the base point; row `i`, column `j`.
pub fn jacobian_at_base(
    f: &ImplicitSystem,
    psi: &ImplicitSolution,
) -> Result<Vec<Vec<GaussianRational>>> {
    check_shape(f, psi)?;
    jacobian_columns(&f.components, psi, f.coords..f.vars())
}

fn jacobian_columns(
    components: &[ExpPolynomial],
    psi: &ImplicitSolution,
    cols: std::ops::Range<usize>,
) -> Result<Vec<Vec<GaussianRational>>> {
    let at = base_values(components, psi)?;
    components
        .iter()
        .map(|c| {
            cols.clone()
                .map(|j| c.derivative(j).poly.eval(&at))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolutionCheck {
    pub residual_zero: bool,
    pub jacobian_invertible: bool,
}

impl SolutionCheck {
    pub fn passes(&self) -> bool {
        self.residual_zero && self.jacobian_invertible
    }
}

pub fn check_solution(
    f: &ImplicitSystem,
    psi: &ImplicitSolution,
    k: usize,
) -> Result<SolutionCheck> {
    let residual_zero = eval_residual(f, psi, k)?.iter().all(Jet::is_zero);
    let jac = jacobian_at_base(f, psi)?;
    let jacobian_invertible = !linalg::determinant(&jac).is_zero();
    Ok(SolutionCheck {
        residual_zero,
        jacobian_invertible,
    })
}

fn require_solution(f: &ImplicitSystem, psi: &ImplicitSolution) -> Result<()> {
    let check = check_solution(f, psi, psi.order)?;
    if !check.residual_zero {
        return Err(GermError::NotASolution(
            "the residual does not vanish".into(),
        ));
    }
    if !check.jacobian_invertible {
        return Err(GermError::NotASolution(
            "the Jacobian is singular at the base point".into(),
        ));
    }
    Ok(())
}

/// Conjugates every coefficient; the reflected germs solve the conjugate system.
pub fn closure_schwarz(
    f: &ImplicitSystem,
    psi: &ImplicitSolution,
) -> Result<(ImplicitSystem, ImplicitSolution)> {
    require_solution(f, psi)?;
    let system = ImplicitSystem::new(
        f.coords,
        f.components.iter().map(ExpPolynomial::conj).collect(),
    )?;
    let solution = ImplicitSolution::new(psi.unknowns.iter().map(Jet::conjugate).collect())?;
    Ok((system, solution))
}

/// `H(x, z, u, t) = (G(x, z, u), F(z, t))` for `h = f ∘ g`.
///
/// `G` has coordinates `x` and unknowns `(z, u)`, of which the first `F.coords()` are the
/// inner germs `g`. The output's unknowns are ordered `(h, z, u, t')` so that `h` comes
/// first.
pub fn closure_compose(
    g_sys: &ImplicitSystem,
    g_sol: &ImplicitSolution,
    f_sys: &ImplicitSystem,
    f_sol: &ImplicitSolution,
) -> Result<(ImplicitSystem, ImplicitSolution)> {
    require_solution(g_sys, g_sol)?;
    require_solution(f_sys, f_sol)?;
    let s = g_sys.coords;
    let k = f_sys.coords;
    let n = f_sys.size();
    if g_sys.size() < k {
        return Err(GermError::DimensionMismatch {
            expected: k,
            found: g_sys.size(),
        });
    }
    let m = g_sys.size() - k;
    let g = &g_sol.unknowns[..k];
    let values = Point(g.iter().map(Jet::value).collect());
    if &values != f_sol.base() {
        return Err(GermError::BaseMismatch {
            left: values.to_string(),
            right: f_sol.base().to_string(),
        });
    }
    let vars = s + k + m + n;
    let g_targets: Vec<usize> = (0..s + k + m)
        .map(|j| if j < s { j } else { j + 1 })
        .collect();
    let f_targets: Vec<usize> = (0..k + n)
        .map(|j| match j {
            j if j < k => s + 1 + j,
            j if j == k => s,
            j => s + k + m + (j - k),
        })
        .collect();
    let mut components: Vec<ExpPolynomial> = g_sys
        .components
        .iter()
        .map(|c| c.remap(vars, &g_targets))
        .collect();
    components.extend(f_sys.components.iter().map(|c| c.remap(vars, &f_targets)));
    let system = ImplicitSystem::new(s, components)?;

    let mut unknowns = vec![compose(&f_sol.unknowns[0], g)?];
    unknowns.extend(g_sol.unknowns.iter().cloned());
    for phi in &f_sol.unknowns[1..] {
        unknowns.push(compose(phi, g)?);
    }
    Ok((system, ImplicitSolution::new(unknowns)?))
}

/// `F* = (F, ∂F/∂z_i + ∂F/∂t · w)` for `∂f/∂z_i`, with unknowns ordered `(w_1, t, w')`.
pub fn closure_derivative(
    f: &ImplicitSystem,
    psi: &ImplicitSolution,
    axis: usize,
) -> Result<(ImplicitSystem, ImplicitSolution)> {
    require_solution(f, psi)?;
    let k = f.coords;
    let n = f.size();
    if axis >= k {
        return Err(GermError::AxisOutOfRange { axis, dim: k });
    }
    if psi.order == 0 {
        return Err(GermError::InsufficientOrder { have: 0, need: 1 });
    }
    let vars = k + 2 * n;
    let targets: Vec<usize> = (0..k + n).map(|j| if j < k { j } else { j + 1 }).collect();
    let w = |j: usize| if j == 0 { k } else { k + n + j };
    let mut components: Vec<ExpPolynomial> = f
        .components
        .iter()
        .map(|c| c.remap(vars, &targets))
        .collect();
    for c in &f.components {
        let mut tilde = c.derivative(axis).remap(vars, &targets);
        for j in 0..n {
            let dt = c.derivative(k + j).remap(vars, &targets);
            tilde = tilde.add(&dt.mul(&ExpPolynomial::x(vars, w(j))));
        }
        components.push(tilde);
    }
    let system = ImplicitSystem::new(k, components)?;

    let derivs: Vec<Jet> = psi
        .unknowns
        .iter()
        .map(|j| j.partial_derivative(axis))
        .collect::<Result<_>>()?;
    let mut unknowns = vec![derivs[0].clone()];
    unknowns.extend(psi.unknowns.iter().cloned());
    unknowns.extend(derivs[1..].iter().cloned());
    Ok((system, ImplicitSolution::new(unknowns)?))
}

/// `F*(z', z_k, t) = (F(z', z_k, t), t_1)` for the implicit function `φ` of `f = φ_1` along
/// the last coordinate. The unknowns `(z_k, t)` keep their order, so `φ` comes first.
pub fn closure_implicit(
    f: &ImplicitSystem,
    psi: &ImplicitSolution,
) -> Result<(ImplicitSystem, ImplicitSolution)> {
    require_solution(f, psi)?;
    let k = f.coords;
    if k < 2 {
        return Err(GermError::DimensionMismatch {
            expected: 2,
            found: k,
        });
    }
    let phi = implicit_fn(psi.function(), psi.order)?;
    let mut components = f.components.clone();
    components.push(ExpPolynomial::x(f.vars(), k));
    let system = ImplicitSystem::new(k - 1, components)?;

    let base = phi.base().clone();
    let mut inner: Vec<Jet> = (0..k - 1)
        .map(|j| Jet::coordinate(psi.order, base.clone(), j))
        .collect();
    inner.push(phi.clone());
    let mut unknowns = vec![phi];
    for g in &psi.unknowns {
        unknowns.push(compose(g, &inner)?);
    }
    Ok((system, ImplicitSolution::new(unknowns)?))
}

/// `d·ψ_n = Σ_{i<n} a_i ψ_i + K`, where `ψ_0` is the coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRelation {
    pub d: u32,
    pub coeffs: Vec<i64>,
    pub constant: GaussianRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub system: ImplicitSystem,
    pub solution: ImplicitSolution,
    /// Rows of `G` kept in the reduced system, 0-based.
    pub rows: Vec<usize>,
    /// Order to which the relation was verified on the input jets.
    pub verified_order: usize,
}

/// Eliminates `ψ_n` using an integer linear relation, for a system with one coordinate.
///
/// With `x̃ = (x_0, …, x_{n-1})` the components become
/// `G_i(x̃) = e^{η(x̃)} F_i(d x_0, …, d x_{n-1}, Σ a_i x_i + K/d)` with `η = N Σ |a_i| x_i`
/// clearing negative powers of `e^{x_i}`, where `N` bounds the total degree. The solution
/// `ψ_i(d z)/d` of `G` is kept on the rows of `G` chosen greedily (lowest index first) to
/// make the Jacobian invertible.
pub fn reduce_linear_relation(
    f: &ImplicitSystem,
    psi: &ImplicitSolution,
    relation: &LinearRelation,
) -> Result<Reduction> {
    require_solution(f, psi)?;
    if f.coords != 1 {
        return Err(GermError::DimensionMismatch {
            expected: 1,
            found: f.coords,
        });
    }
    let n = f.size();
    if n < 2 {
        return Err(GermError::Malformed(
            "the relation must involve ψ_n of a system of size at least 2".into(),
        ));
    }
    if relation.d == 0 {
        return Err(GermError::Malformed("the relation needs d >= 1".into()));
    }
    if relation.coeffs.len() != n {
        return Err(GermError::DimensionMismatch {
            expected: n,
            found: relation.coeffs.len(),
        });
    }
    let d = GaussianRational::from(relation.d as i64);
    let full = psi.full();
    let order = psi.order;
    let mut lhs = full[n].scale(&d).sub(&Jet::constant(
        1,
        order,
        psi.base.clone(),
        relation.constant.clone(),
    ))?;
    for (a, g) in relation.coeffs.iter().zip(&full) {
        lhs = lhs.sub(&g.scale(&GaussianRational::from(*a)))?;
    }
    if let Some(deg) = lhs.coeffs().keys().next().map(MultiIndex::degree) {
        return Err(GermError::RelationViolated(deg));
    }
    let k_over_d = &relation.constant / &d;
    if f.uses_exp(n) && !relation.constant.is_zero() {
        return Err(GermError::NonGaussianExponential {
            value: k_over_d.to_string(),
        });
    }

    let big_n = f
        .components
        .iter()
        .map(|c| c.poly.degree())
        .max()
        .unwrap_or(0) as i64;
    let reduced_vars = n;
    let nv = 2 * reduced_vars;
    let mut subs: Vec<Polynomial> = Vec::with_capacity(2 * (n + 1));
    for j in 0..n {
        subs.push(Polynomial::var(nv, j).scale(&d));
    }
    let mut last = Polynomial::constant(nv, k_over_d);
    for (j, a) in relation.coeffs.iter().enumerate() {
        last = last.add(&Polynomial::var(nv, j).scale(&GaussianRational::from(*a)));
    }
    subs.push(last);
    for j in 0..n {
        subs.push(Polynomial::var(nv, reduced_vars + j).pow(relation.d));
    }
    // y_n is substituted by hand below, since it may carry negative powers
    subs.push(Polynomial::constant(nv, GaussianRational::one()));

    let mut g_all = Vec::with_capacity(n);
    for c in &f.components {
        let mut acc = Polynomial::zero(nv);
        for (alpha, coeff) in c.poly.terms() {
            let b = alpha.get(2 * (n + 1) - 1) as i64;
            let rest = Polynomial::monomial(alpha.with(2 * (n + 1) - 1, 0), coeff.clone())
                .substitute(&subs)?;
            let mut e = vec![0u32; nv];
            for (j, a) in relation.coeffs.iter().enumerate() {
                let exp = a * b + big_n * a.abs();
                e[reduced_vars + j] = u32::try_from(exp).expect("η clears every negative power");
            }
            acc = acc.add(&rest.mul(&Polynomial::monomial(
                MultiIndex::new(e),
                GaussianRational::one(),
            )));
        }
        g_all.push(ExpPolynomial::new(reduced_vars, acc)?);
    }

    let new_base = Point(psi.base.coords().iter().map(|a| a / &d).collect());
    let unknowns: Vec<Jet> = psi.unknowns[..n - 1]
        .iter()
        .map(|g| {
            let coeffs = g.coeffs().iter().map(|(a, c)| {
                let j = a.degree() as u32;
                (a.clone(), &(c * &d.pow(j)) / &d)
            });
            Jet::new(1, g.order(), new_base.clone(), coeffs)
        })
        .collect::<Result<_>>()?;
    let solution = ImplicitSolution::new(unknowns)?;

    let jac = jacobian_columns(&g_all, &solution, 1..reduced_vars)?;
    let rows = linalg::independent_rows(&jac);
    if rows.len() < n - 1 {
        return Err(GermError::RankDeficient {
            rank: rows.len(),
            need: n - 1,
        });
    }
    let system = ImplicitSystem::new(1, rows.iter().map(|&r| g_all[r].clone()).collect())?;
    Ok(Reduction {
        system,
        solution,
        rows,
        verified_order: order,
    })
}

/// Exact linear algebra over `Q(i)`.
pub mod linalg {
    use num_traits::Zero;

    use crate::gaussian::GaussianRational;

    type Row = Vec<GaussianRational>;

    /// Rows, in order, that are independent of the rows kept before them.
    pub fn independent_rows(m: &[Row]) -> Vec<usize> {
        let mut basis: Vec<(usize, Row)> = Vec::new();
        let mut kept = Vec::new();
        for (i, row) in m.iter().enumerate() {
            let mut r = row.clone();
            for (p, b) in &basis {
                if !r[*p].is_zero() {
                    let f = r[*p].clone();
                    for (x, y) in r.iter_mut().zip(b) {
                        *x -= &(&f * y);
                    }
                }
            }
            if let Some(p) = r.iter().position(|x| !x.is_zero()) {
                let inv = r[p].inv().expect("nonzero");
                let r: Row = r.iter().map(|x| x * &inv).collect();
                basis.push((p, r));
                kept.push(i);
            }
        }
        kept
    }

    pub fn rank(m: &[Row]) -> usize {
        independent_rows(m).len()
    }

    /// Determinant of a square matrix; pivots are taken from the lowest available row.
    pub fn determinant(m: &[Row]) -> GaussianRational {
        let n = m.len();
        let mut a: Vec<Row> = m.to_vec();
        let mut det = GaussianRational::from(1);
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return GaussianRational::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det *= &pivot;
            let inv = pivot.inv().expect("nonzero");
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] * &inv;
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &(&f * p);
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn x(vars: usize, j: usize) -> ExpPolynomial {
        ExpPolynomial::x(vars, j)
    }

    fn y(vars: usize, j: usize) -> ExpPolynomial {
        ExpPolynomial::y(vars, j)
    }

    fn line(order: usize, c0: &str, c1: &str) -> Jet {
        let mut cs = vec![g(c0), g(c1)];
        cs.resize(order + 1, g("0"));
        Jet::univariate(g("0"), cs)
    }

    fn exp_system() -> (ImplicitSystem, ImplicitSolution) {
        let f = ImplicitSystem::new(1, vec![x(2, 1).sub(&y(2, 0))]).unwrap();
        let psi = ImplicitSolution::new(vec![Jet::exp_at_origin(16)]).unwrap();
        (f, psi)
    }

    #[test]
    fn exp_is_one_implicitly_defined() {
        let (f, psi) = exp_system();
        assert!(eval_residual(&f, &psi, 16)
            .unwrap()
            .iter()
            .all(Jet::is_zero));
        assert_eq!(jacobian_at_base(&f, &psi).unwrap(), vec![vec![g("1")]]);
        assert!(check_solution(&f, &psi, 16).unwrap().passes());
    }

    #[test]
    fn residual_examples() {
        let zero = ImplicitSystem::new(1, vec![x(2, 1)]).unwrap();
        let psi = ImplicitSolution::new(vec![line(4, "0", "0")]).unwrap();
        assert!(eval_residual(&zero, &psi, 4).unwrap()[0].is_zero());

        let diagonal = ImplicitSystem::new(1, vec![x(2, 1).sub(&x(2, 0))]).unwrap();
        let two_z = ImplicitSolution::new(vec![line(4, "0", "2")]).unwrap();
        assert_eq!(
            eval_residual(&diagonal, &two_z, 4).unwrap()[0],
            line(4, "0", "1")
        );
        let c = check_solution(&diagonal, &two_z, 4).unwrap();
        assert_eq!(
            c,
            SolutionCheck {
                residual_zero: false,
                jacobian_invertible: true
            }
        );

        let square = ImplicitSystem::new(1, vec![x(2, 1).mul(&x(2, 1))]).unwrap();
        let c = check_solution(&square, &psi, 4).unwrap();
        assert_eq!(
            c,
            SolutionCheck {
                residual_zero: true,
                jacobian_invertible: false
            }
        );
    }

    #[test]
    fn divided_exponential_is_singular_at_zero() {
        // z·f(z) + 1 - e^z = 0 for f = (e^z - 1)/z, but ∂/∂x_1 = z vanishes at 0
        let f = ImplicitSystem::new(
            1,
            vec![x(2, 0)
                .mul(&x(2, 1))
                .add(&ExpPolynomial::constant(2, g("1")))
                .sub(&y(2, 0))],
        )
        .unwrap();
        let coeffs: Vec<GaussianRational> = (0..=10u32)
            .map(|n| {
                GaussianRational::real(num_rational::BigRational::new(
                    1.into(),
                    crate::gaussian::factorial(n + 1),
                ))
            })
            .collect();
        let psi = ImplicitSolution::new(vec![Jet::univariate(g("0"), coeffs)]).unwrap();
        let c = check_solution(&f, &psi, 10).unwrap();
        assert_eq!(
            c,
            SolutionCheck {
                residual_zero: true,
                jacobian_invertible: false
            }
        );
    }

    #[test]
    fn exponentials_need_vanishing_arguments() {
        let f = ImplicitSystem::new(1, vec![x(2, 1).sub(&y(2, 1))]).unwrap();
        let psi = ImplicitSolution::new(vec![line(3, "1", "0")]).unwrap();
        assert!(matches!(
            eval_residual(&f, &psi, 3),
            Err(GermError::NonGaussianExponential { .. })
        ));
    }

    #[test]
    fn schwarz_conjugates_coefficients() {
        let f = ImplicitSystem::new(1, vec![x(2, 1).sub(&x(2, 0).scale(&g("i")))]).unwrap();
        let psi = ImplicitSolution::new(vec![line(5, "0", "i")]).unwrap();
        let (f2, psi2) = closure_schwarz(&f, &psi).unwrap();
        assert_eq!(f2.components()[0], x(2, 1).sub(&x(2, 0).scale(&g("-i"))));
        assert_eq!(psi2.function(), &line(5, "0", "-i"));
        assert!(check_solution(&f2, &psi2, 5).unwrap().passes());
    }

    #[test]
    fn composing_exp_after_exp_minus_one() {
        let (ef, epsi) = exp_system();
        let g_sys = ImplicitSystem::new(
            1,
            vec![x(2, 1)
                .sub(&y(2, 0))
                .add(&ExpPolynomial::constant(2, g("1")))],
        )
        .unwrap();
        let g_sol = ImplicitSolution::new(vec![Jet::exp_at_origin(10)
            .sub(&Jet::constant(1, 10, Point::origin(1), g("1")))
            .unwrap()])
        .unwrap();
        let (h, hsol) = closure_compose(&g_sys, &g_sol, &ef, &epsi).unwrap();
        assert_eq!(h.size(), 2);
        assert!(check_solution(&h, &hsol, 10).unwrap().passes());
        // e^{e^z - 1} = 1 + z + z^2 + 5/6 z^3 + …
        assert_eq!(hsol.function().coeff1(2), g("1"));
        assert_eq!(hsol.function().coeff1(3), g("5/6"));
    }

    #[test]
    fn composition_requires_chaining() {
        let (ef, epsi) = exp_system();
        assert!(matches!(
            closure_compose(&ef, &epsi, &ef, &epsi),
            Err(GermError::BaseMismatch { .. })
        ));
    }

    #[test]
    fn derivative_of_exp() {
        let (f, psi) = exp_system();
        let (f2, psi2) = closure_derivative(&f, &psi, 0).unwrap();
        assert_eq!(f2.size(), 2);
        assert_eq!(psi2.function(), &Jet::exp_at_origin(15));
        assert!(check_solution(&f2, &psi2, 15).unwrap().passes());
    }

    #[test]
    fn implicit_of_a_difference_is_the_identity() {
        // t = z_2 - z_1 over two coordinates
        let f = ImplicitSystem::new(2, vec![x(3, 2).sub(&x(3, 1)).add(&x(3, 0))]).unwrap();
        let diff = Jet::coordinate(6, Point::origin(2), 1)
            .sub(&Jet::coordinate(6, Point::origin(2), 0))
            .unwrap();
        let psi = ImplicitSolution::new(vec![diff]).unwrap();
        let (f2, psi2) = closure_implicit(&f, &psi).unwrap();
        assert_eq!(f2.size(), 2);
        assert_eq!(psi2.function(), &Jet::coordinate(6, Point::origin(1), 0));
        assert!(psi2.unknowns()[1].is_zero());
        assert!(check_solution(&f2, &psi2, 6).unwrap().passes());
    }

    fn planted() -> (ImplicitSystem, ImplicitSolution) {
        // ψ_1 = e^z - 1, ψ_2 = 2ψ_1 + 1
        let one = ExpPolynomial::constant(3, g("1"));
        let f = ImplicitSystem::new(
            1,
            vec![
                x(3, 1).sub(&y(3, 0)).add(&one),
                x(3, 2).sub(&x(3, 1).scale(&g("2"))).sub(&one),
            ],
        )
        .unwrap();
        let e1 = Jet::exp_at_origin(8)
            .sub(&Jet::constant(1, 8, Point::origin(1), g("1")))
            .unwrap();
        let psi2 = e1
            .scale(&g("2"))
            .add(&Jet::constant(1, 8, Point::origin(1), g("1")))
            .unwrap();
        (f, ImplicitSolution::new(vec![e1, psi2]).unwrap())
    }

    #[test]
    fn reduces_a_planted_relation() {
        let (f, psi) = planted();
        assert!(check_solution(&f, &psi, 8).unwrap().passes());
        let rel = LinearRelation {
            d: 1,
            coeffs: vec![0, 2],
            constant: g("1"),
        };
        let red = reduce_linear_relation(&f, &psi, &rel).unwrap();
        assert_eq!(red.system.size(), 1);
        assert_eq!(red.rows, vec![0]);
        assert_eq!(red.verified_order, 8);
        assert!(check_solution(&red.system, &red.solution, 8)
            .unwrap()
            .passes());
    }

    #[test]
    fn reduction_rescales_by_d() {
        // 2ψ_2 = ψ_1 with ψ_1 = e^z - 1 rescales ψ_1 to (e^{2z} - 1)/2
        let one = ExpPolynomial::constant(3, g("1"));
        let f = ImplicitSystem::new(
            1,
            vec![
                x(3, 1).sub(&y(3, 0)).add(&one),
                x(3, 2).scale(&g("2")).sub(&x(3, 1)),
            ],
        )
        .unwrap();
        let e1 = Jet::exp_at_origin(8)
            .sub(&Jet::constant(1, 8, Point::origin(1), g("1")))
            .unwrap();
        let half = e1.scale(&g("1/2"));
        let psi = ImplicitSolution::new(vec![e1, half]).unwrap();
        let rel = LinearRelation {
            d: 2,
            coeffs: vec![0, 1],
            constant: g("0"),
        };
        let red = reduce_linear_relation(&f, &psi, &rel).unwrap();
        assert_eq!(red.solution.function().coeff1(1), g("1"));
        assert_eq!(red.solution.function().coeff1(2), g("1"));
        assert!(check_solution(&red.system, &red.solution, 8)
            .unwrap()
            .passes());
    }

    #[test]
    fn reduction_preconditions() {
        let (f, psi) = planted();
        let wrong = LinearRelation {
            d: 1,
            coeffs: vec![0, 3],
            constant: g("1"),
        };
        assert_eq!(
            reduce_linear_relation(&f, &psi, &wrong).unwrap_err(),
            GermError::RelationViolated(1)
        );
        let (ef, epsi) = exp_system();
        let trivial = LinearRelation {
            d: 1,
            coeffs: vec![0],
            constant: g("0"),
        };
        assert!(matches!(
            reduce_linear_relation(&ef, &epsi, &trivial),
            Err(GermError::Malformed(_))
        ));
    }

    #[test]
    fn determinant_and_rank() {
        let m = vec![vec![g("0"), g("1")], vec![g("2"), g("i")]];
        assert_eq!(linalg::determinant(&m), g("-2"));
        let singular = vec![
            vec![g("1"), g("2")],
            vec![g("2"), g("4")],
            vec![g("0"), g("1")],
        ];
        assert_eq!(linalg::independent_rows(&singular), vec![0, 2]);
        assert_eq!(linalg::rank(&singular), 2);
    }
}
