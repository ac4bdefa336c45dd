//! The elementary operators acting on jets.
//!
//! Each operator returns the largest output order it can certify from its input orders:
//! composition keeps the smallest input order, partial derivatives and monomial division
//! lose one order, and `m`-th deramification divides the order by `m`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{GermError, Result};
use crate::gaussian::GaussianRational;
use crate::jet::{Jet, Point};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;

/// The polynomial operator: the germ of `poly` at `base`, to `order`.
pub fn embed_polynomial(poly: &Polynomial, base: Point, order: usize) -> Result<Jet> {
    Jet::from_polynomial(poly, base, order)
}

/// `∂f/∂z_axis` with a 0-based axis.
pub fn partial_derivative(f: &Jet, axis: usize) -> Result<Jet> {
    f.partial_derivative(axis)
}

/// Schwarz reflection `z ↦ conj(f(conj z))`, a germ at the conjugate base.
pub fn schwarz(f: &Jet) -> Jet {
    f.conjugate()
}

/// `f ∘ (g_1, …, g_n)`.
///
/// Every `g_i` must be based at the same point `b` and the values `(g_1(b), …, g_n(b))`
/// must equal the base of `f` exactly. The result has order `min` of all input orders.
///
/// The Faà di Bruno coefficients are produced by nested Horner substitution of the shifted
/// inner series `g_i - g_i(b)`, truncating every intermediate product to the degree budget
/// it can still contribute to.
pub fn compose(f: &Jet, inner: &[Jet]) -> Result<Jet> {
    if inner.len() != f.dim() {
        return Err(GermError::DimensionMismatch {
            expected: f.dim(),
            found: inner.len(),
        });
    }
    let first = &inner[0];
    for g in inner {
        if g.dim() != first.dim() {
            return Err(GermError::DimensionMismatch {
                expected: first.dim(),
                found: g.dim(),
            });
        }
        if g.base() != first.base() {
            return Err(GermError::BaseMismatch {
                left: first.base().to_string(),
                right: g.base().to_string(),
            });
        }
    }
    let values: Vec<GaussianRational> = inner.iter().map(Jet::value).collect();
    if values.as_slice() != f.base().coords() {
        return Err(GermError::BaseMismatch {
            left: f.base().to_string(),
            right: Point(values).to_string(),
        });
    }
    let order = inner.iter().map(Jet::order).fold(f.order(), usize::min);
    let base = first.base().clone();
    let shifted: Vec<Jet> = inner
        .iter()
        .zip(&values)
        .map(|(g, v)| g.sub(&Jet::constant(g.dim(), g.order(), base.clone(), v.clone())))
        .collect::<Result<_>>()?;
    let terms: Vec<(&MultiIndex, &GaussianRational)> = f
        .coeffs()
        .iter()
        .filter(|(a, _)| a.degree() <= order)
        .collect();
    let ctx = Horner {
        shifted: &shifted,
        dim: first.dim(),
        base: &base,
    };
    let out = ctx.eval(&terms, 0, order);
    Ok(out)
}

struct Horner<'a> {
    shifted: &'a [Jet],
    dim: usize,
    base: &'a Point,
}

impl Horner<'_> {
    /// Evaluates `Σ c_α h^α` over `terms`, all of which share the exponents before `var`,
    /// truncated to `budget`.
    fn eval(&self, terms: &[(&MultiIndex, &GaussianRational)], var: usize, budget: usize) -> Jet {
        if var == self.shifted.len() {
            let c: GaussianRational = terms.iter().map(|(_, c)| (*c).clone()).sum();
            return Jet::constant(self.dim, budget, self.base.clone(), c);
        }
        let mut groups: BTreeMap<u32, Vec<(&MultiIndex, &GaussianRational)>> = BTreeMap::new();
        for &(a, c) in terms {
            let e = a.get(var);
            if e as usize <= budget {
                groups.entry(e).or_default().push((a, c));
            }
        }
        let Some(&top) = groups.keys().next_back() else {
            return Jet::zero(self.dim, budget, self.base.clone());
        };
        let h = &self.shifted[var];
        let mut acc: Option<Jet> = None;
        for e in (0..=top).rev() {
            let order_here = budget - e as usize;
            let carried = acc.take().map(|a| a.mul_truncated(h, order_here));
            let part = groups.get(&e).map(|ts| self.eval(ts, var + 1, order_here));
            acc = match (carried, part) {
                (Some(a), Some(p)) => Some(a.add(&p).expect("same base")),
                (a, p) => a.or(p),
            };
        }
        acc.unwrap_or_else(|| Jet::zero(self.dim, budget, self.base.clone()))
    }
}

/// The implicit function `φ` of `f` at `a`: `f(z', φ(z')) ≡ 0` with `φ(a') = a_n`.
///
/// Requires `f(a) = 0` and `∂f/∂z_n(a) ≠ 0`. Solved degree by degree: the degree-`d` part
/// of `φ` is minus the degree-`d` residual of `f(z', φ_{<d})` divided by `∂f/∂z_n(a)`.
pub fn implicit_fn(f: &Jet, order: usize) -> Result<Jet> {
    let n = f.dim();
    if n < 2 {
        return Err(GermError::DimensionMismatch {
            expected: 2,
            found: n,
        });
    }
    let need = order.max(1);
    if f.order() < need {
        return Err(GermError::InsufficientOrder {
            have: f.order(),
            need,
        });
    }
    let value = f.value();
    if !value.is_zero() {
        return Err(GermError::ImplicitValueNonzero(value.to_string()));
    }
    let slope = f.coeff(&MultiIndex::unit(n, n - 1));
    let Some(inv_slope) = slope.inv() else {
        return Err(GermError::ImplicitDegenerate);
    };
    let base = Point(f.base().coords()[..n - 1].to_vec());
    let last = f.base().coords()[n - 1].clone();
    let mut phi: BTreeMap<MultiIndex, GaussianRational> =
        BTreeMap::from([(MultiIndex::zeros(n - 1), last)]);
    for d in 1..=order {
        let current = Jet::new(n - 1, d, base.clone(), phi.clone())?;
        let mut inner: Vec<Jet> = (0..n - 1)
            .map(|j| Jet::coordinate(d, base.clone(), j))
            .collect();
        inner.push(current);
        let residual = compose(&f.truncate(d)?, &inner)?;
        for (alpha, r) in residual.coeffs().iter().filter(|(a, _)| a.degree() == d) {
            phi.insert(alpha.clone(), -(r * &inv_slope));
        }
    }
    Jet::new(n - 1, order, base, phi)
}

/// Division by `(z_n - a_n)`, defined when every coefficient with `α_n = 0` vanishes.
/// The result has order `order - 1` and coefficient `c_{α + e_n}` at `α`.
pub fn monomial_div(f: &Jet) -> Result<Jet> {
    let last = f.dim() - 1;
    if let Some((alpha, _)) = f.coeffs().iter().find(|(a, _)| a.get(last) == 0) {
        return Err(GermError::DivisionNotDefined(alpha.to_string()));
    }
    if f.order() == 0 {
        return Err(GermError::InsufficientOrder { have: 0, need: 1 });
    }
    let coeffs = f
        .coeffs()
        .iter()
        .map(|(a, c)| (a.with(last, a.get(last) - 1), c.clone()));
    Jet::new(f.dim(), f.order() - 1, f.base().clone(), coeffs)
}

/// `f(z', a_n + (z_n - a_n)^{1/m})`, defined when only powers of `(z_n - a_n)` divisible by
/// `m` occur. The coefficient at `(α', j)` is `c_{(α', m j)}`; the result has order
/// `order / m` (rounded down).
pub fn deramify(f: &Jet, m: u32) -> Result<Jet> {
    if m == 0 {
        return Err(GermError::ZeroRamification);
    }
    let last = f.dim() - 1;
    if let Some((alpha, _)) = f.coeffs().iter().find(|(a, _)| a.get(last) % m != 0) {
        return Err(GermError::NotDeramifiable {
            m,
            alpha: alpha.to_string(),
        });
    }
    let order = f.order() / m as usize;
    let coeffs = f
        .coeffs()
        .iter()
        .map(|(a, c)| (a.with(last, a.get(last) / m), c.clone()))
        .filter(|(a, _)| a.degree() <= order);
    Jet::new(f.dim(), order, f.base().clone(), coeffs)
}

/// Composes `f` with polynomial maps `polys`, taking the inner germs at `base`.
pub fn compose_with_polynomials(
    f: &Jet,
    polys: &[Polynomial],
    base: &Point,
    order: usize,
) -> Result<Jet> {
    let inner: Vec<Jet> = polys
        .iter()
        .map(|p| Jet::from_polynomial(p, base.clone(), order))
        .collect::<Result<_>>()?;
    compose(f, &inner)
}

/// `z_n ↦ a_n + (z_n - a_n)^m`, the map undone by [`deramify`].
pub fn ramify(f: &Jet, m: u32) -> Result<Jet> {
    let dim = f.dim();
    let a = f.base().coords();
    let mut polys: Vec<Polynomial> = (0..dim).map(|j| Polynomial::var(dim, j)).collect();
    let shifted = Polynomial::var(dim, dim - 1).sub(&Polynomial::constant(dim, a[dim - 1].clone()));
    polys[dim - 1] = shifted
        .pow(m)
        .add(&Polynomial::constant(dim, a[dim - 1].clone()));
    compose_with_polynomials(f, &polys, f.base(), f.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn uni_at(base: &str, coeffs: &[&str]) -> Jet {
        Jet::univariate(g(base), coeffs.iter().map(|s| g(s)).collect())
    }

    fn uni(coeffs: &[&str]) -> Jet {
        uni_at("0", coeffs)
    }

    fn bivariate(order: usize, terms: &[(u32, u32, &str)]) -> Jet {
        Jet::new(
            2,
            order,
            Point::origin(2),
            terms
                .iter()
                .map(|&(i, j, c)| (MultiIndex::new(vec![i, j]), g(c))),
        )
        .unwrap()
    }

    #[test]
    fn schwarz_examples() {
        assert_eq!(schwarz(&uni(&["0", "i"])), uni(&["0", "-i"]));
        let real = uni(&["1", "1/2", "3"]);
        assert_eq!(schwarz(&real), real);
        let f = uni_at("i", &["1+i", "i"]);
        assert_eq!(schwarz(&f), uni_at("-i", &["1-i", "-i"]));
        assert_eq!(schwarz(&schwarz(&f)), f);
    }

    #[test]
    fn compose_examples() {
        // y^2 at 1 after 1 + z.
        let f = uni_at("1", &["1", "2", "1"]);
        let inner = uni(&["1", "1", "0"]);
        assert_eq!(compose(&f, &[inner]).unwrap(), uni(&["1", "2", "1"]));

        let e = Jet::exp_at_origin(3);
        let two_z = uni(&["0", "2", "0", "0"]);
        assert_eq!(compose(&e, &[two_z]).unwrap(), uni(&["1", "2", "2", "4/3"]));

        let id = uni(&["0", "1", "0", "0"]);
        assert_eq!(compose(&e, &[id]).unwrap(), e);
    }

    #[test]
    fn compose_rejects_mismatched_base() {
        let e = Jet::exp_at_origin(3);
        let shifted = uni(&["1", "1"]);
        assert!(matches!(
            compose(&e, &[shifted]),
            Err(GermError::BaseMismatch { .. })
        ));
        assert!(matches!(
            compose(&e, &[]),
            Err(GermError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn implicit_examples() {
        let f = bivariate(3, &[(0, 1, "1"), (1, 0, "-1")]);
        assert_eq!(implicit_fn(&f, 3).unwrap(), uni(&["0", "1", "0", "0"]));

        let f = bivariate(3, &[(0, 1, "1"), (1, 0, "-1"), (2, 0, "-1")]);
        assert_eq!(implicit_fn(&f, 3).unwrap(), uni(&["0", "1", "1", "0"]));

        // y + y^2 = x: φ = x - x^2 + 2x^3, checked by back-substitution below.
        let f = bivariate(4, &[(0, 1, "1"), (0, 2, "1"), (1, 0, "-1")]);
        let phi = implicit_fn(&f, 3).unwrap();
        assert_eq!(phi, uni(&["0", "1", "-1", "2"]));
        let x = Jet::coordinate(3, Point::origin(1), 0);
        assert!(compose(&f, &[x, phi]).unwrap().is_zero());
    }

    #[test]
    fn implicit_domain_errors() {
        let f = bivariate(2, &[(0, 0, "1"), (0, 1, "1")]);
        assert!(matches!(
            implicit_fn(&f, 2),
            Err(GermError::ImplicitValueNonzero(_))
        ));
        let f = bivariate(2, &[(1, 0, "1"), (0, 2, "1")]);
        assert!(matches!(
            implicit_fn(&f, 2),
            Err(GermError::ImplicitDegenerate)
        ));
        let f = bivariate(2, &[(0, 1, "1")]);
        assert!(matches!(
            implicit_fn(&f, 3),
            Err(GermError::InsufficientOrder { .. })
        ));
    }

    #[test]
    fn implicit_away_from_origin() {
        // f(x, y) = y^2 - x at (1, 1): φ = sqrt(x) = 1 + u/2 - u^2/8 + u^3/16, u = x - 1.
        let poly = Polynomial::var(2, 1).pow(2).sub(&Polynomial::var(2, 0));
        let f = Jet::from_polynomial(&poly, Point(vec![g("1"), g("1")]), 3).unwrap();
        assert_eq!(
            implicit_fn(&f, 3).unwrap(),
            uni_at("1", &["1", "1/2", "-1/8", "1/16"])
        );
    }

    #[test]
    fn monomial_division_examples() {
        let e = Jet::exp_at_origin(5);
        let em1 = e
            .sub(&Jet::constant(
                1,
                5,
                Point::origin(1),
                GaussianRational::one(),
            ))
            .unwrap();
        assert_eq!(
            monomial_div(&em1).unwrap(),
            uni(&["1", "1/2", "1/6", "1/24", "1/120"])
        );
        assert_eq!(
            monomial_div(&uni(&["0", "0", "1"])).unwrap(),
            uni(&["0", "1"])
        );
        assert!(matches!(
            monomial_div(&uni(&["1", "1"])),
            Err(GermError::DivisionNotDefined(_))
        ));
    }

    #[test]
    fn monomial_division_in_two_variables() {
        // z1 z2 + z2^2 divided by z2.
        let f = bivariate(3, &[(1, 1, "1"), (0, 2, "1")]);
        assert_eq!(
            monomial_div(&f).unwrap(),
            bivariate(2, &[(1, 0, "1"), (0, 1, "1")])
        );
        let f = bivariate(3, &[(1, 1, "1"), (2, 0, "1")]);
        assert!(matches!(
            monomial_div(&f),
            Err(GermError::DivisionNotDefined(_))
        ));
    }

    #[test]
    fn deramification_examples() {
        let f = uni(&["0", "0", "1", "0", "1"]);
        assert_eq!(deramify(&f, 2).unwrap(), uni(&["0", "1", "1"]));
        assert!(matches!(
            deramify(&uni(&["0", "1"]), 2),
            Err(GermError::NotDeramifiable { .. })
        ));
        let any = uni_at("i", &["1", "2", "3"]);
        assert_eq!(deramify(&any, 1).unwrap(), any);
        assert!(matches!(
            deramify(&any, 0),
            Err(GermError::ZeroRamification)
        ));
    }

    #[test]
    fn deramified_geometric_series() {
        // 1/(1+z²) → 1/(1+z)
        let f = uni(&["1", "0", "-1", "0", "1", "0", "-1", "0", "1"]);
        assert_eq!(deramify(&f, 2).unwrap(), uni(&["1", "-1", "1", "-1", "1"]));
    }

    #[test]
    fn deramification_order_contract() {
        // Order 5 input with m = 2: the output certifies order 2.
        let f = uni(&["1", "0", "3", "0", "5", "0"]);
        let d = deramify(&f, 2).unwrap();
        assert_eq!(d.order(), 2);
        assert_eq!(d, uni(&["1", "3", "5"]));
        // Mixed variables keep α' untouched.
        let f = bivariate(4, &[(1, 2, "1"), (2, 0, "7")]);
        assert_eq!(
            deramify(&f, 2).unwrap(),
            bivariate(2, &[(1, 1, "1"), (2, 0, "7")])
        );
    }

    #[test]
    fn ramify_then_deramify() {
        let f = uni_at("1/2", &["1", "-1", "1/3", "i"]);
        let g6 = ramify(&f, 2).unwrap();
        assert_eq!(deramify(&g6, 2).unwrap(), f.truncate(1).unwrap());
        let f6 = uni_at("1/2", &["1", "-1", "1/3", "i", "0", "0", "2"]);
        assert_eq!(
            deramify(&ramify(&f6, 3).unwrap(), 3).unwrap(),
            f6.truncate(2).unwrap()
        );
    }

    #[test]
    fn polynomial_embedding() {
        let one = Polynomial::constant(2, g("1"));
        let j = embed_polynomial(&one, Point(vec![g("3"), g("i")]), 4).unwrap();
        assert_eq!(j.coeffs().len(), 1);
        assert_eq!(j.value(), g("1"));
        let p = Polynomial::var(1, 0).scale(&g("1+i"));
        let j = embed_polynomial(&p, Point::origin(1), 3).unwrap();
        assert_eq!(j, uni(&["0", "1+i", "0", "0"]));
    }
}
