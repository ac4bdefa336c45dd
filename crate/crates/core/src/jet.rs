//! Truncated Taylor expansions of germs.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{GermError, Result};
use crate::gaussian::{factorial, GaussianRational};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;

/// A point of `Q(i)^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<GaussianRational>);

impl Point {
    pub fn origin(dim: usize) -> Self {
        Self(vec![GaussianRational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[GaussianRational] {
        &self.0
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(GaussianRational::conj).collect())
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<GaussianRational>> for Point {
    fn from(v: Vec<GaussianRational>) -> Self {
        Self(v)
    }
}

/// The jet of order `order` of a germ at `base`: `Σ_{|α| <= order} c_α (z - base)^α`
/// with `c_α = ∂_α f(base) / α!`.
///
/// Zero coefficients are never stored, so two jets are equal exactly when they have the
/// same dimension, order, base and coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Jet {
    dim: usize,
    order: usize,
    base: Point,
    coeffs: BTreeMap<MultiIndex, GaussianRational>,
}

impl Jet {
    /// Builds a jet, rejecting multi-indices of the wrong length and dropping those above
    /// `order`.
    pub fn new<I>(dim: usize, order: usize, base: Point, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, GaussianRational)>,
    {
        if dim == 0 {
            return Err(GermError::Malformed(
                "jets need at least one variable".into(),
            ));
        }
        if base.dim() != dim {
            return Err(GermError::DimensionMismatch {
                expected: dim,
                found: base.dim(),
            });
        }
        let mut map = BTreeMap::new();
        for (alpha, c) in coeffs {
            if alpha.dim() != dim {
                return Err(GermError::DimensionMismatch {
                    expected: dim,
                    found: alpha.dim(),
                });
            }
            if alpha.degree() > order || c.is_zero() {
                continue;
            }
            let slot = map.entry(alpha).or_insert_with(GaussianRational::zero);
            *slot += &c;
        }
        map.retain(|_, c: &mut GaussianRational| !c.is_zero());
        Ok(Self {
            dim,
            order,
            base,
            coeffs: map,
        })
    }

    fn from_map(
        dim: usize,
        order: usize,
        base: Point,
        mut coeffs: BTreeMap<MultiIndex, GaussianRational>,
    ) -> Self {
        coeffs.retain(|a, c| a.degree() <= order && !c.is_zero());
        Self {
            dim,
            order,
            base,
            coeffs,
        }
    }

    pub fn zero(dim: usize, order: usize, base: Point) -> Self {
        assert_eq!(base.dim(), dim);
        Self {
            dim,
            order,
            base,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, order: usize, base: Point, c: GaussianRational) -> Self {
        Self::from_map(
            dim,
            order,
            base,
            BTreeMap::from([(MultiIndex::zeros(dim), c)]),
        )
    }

    /// The coordinate germ `z_axis` at `base`: value `base[axis]` plus `(z_axis - base[axis])`.
    pub fn coordinate(order: usize, base: Point, axis: usize) -> Self {
        let dim = base.dim();
        let value = base.0[axis].clone();
        let mut map = BTreeMap::from([(MultiIndex::zeros(dim), value)]);
        map.insert(MultiIndex::unit(dim, axis), GaussianRational::one());
        Self::from_map(dim, order, base, map)
    }

    /// Univariate jet `Σ coeffs[n] (z - base)^n` with order `coeffs.len() - 1`.
    pub fn univariate(base: GaussianRational, coeffs: Vec<GaussianRational>) -> Self {
        let order = coeffs.len().saturating_sub(1);
        let map = coeffs
            .into_iter()
            .enumerate()
            .map(|(n, c)| (MultiIndex::new(vec![n as u32]), c))
            .collect();
        Self::from_map(1, order, Point(vec![base]), map)
    }

    /// Jet of `e^z` at 0: `c_n = 1/n!`.
    pub fn exp_at_origin(order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|n| GaussianRational::real(BigRational::new(BigInt::one(), factorial(n as u32))))
            .collect();
        Self::univariate(GaussianRational::zero(), coeffs)
    }

    /// Re-expansion of a polynomial at `base`, truncated to `order`. Exact.
    pub fn from_polynomial(poly: &Polynomial, base: Point, order: usize) -> Result<Self> {
        if poly.nvars() != base.dim() {
            return Err(GermError::DimensionMismatch {
                expected: base.dim(),
                found: poly.nvars(),
            });
        }
        let coeffs = poly.recenter(base.coords(), order)?;
        Ok(Self::from_map(base.dim(), order, base, coeffs))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, GaussianRational> {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> GaussianRational {
        self.coeffs
            .get(alpha)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Univariate shorthand for the coefficient of `(z - a)^n`.
    pub fn coeff1(&self, n: u32) -> GaussianRational {
        self.coeff(&MultiIndex::new(vec![n]))
    }

    /// The value `f(base)`.
    pub fn value(&self) -> GaussianRational {
        self.coeff(&MultiIndex::zeros(self.dim))
    }

    /// `∂_α f(base) = α! · c_α`.
    pub fn derivative_at_base(&self, alpha: &MultiIndex) -> GaussianRational {
        self.coeff(alpha)
            .scale(&BigRational::from_integer(alpha.factorial()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order {
            return Err(GermError::InsufficientOrder {
                have: self.order,
                need: order,
            });
        }
        Ok(Self::from_map(
            self.dim,
            order,
            self.base.clone(),
            self.coeffs.clone(),
        ))
    }

    /// The polynomial `Σ c_α u^α` in the shifted variables `u = z - base`.
    pub fn shifted_polynomial(&self) -> Polynomial {
        Polynomial::from_terms(
            self.dim,
            self.coeffs.iter().map(|(a, c)| (a.clone(), c.clone())),
        )
        .expect("jet multi-indices match dim")
    }

    /// Same coefficients, relabelled at a new base point.
    pub fn rebase(&self, base: Point) -> Result<Self> {
        self.check_dim(base.dim())?;
        Ok(Self {
            base,
            ..self.clone()
        })
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(GermError::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        self.check_dim(other.dim)?;
        if self.base != other.base {
            return Err(GermError::BaseMismatch {
                left: self.base.to_string(),
                right: other.base.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut map = self.coeffs.clone();
        for (a, c) in &other.coeffs {
            *map.entry(a.clone()).or_insert_with(GaussianRational::zero) += c;
        }
        Ok(Self::from_map(self.dim, order, self.base.clone(), map))
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, k: &GaussianRational) -> Jet {
        self.map_coeffs(|c| c * k)
    }

    fn map_coeffs(&self, f: impl Fn(&GaussianRational) -> GaussianRational) -> Jet {
        let map = self.coeffs.iter().map(|(a, c)| (a.clone(), f(c))).collect();
        Self::from_map(self.dim, self.order, self.base.clone(), map)
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.mul_truncated(other, self.order.min(other.order)))
    }

    /// Cauchy product truncated at `order`; the caller guarantees compatibility.
    pub(crate) fn mul_truncated(&self, other: &Jet, order: usize) -> Jet {
        let mut map: BTreeMap<MultiIndex, GaussianRational> = BTreeMap::new();
        for (a, c) in &self.coeffs {
            let da = a.degree();
            if da > order {
                break;
            }
            let budget = order - da;
            for (b, d) in &other.coeffs {
                if b.degree() > budget {
                    break;
                }
                let slot = map.entry(a.add(b)).or_insert_with(GaussianRational::zero);
                *slot += &(c * d);
            }
        }
        Self::from_map(self.dim, order, self.base.clone(), map)
    }

    /// `∂f/∂z_axis` (0-based axis). The result has order `order - 1`.
    pub fn partial_derivative(&self, axis: usize) -> Result<Jet> {
        if axis >= self.dim {
            return Err(GermError::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        if self.order == 0 {
            return Err(GermError::InsufficientOrder { have: 0, need: 1 });
        }
        let mut map = BTreeMap::new();
        for (a, c) in &self.coeffs {
            let e = a.get(axis);
            if e == 0 {
                continue;
            }
            map.insert(a.with(axis, e - 1), c * &GaussianRational::from(e as i64));
        }
        Ok(Self::from_map(
            self.dim,
            self.order - 1,
            self.base.clone(),
            map,
        ))
    }

    /// Whether the two jets agree on every coefficient with `|α| <= order`.
    pub fn equal_to_order(&self, other: &Jet, order: usize) -> Result<bool> {
        self.check_compatible(other)?;
        let need = order;
        if need > self.order || need > other.order {
            return Err(GermError::InsufficientOrder {
                have: self.order.min(other.order),
                need,
            });
        }
        let low = |j: &Jet| -> Vec<(MultiIndex, GaussianRational)> {
            j.coeffs
                .iter()
                .take_while(|(a, _)| a.degree() <= order)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect()
        };
        Ok(low(self) == low(other))
    }

    /// Lowest total degree at which the two jets differ, if any, up to the smaller order.
    pub fn first_difference(&self, other: &Jet) -> Result<Option<usize>> {
        let diff = self.sub(other)?;
        Ok(diff.coeffs.keys().next().map(MultiIndex::degree))
    }

    /// Evaluates the truncated polynomial `Σ c_α (p - base)^α` exactly.
    pub fn evaluate_truncated(&self, p: &Point) -> Result<GaussianRational> {
        self.check_dim(p.dim())?;
        let shifted: Vec<GaussianRational> =
            p.0.iter().zip(&self.base.0).map(|(x, a)| x - a).collect();
        Ok(self.coeffs.iter().map(|(a, c)| c * &a.eval(&shifted)).sum())
    }

    /// Coefficientwise conjugation at the conjugate base.
    pub fn conjugate(&self) -> Jet {
        let map = self
            .coeffs
            .iter()
            .map(|(a, c)| (a.clone(), c.conj()))
            .collect();
        Self::from_map(self.dim, self.order, self.base.conj(), map)
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet(dim={}, order={}, base={}, {{",
            self.dim, self.order, self.base
        )?;
        for (i, (a, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}: {c}")?;
        }
        write!(f, "}})")
    }
}

/// Jets of one function at pairwise distinct base points, all truncated to a common order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetTuple {
    order: usize,
    jets: Vec<Jet>,
}

impl JetTuple {
    pub fn new(jets: &[Jet], order: usize) -> Result<Self> {
        let Some(first) = jets.first() else {
            return Err(GermError::Malformed("empty jet tuple".into()));
        };
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(jets.len());
        for jet in jets {
            jet.check_dim(first.dim)?;
            if !seen.insert(jet.base.clone()) {
                return Err(GermError::DuplicateBasePoint(jet.base.to_string()));
            }
            out.push(jet.truncate(order)?);
        }
        Ok(Self { order, jets: out })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn jets(&self) -> &[Jet] {
        &self.jets
    }

    /// `(∂_α f(a_i))_{|α| <= k}` for each point, in the graded multi-index order.
    pub fn derivative_entries(&self) -> Vec<Vec<(MultiIndex, GaussianRational)>> {
        self.jets
            .iter()
            .map(|j| {
                MultiIndex::up_to(j.dim, self.order)
                    .into_iter()
                    .map(|a| {
                        let d = j.derivative_at_base(&a);
                        (a, d)
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn uni(coeffs: &[&str]) -> Jet {
        Jet::univariate(
            GaussianRational::zero(),
            coeffs.iter().map(|s| g(s)).collect(),
        )
    }

    fn z_pow(dim: usize, e: Vec<u32>) -> Polynomial {
        assert_eq!(e.len(), dim);
        Polynomial::monomial(MultiIndex::new(e), GaussianRational::one())
    }

    #[test]
    fn from_polynomial_recenters() {
        let z2 = z_pow(1, vec![2]);
        let at0 = Jet::from_polynomial(&z2, Point::origin(1), 4).unwrap();
        assert_eq!(at0.coeffs().len(), 1);
        assert_eq!(at0.coeff1(2), g("1"));

        let at1 = Jet::from_polynomial(&z2, Point(vec![g("1")]), 2).unwrap();
        assert_eq!(at1, Jet::univariate(g("1"), vec![g("1"), g("2"), g("1")]));

        let z1z2 = z_pow(2, vec![1, 1]);
        let j = Jet::from_polynomial(&z1z2, Point(vec![g("1"), g("1")]), 1).unwrap();
        // z1 z2 = 1 + (z1-1) + (z2-1) + (z1-1)(z2-1); the last term is dropped at order 1.
        assert_eq!(j.coeff(&MultiIndex::new(vec![0, 0])), g("1"));
        assert_eq!(j.coeff(&MultiIndex::new(vec![1, 0])), g("1"));
        assert_eq!(j.coeff(&MultiIndex::new(vec![0, 1])), g("1"));
        assert_eq!(j.coeffs().len(), 3);

        assert!(Jet::from_polynomial(&z1z2, Point::origin(1), 2).is_err());
    }

    #[test]
    fn addition() {
        let f = uni(&["1", "2", "3"]);
        assert_eq!(f.add(&Jet::zero(1, 2, Point::origin(1))).unwrap(), f);
        assert_eq!(
            uni(&["1", "1"]).add(&uni(&["1", "-1"])).unwrap(),
            uni(&["2", "0"])
        );
        let e = Jet::exp_at_origin(3);
        assert_eq!(e.add(&e).unwrap(), uni(&["2", "2", "1", "1/3"]));
        let other_base = Jet::univariate(g("1"), vec![g("1")]);
        assert!(matches!(
            f.add(&other_base),
            Err(GermError::BaseMismatch { .. })
        ));
    }

    #[test]
    fn multiplication() {
        let f = uni(&["1", "2", "3"]);
        assert_eq!(f.mul(&uni(&["1", "0", "0"])).unwrap(), f);
        assert_eq!(
            uni(&["0", "1", "0"]).mul(&uni(&["0", "1", "0"])).unwrap(),
            uni(&["0", "0", "1"])
        );
        let p = uni(&["1", "1", "1/2"])
            .mul(&uni(&["1", "-1", "0"]))
            .unwrap();
        assert_eq!(p, uni(&["1", "0", "-1/2"]));
        // Output order is the smaller one.
        assert_eq!(
            uni(&["1", "1", "1"])
                .mul(&uni(&["1", "1"]))
                .unwrap()
                .order(),
            1
        );
    }

    #[test]
    fn derivatives() {
        assert_eq!(
            Jet::exp_at_origin(4).partial_derivative(0).unwrap(),
            Jet::exp_at_origin(3)
        );
        let z1z2 = Jet::from_polynomial(&z_pow(2, vec![1, 1]), Point::origin(2), 3).unwrap();
        let d = z1z2.partial_derivative(0).unwrap();
        assert_eq!(d, Jet::coordinate(2, Point::origin(2), 1));
        assert!(matches!(
            uni(&["1"]).partial_derivative(0),
            Err(GermError::InsufficientOrder { .. })
        ));
        assert!(matches!(
            z1z2.partial_derivative(2),
            Err(GermError::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn derivative_of_shifted_exponential_series() {
        // Σ z^n/(n+1)! up to order 4; oracle: coefficient shift c'_n = (n+1) c_{n+1}.
        let c: Vec<GaussianRational> = (0..=4u32)
            .map(|n| GaussianRational::real(BigRational::new(BigInt::one(), factorial(n + 1))))
            .collect();
        let f = Jet::univariate(GaussianRational::zero(), c.clone());
        let expected: Vec<GaussianRational> = (0..4usize)
            .map(|n| &c[n + 1] * &GaussianRational::from((n + 1) as i64))
            .collect();
        assert_eq!(
            f.partial_derivative(0).unwrap(),
            Jet::univariate(GaussianRational::zero(), expected)
        );
        assert_eq!(f.partial_derivative(0).unwrap().coeff1(1), g("1/3"));
    }

    #[test]
    fn order_comparison() {
        let e = Jet::exp_at_origin(4);
        let c: Vec<GaussianRational> = (0..=4u32)
            .map(|n| GaussianRational::real(BigRational::new(BigInt::one(), factorial(n + 1))))
            .collect();
        let q = Jet::univariate(GaussianRational::zero(), c);
        assert!(e.equal_to_order(&e, 4).unwrap());
        assert!(e.equal_to_order(&q, 0).unwrap());
        assert!(!e.equal_to_order(&q, 1).unwrap());
        assert!(e.equal_to_order(&q, 5).is_err());
    }

    #[test]
    fn truncated_evaluation() {
        let f = uni(&["1", "1"]);
        assert_eq!(f.evaluate_truncated(&Point(vec![g("0")])).unwrap(), g("1"));
        assert_eq!(
            f.evaluate_truncated(&Point(vec![g("i")])).unwrap(),
            g("1+i")
        );
        assert_eq!(
            Jet::exp_at_origin(4)
                .evaluate_truncated(&Point(vec![g("1")]))
                .unwrap(),
            g("65/24")
        );
    }

    #[test]
    fn jet_tuples() {
        let a = Jet::exp_at_origin(3);
        let t = JetTuple::new(std::slice::from_ref(&a), 0).unwrap();
        assert_eq!(
            t.derivative_entries(),
            vec![vec![(MultiIndex::zeros(1), g("1"))]]
        );

        let b = Jet::univariate(g("1"), vec![g("2"), g("3")]);
        let t = JetTuple::new(&[a.clone(), b], 1).unwrap();
        let count: usize = t.derivative_entries().iter().map(Vec::len).sum();
        assert_eq!(count, 2 * (1 + 1));

        assert!(matches!(
            JetTuple::new(&[a.clone(), a.clone()], 1),
            Err(GermError::DuplicateBasePoint(_))
        ));
        assert!(matches!(
            JetTuple::new(&[a], 7),
            Err(GermError::InsufficientOrder { .. })
        ));
    }

    #[test]
    fn derivative_entries_carry_factorials() {
        let t = JetTuple::new(&[Jet::exp_at_origin(5)], 5).unwrap();
        assert!(t.derivative_entries()[0].iter().all(|(_, d)| *d == g("1")));
    }
}
