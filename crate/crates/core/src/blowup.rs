//! The blow-up of `0 ∈ C^2` in local charts.
//!
//! For a finite label `λ` the chart map is `π_λ(z1, z2) = (z1, (λ + z2) z1)`; the chart at
//! infinity is `π_∞(z1, z2) = (z1 z2, z2)`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{GermError, ParseError, Result};
use crate::gaussian::GaussianRational;
use crate::jet::{Jet, Point};
use crate::multi_index::MultiIndex;
use crate::operators::compose_with_polynomials;
use crate::poly::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    Finite(GaussianRational),
    Infinity,
}

impl Chart {
    pub fn zero() -> Self {
        Chart::Finite(GaussianRational::zero())
    }

    /// The two coordinate polynomials of `π_λ`.
    pub fn map(&self) -> [Polynomial; 2] {
        let z1 = Polynomial::var(2, 0);
        let z2 = Polynomial::var(2, 1);
        match self {
            Chart::Finite(l) => {
                let second = Polynomial::constant(2, l.clone()).add(&z2).mul(&z1);
                [z1, second]
            }
            Chart::Infinity => [z1.mul(&z2), z2],
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::Finite(l) => write!(f, "{l}"),
            Chart::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Chart {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.trim() {
            "inf" | "∞" => Ok(Chart::Infinity),
            other => other.parse().map(Chart::Finite),
        }
    }
}

fn check_origin(f: &Jet) -> Result<()> {
    if f.dim() != 2 {
        return Err(GermError::DimensionMismatch {
            expected: 2,
            found: f.dim(),
        });
    }
    if !f.base().is_origin() {
        return Err(GermError::NonZeroBase(f.base().to_string()));
    }
    Ok(())
}

/// The jet of `f ∘ π_λ` at the origin of the chart, to order `k_out`.
pub fn blow_up_jet(f: &Jet, chart: &Chart, k_out: usize) -> Result<Jet> {
    check_origin(f)?;
    let f = f.truncate(k_out)?;
    compose_with_polynomials(&f, &chart.map(), &Point::origin(2), k_out)
}

fn mi(i: u32, j: u32) -> MultiIndex {
    MultiIndex::new(vec![i, j])
}

/// Recovers `f` of order `k` from its chart-0 blow-up `g = f(z1, z1 z2)` of order `2k`.
///
/// The coefficient of `z1^i z2^j` in `f` is the coefficient of `z1^{i+j} z2^j` in `g`; a
/// nonzero coefficient of `z1^p z2^j` with `p < j` cannot come from any `f`.
pub fn blow_down_reconstruct(g: &Jet, k: usize) -> Result<Jet> {
    reconstruct_from_chart(g, &Chart::zero(), k)
}

/// Recovers `f` of order `k` from the order-`2k` jet of `f ∘ π_λ` in any chart.
///
/// A finite `λ ≠ 0` is reduced to chart 0 by the shear `z2 ↦ λ + z2`: the `z1^p` part of `g`
/// is a polynomial of degree at most `p` in `z2`, re-expanded exactly around `z2 = -λ`.
pub fn reconstruct_from_chart(g: &Jet, chart: &Chart, k: usize) -> Result<Jet> {
    check_origin(g)?;
    if g.order() < 2 * k {
        return Err(GermError::InsufficientOrder {
            have: g.order(),
            need: 2 * k,
        });
    }
    let base = Point::origin(2);
    match chart {
        Chart::Infinity => {
            if let Some((a, _)) = g.coeffs().iter().find(|(a, _)| a.get(1) < a.get(0)) {
                return Err(GermError::NotABlowDown(a.to_string()));
            }
            let coeffs = (0..=k as u32)
                .flat_map(|i| (0..=k as u32 - i).map(move |j| (mi(i, j), g.coeff(&mi(i, i + j)))));
            Jet::new(2, k, base, coeffs.collect::<Vec<_>>())
        }
        Chart::Finite(l) if l.is_zero() => {
            if let Some((a, _)) = g.coeffs().iter().find(|(a, _)| a.get(0) < a.get(1)) {
                return Err(GermError::NotABlowDown(a.to_string()));
            }
            let coeffs = (0..=k as u32)
                .flat_map(|i| (0..=k as u32 - i).map(move |j| (mi(i, j), g.coeff(&mi(i + j, j)))));
            Jet::new(2, k, base, coeffs.collect::<Vec<_>>())
        }
        Chart::Finite(l) => {
            if let Some((a, _)) = g.coeffs().iter().find(|(a, _)| a.get(0) < a.get(1)) {
                return Err(GermError::NotABlowDown(a.to_string()));
            }
            let mut coeffs = Vec::new();
            for p in 0..=k as u32 {
                let slice = Polynomial::from_terms(
                    1,
                    (0..=p).map(|j| (MultiIndex::new(vec![j]), g.coeff(&mi(p, j)))),
                )?;
                let w = Jet::from_polynomial(&slice, Point(vec![-l]), p as usize)?;
                for j in 0..=p {
                    coeffs.push((mi(p - j, j), w.coeff1(j)));
                }
            }
            Jet::new(2, k, base, coeffs)
        }
    }
}

/// Whether the blow-ups of `f` in two charts reconstruct the same jet of order `k`.
pub fn chart_transition_check(f: &Jet, l1: &Chart, l2: &Chart, k: usize) -> Result<bool> {
    let g1 = blow_up_jet(f, l1, 2 * k)?;
    let g2 = blow_up_jet(f, l2, 2 * k)?;
    charts_consistent(&g1, l1, &g2, l2, k)
}

/// Whether two chart jets come from a common `f` to order `k`. Chart data that no `f` can
/// produce counts as inconsistent.
pub fn charts_consistent(g1: &Jet, l1: &Chart, g2: &Jet, l2: &Chart, k: usize) -> Result<bool> {
    let rebuild = |g: &Jet, l: &Chart| match reconstruct_from_chart(g, l, k) {
        Ok(f) => Ok(Some(f)),
        Err(GermError::NotABlowDown(_)) => Ok(None),
        Err(e) => Err(e),
    };
    match (rebuild(g1, l1)?, rebuild(g2, l2)?) {
        (Some(a), Some(b)) => Ok(a == b),
        _ => Ok(false),
    }
}

/// Whether `g` is constant along the exceptional divisor `z1 = 0` of a finite chart.
pub fn divisor_constancy_check(g: &Jet) -> bool {
    g.coeffs().keys().all(|a| a.get(0) > 0 || a.degree() == 0)
}

/// Whether `g` is constant along the exceptional divisor of `chart`: `z1 = 0` in the finite
/// charts and `z2 = 0` in the chart at infinity, where `π_∞(z1, 0) = (0, 0)`.
pub fn divisor_constancy_in_chart(g: &Jet, chart: &Chart) -> bool {
    let axis = match chart {
        Chart::Finite(_) => 0,
        Chart::Infinity => 1,
    };
    g.coeffs()
        .keys()
        .all(|a| a.get(axis) > 0 || a.degree() == 0)
}

/// Germs near finitely many divisor points do not determine `f` away from their image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonlocalityWitness {
    /// `h = Π_j (z2 - μ_j z1)^K`.
    pub poly: Polynomial,
    /// Lowest degree of `h ∘ π_{μ_i}` at the chart origin, for every `μ_i`.
    pub chart_vanishing_orders: Vec<usize>,
    pub point: Point,
    /// `h(point)`.
    pub value: GaussianRational,
}

/// Builds `h = Π_j (z2 - μ_j z1)^K`, which vanishes to order `(m + 1) K` at the origin of
/// every chart `μ_i` (like the zero germ) and is nonzero at `(1, λ)` for `λ` not among the
/// `μ_j`.
pub fn nonlocality_witness(
    mus: &[GaussianRational],
    k: u32,
    lambda: &GaussianRational,
) -> Result<NonlocalityWitness> {
    if mus.contains(lambda) {
        return Err(GermError::Malformed(format!(
            "{lambda} is one of the chart points"
        )));
    }
    let z1 = Polynomial::var(2, 0);
    let z2 = Polynomial::var(2, 1);
    let mut h = Polynomial::constant(2, GaussianRational::one());
    for mu in mus {
        h = h.mul(&z2.sub(&z1.scale(mu)).pow(k));
    }
    let chart_vanishing_orders = mus
        .iter()
        .map(|mu| {
            let g = h.substitute(&Chart::Finite(mu.clone()).map())?;
            Ok(g.terms()
                .map(|(a, _)| a.degree())
                .min()
                .unwrap_or(usize::MAX))
        })
        .collect::<Result<_>>()?;
    let point = Point(vec![GaussianRational::one(), lambda.clone()]);
    let value = h.eval(point.coords())?;
    Ok(NonlocalityWitness {
        poly: h,
        chart_vanishing_orders,
        point,
        value,
    })
}
