//! Exact multivariate polynomials over `Q(i)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{GermError, Result};
use crate::gaussian::GaussianRational;
use crate::multi_index::{binomial, MultiIndex};

/// A polynomial in `nvars` variables with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, GaussianRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(MultiIndex::zeros(nvars), c);
        p
    }

    /// The coordinate polynomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(MultiIndex::unit(nvars, var), GaussianRational::one());
        p
    }

    pub fn monomial(alpha: MultiIndex, c: GaussianRational) -> Self {
        let mut p = Self::zero(alpha.dim());
        p.add_term(alpha, c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, GaussianRational)>,
    {
        let mut p = Self::zero(nvars);
        for (alpha, c) in terms {
            if alpha.dim() != nvars {
                return Err(GermError::DimensionMismatch {
                    expected: nvars,
                    found: alpha.dim(),
                });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> GaussianRational {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Highest exponent of `var` appearing in any term.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|a| a.get(var)).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.degree_in(var) > 0
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, k: &GaussianRational) -> Self {
        self.map_coeffs(|c| c * k)
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(GaussianRational::conj)
    }

    fn map_coeffs(&self, f: impl Fn(&GaussianRational) -> GaussianRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), f(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                out.add_term(a.add(b), c * d);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, GaussianRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            let e = a.get(var);
            if e > 0 {
                out.add_term(a.with(var, e - 1), c * &GaussianRational::from(e as i64));
            }
        }
        out
    }

    pub fn eval(&self, x: &[GaussianRational]) -> Result<GaussianRational> {
        if x.len() != self.nvars {
            return Err(GermError::DimensionMismatch {
                expected: self.nvars,
                found: x.len(),
            });
        }
        Ok(self.terms.iter().map(|(a, c)| c * &a.eval(x)).sum())
    }

    /// Substitutes `subs[j]` for variable `j`; all substitutes share one variable count.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        if subs.len() != self.nvars {
            return Err(GermError::DimensionMismatch {
                expected: self.nvars,
                found: subs.len(),
            });
        }
        let out_vars = subs.first().map(Polynomial::nvars).unwrap_or(0);
        let mut out = Self::zero(out_vars);
        let mut powers: Vec<Vec<Polynomial>> = vec![Vec::new(); self.nvars];
        for (a, c) in &self.terms {
            let mut term = Self::constant(out_vars, c.clone());
            for (j, &e) in a.entries().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[j];
                if cache.is_empty() {
                    cache.push(Self::constant(out_vars, GaussianRational::one()));
                }
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap().mul(&subs[j]);
                    cache.push(next);
                }
                term = term.mul(&cache[e as usize]);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Re-indexes variables into a space of `nvars` variables, sending variable `j` to
    /// `targets[j]`.
    pub fn remap(&self, nvars: usize, targets: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (a, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (j, &x) in a.entries().iter().enumerate() {
                e[targets[j]] += x;
            }
            out.add_term(MultiIndex::new(e), c.clone());
        }
        out
    }

    /// Coefficients of the re-expansion `P(base + u) = Σ q_γ u^γ` for `|γ| <= order`.
    pub fn recenter(
        &self,
        base: &[GaussianRational],
        order: usize,
    ) -> Result<BTreeMap<MultiIndex, GaussianRational>> {
        if base.len() != self.nvars {
            return Err(GermError::DimensionMismatch {
                expected: self.nvars,
                found: base.len(),
            });
        }
        let mut out: BTreeMap<MultiIndex, GaussianRational> = BTreeMap::new();
        for (beta, c) in &self.terms {
            // (a + u)^β = Π_i Σ_{γ_i <= β_i} C(β_i, γ_i) a_i^{β_i - γ_i} u_i^{γ_i}
            let mut partial: Vec<(Vec<u32>, GaussianRational)> = vec![(Vec::new(), c.clone())];
            for (i, &b) in beta.entries().iter().enumerate() {
                let mut next = Vec::new();
                for (gamma, w) in &partial {
                    let used: u32 = gamma.iter().sum();
                    for g in 0..=b {
                        if used as usize + g as usize > order {
                            break;
                        }
                        let factor = base[i].pow(b - g).scale(&binomial(b, g).into());
                        if factor.is_zero() {
                            continue;
                        }
                        let mut gm = gamma.clone();
                        gm.push(g);
                        next.push((gm, w * &factor));
                    }
                }
                partial = next;
            }
            for (gamma, w) in partial {
                let key = MultiIndex::new(gamma);
                let slot = out.entry(key).or_insert_with(GaussianRational::zero);
                *slot += &w;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (j, &e) in a.entries().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·x{}", j + 1)?,
                    _ => write!(f, "·x{}^{}", j + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_cancels_to_canonical_zero() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = x.add(&y).mul(&x.sub(&y));
        let q = x.mul(&x).sub(&y.mul(&y));
        assert_eq!(p, q);
        assert!(p.sub(&q).is_zero());
    }

    #[test]
    fn substitution_and_derivative() {
        let x = Polynomial::var(1, 0);
        let p = x.pow(3).add(&Polynomial::constant(1, g("2")));
        let shifted = p
            .substitute(&[x.add(&Polynomial::constant(1, g("1")))])
            .unwrap();
        assert_eq!(shifted.eval(&[g("0")]).unwrap(), g("3"));
        assert_eq!(p.derivative(0), x.pow(2).scale(&g("3")));
    }

    #[test]
    fn recenter_matches_binomial_expansion() {
        let z = Polynomial::var(1, 0);
        let q = z.pow(2).recenter(&[g("1")], 2).unwrap();
        assert_eq!(q.get(&MultiIndex::new(vec![0])), Some(&g("1")));
        assert_eq!(q.get(&MultiIndex::new(vec![1])), Some(&g("2")));
        assert_eq!(q.get(&MultiIndex::new(vec![2])), Some(&g("1")));
    }

    #[test]
    fn remap_moves_variables() {
        let p = Polynomial::var(2, 0).mul(&Polynomial::var(2, 1).pow(2));
        let r = p.remap(3, &[2, 0]);
        assert_eq!(r.coeff(&MultiIndex::new(vec![2, 0, 1])), g("1"));
    }
}
