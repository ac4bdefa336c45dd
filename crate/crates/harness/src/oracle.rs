//! Composition by brute-force substitution, kept independent of the library's Horner scheme.

use std::collections::BTreeMap;

use germcalc_core::{GaussianRational, Jet, MultiIndex};
use num_traits::{One, Zero};

type Series = BTreeMap<Vec<u32>, GaussianRational>;

fn product(a: &Series, b: &Series, order: usize) -> Series {
    let mut out = Series::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().sum::<u32>() as usize > order {
                continue;
            }
            let slot = out.entry(e).or_insert_with(GaussianRational::zero);
            *slot += &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `f ∘ (g_1, …, g_k)` obtained by expanding every monomial `(w - a)^α` of `f` with
/// `w - a = g - g(b)` and multiplying out, truncated to the smaller order. Returns `None`
/// when the values of the inner jets are not the base of `f`.
pub fn naive_compose(f: &Jet, inner: &[Jet]) -> Option<Jet> {
    if inner.len() != f.dim() || inner.is_empty() {
        return None;
    }
    let base = inner[0].base().clone();
    let dim = base.dim();
    if inner.iter().any(|g| g.base() != &base) {
        return None;
    }
    if inner
        .iter()
        .zip(f.base().coords())
        .any(|(g, a)| &g.value() != a)
    {
        return None;
    }
    let order = inner.iter().map(Jet::order).fold(f.order(), usize::min);
    let shifted: Vec<Series> = inner
        .iter()
        .map(|g| {
            g.coeffs()
                .iter()
                .filter(|(a, _)| !a.is_zero() && a.degree() <= order)
                .map(|(a, c)| (a.entries().to_vec(), c.clone()))
                .collect()
        })
        .collect();
    let unit: Series = [(vec![0; dim], GaussianRational::one())]
        .into_iter()
        .collect();
    let mut total = Series::new();
    for (alpha, c) in f.coeffs() {
        if alpha.degree() > order {
            continue;
        }
        let mut term = unit.clone();
        for (i, &e) in alpha.entries().iter().enumerate() {
            for _ in 0..e {
                term = product(&term, &shifted[i], order);
            }
        }
        for (e, v) in term {
            let slot = total.entry(e).or_insert_with(GaussianRational::zero);
            *slot += &(c * &v);
        }
    }
    let coeffs: Vec<(MultiIndex, GaussianRational)> = total
        .into_iter()
        .map(|(e, v)| (MultiIndex::new(e), v))
        .collect();
    Jet::new(dim, order, base, coeffs).ok()
}
