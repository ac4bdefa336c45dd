use num_traits::One;

use crate::error::Result;
use crate::gaussian::GaussianRational;
use crate::jet::{Jet, Point};
use crate::multi_index::MultiIndex;

use super::eval::{apply_expr, Env};
use super::expr::OperatorExpr;
use super::shift::{required_orders, shift_bound};

/// Extends or cuts `jet` to exactly `order`, padding with zero coefficients.
fn resize(jet: &Jet, order: usize) -> Jet {
    let coeffs = jet.coeffs().iter().map(|(a, c)| (a.clone(), c.clone()));
    Jet::new(jet.dim(), order, jet.base().clone(), coeffs).expect("same shape")
}

/// Evaluates, treating an operator leaving its domain as "no output".
fn try_apply(e: &OperatorExpr, env: &Env, n: usize) -> Result<Option<Jet>> {
    match apply_expr(e, env, n) {
        Ok(j) => Ok(Some(j)),
        Err(err) if err.is_domain_violation() => Ok(None),
        Err(err) => Err(err),
    }
}

/// Whether adding `(z - a)^α` with `|α| = ell` to a single input germ changes the output jet
/// of order `n`. A `true` answer certifies that the shift of `e` at `n` is at least `ell`.
///
/// Every input and every monomial of degree `ell` is tried. Inputs are padded with zero
/// coefficients where the environment stops short of the order needed.
pub fn measure_shift_lower_bound(
    e: &OperatorExpr,
    env: &Env,
    n: usize,
    ell: usize,
) -> Result<bool> {
    let req = required_orders(e, n);
    let mut padded = Env::new();
    for ((name, base), &need) in &req {
        let jet = env
            .get(name, base)
            .ok_or_else(|| crate::error::GermError::UnboundGerm {
                name: name.clone(),
                base: base.to_string(),
            })?;
        padded.bind(name.clone(), resize(jet, need.max(jet.order())));
    }
    let reference = apply_expr(e, &padded, n)?;
    for ((name, base), &need) in &req {
        if ell > need {
            // the evaluation provably ignores coefficients above the required order
            continue;
        }
        let jet = padded.get(name, base).expect("bound above").clone();
        for alpha in MultiIndex::of_degree(base.dim(), ell) {
            let bump = Jet::new(
                jet.dim(),
                jet.order(),
                base.clone(),
                [(alpha, GaussianRational::one())],
            )?;
            let mut env2 = padded.clone();
            env2.bind(name.clone(), jet.add(&bump)?);
            if let Some(out) = try_apply(e, &env2, n)? {
                if out != reference {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// The largest `ell` in `0..=upper(n) + 1` for which a monomial probe changes the output
/// at order `n`, or `0` when none does.
pub fn certified_lower_bound(e: &OperatorExpr, env: &Env, n: usize) -> Result<usize> {
    let upper = shift_bound(e).eval(n);
    for ell in (0..=upper + 1).rev() {
        if measure_shift_lower_bound(e, env, n, ell)? {
            return Ok(ell);
        }
    }
    Ok(0)
}

/// Supplies tail coefficients for vanishing-stability trials.
pub trait TailSource {
    /// Coefficient of `(z - base)^α` for the input germ `name` in the given trial.
    fn coefficient(
        &mut self,
        trial: usize,
        name: &str,
        base: &Point,
        alpha: &MultiIndex,
    ) -> GaussianRational;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StabilityConfig {
    /// Inputs keep their jets to this order; only higher coefficients are re-drawn.
    pub keep_order: usize,
    /// Order of the output jet that must stay zero.
    pub tested_order: usize,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub keep_order: usize,
    pub tested_order: usize,
    /// Whether the expression vanishes on the unperturbed inputs.
    pub base_vanishes: bool,
    pub trials: usize,
    pub stable_trials: usize,
    /// Trials whose output did not vanish, with the lowest degree of a nonzero coefficient.
    pub failures: Vec<(usize, usize)>,
    /// Trials in which a perturbed input left an operator's domain.
    pub outside_domain: Vec<usize>,
}

impl StabilityReport {
    /// The expression vanishes on the inputs and on every perturbation that could be
    /// evaluated.
    pub fn is_stable(&self) -> bool {
        self.base_vanishes && self.failures.is_empty()
    }
}

/// Re-draws the coefficients of degree above `keep_order` of every input germ and checks
/// whether the output still vanishes to `tested_order`.
///
/// An identity `L = 0` that holds on a whole Krull neighbourhood survives every trial once
/// `keep_order` is large enough; a coincidence on the given inputs does not.
pub fn vanishing_stability_test(
    e: &OperatorExpr,
    env: &Env,
    config: StabilityConfig,
    tails: &mut dyn TailSource,
) -> Result<StabilityReport> {
    let n = config.tested_order;
    let base_vanishes = apply_expr(e, env, n)?.is_zero();
    let req = required_orders(e, n);
    let mut report = StabilityReport {
        keep_order: config.keep_order,
        tested_order: n,
        base_vanishes,
        trials: config.trials,
        stable_trials: 0,
        failures: Vec::new(),
        outside_domain: Vec::new(),
    };
    for trial in 0..config.trials {
        let mut perturbed = Env::new();
        for ((name, base), &need) in &req {
            let jet = env.get(name, base).expect("bound, checked by apply_expr");
            let keep = config.keep_order.min(jet.order());
            let order = need.max(keep);
            let mut coeffs: Vec<(MultiIndex, GaussianRational)> = jet
                .coeffs()
                .iter()
                .filter(|(a, _)| a.degree() <= keep)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect();
            for d in keep + 1..=order {
                for alpha in MultiIndex::of_degree(base.dim(), d) {
                    let c = tails.coefficient(trial, name, base, &alpha);
                    coeffs.push((alpha, c));
                }
            }
            perturbed.bind(
                name.clone(),
                Jet::new(base.dim(), order, base.clone(), coeffs)?,
            );
        }
        match try_apply(e, &perturbed, n)? {
            None => report.outside_domain.push(trial),
            Some(out) => match out.coeffs().keys().next() {
                None => report.stable_trials += 1,
                Some(alpha) => report.failures.push((trial, alpha.degree())),
            },
        }
    }
    Ok(report)
}
