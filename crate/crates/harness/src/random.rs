use germcalc_core::calculus::TailSource;
use germcalc_core::{GaussianRational, Jet, MultiIndex, Point};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const HEURISTIC_NOTICE: &str =
    "note: random jets are generic by heuristic only and are NOT certified strongly transcendental";

fn rational(rng: &mut impl Rng, bound: i64) -> BigRational {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A Gaussian rational whose real and imaginary parts have numerators in `[-bound, bound]`
/// and denominators in `[1, bound]`.
pub fn random_gaussian(rng: &mut impl Rng, bound: u32) -> GaussianRational {
    let b = i64::from(bound.max(1));
    let re = rational(rng, b);
    let im = rational(rng, b);
    GaussianRational::new(re, im)
}

/// A jet at `base` with every coefficient up to `order` drawn by [`random_gaussian`].
pub fn random_jet_at(rng: &mut impl Rng, base: Point, order: usize, bound: u32) -> Jet {
    let dim = base.dim();
    let coeffs: Vec<(MultiIndex, GaussianRational)> = MultiIndex::up_to(dim, order)
        .into_iter()
        .map(|a| (a, random_gaussian(rng, bound)))
        .collect();
    Jet::new(dim, order, base, coeffs).expect("indices fit the order")
}

/// Deterministic pseudo-random jet at the origin.
///
/// The jets stand in for generic germs. Nothing about them is certified: a seeded rational
/// jet says nothing about transcendence of any germ extending it.
///
/// # Panics
///
/// If `coeff_bound` is zero.
pub fn generate_random_jet(dim: usize, order: usize, seed: u64, coeff_bound: u32) -> Jet {
    assert!(coeff_bound >= 1, "coefficient bound must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_jet_at(&mut rng, Point::origin(dim), order, coeff_bound)
}

/// Tail coefficients for stability trials, drawn from one seeded stream in call order.
pub struct SeededTails {
    rng: ChaCha8Rng,
    bound: u32,
}

impl SeededTails {
    pub fn new(seed: u64, bound: u32) -> Self {
        SeededTails {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound,
        }
    }
}

impl TailSource for SeededTails {
    fn coefficient(&mut self, _: usize, _: &str, _: &Point, _: &MultiIndex) -> GaussianRational {
        random_gaussian(&mut self.rng, self.bound)
    }
}
