#![allow(dead_code)]

use germcalc_core::{GaussianRational, Jet, MultiIndex, Point};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn gauss() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4)
        .prop_map(|(a, b, c, d)| GaussianRational::new(q(a, b), q(c, d)))
}

pub fn real() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| GaussianRational::real(q(a, b)))
}

/// A jet with every coefficient drawn independently, in `dim` variables at `base`.
pub fn jet_at(dim: usize, order: usize, base: Point) -> impl Strategy<Value = Jet> {
    let slots = MultiIndex::up_to(dim, order);
    proptest::collection::vec(gauss(), slots.len()).prop_map(move |cs| {
        Jet::new(dim, order, base.clone(), slots.iter().cloned().zip(cs)).unwrap()
    })
}

pub fn jet(dim: usize, order: usize) -> impl Strategy<Value = Jet> {
    jet_at(dim, order, Point::origin(dim))
}

/// A jet vanishing at the origin, so it can be substituted into germs based there.
pub fn vanishing_jet(dim: usize, order: usize) -> impl Strategy<Value = Jet> {
    jet(dim, order).prop_map(|j| {
        let v = j.value();
        j.sub(&Jet::constant(j.dim(), j.order(), j.base().clone(), v))
            .unwrap()
    })
}

pub fn base_point(dim: usize) -> impl Strategy<Value = Point> {
    proptest::collection::vec(gauss(), dim).prop_map(Point)
}
