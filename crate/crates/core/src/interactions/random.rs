//! Seeded random elements for property checks and the `verify` suites.

use super::{BoundaryExpr, CorePrimitive, Element, Generator, MeanVanishing, RadialFunction, Tail, Term};
use crate::geometry::{Direction, DirectionChain, Space, Subspace};
use rand::Rng;
use std::sync::Arc;

/// Random rational subspace of dimension `< n` with small integer rows.
pub fn random_subspace<R: Rng>(rng: &mut R, space: Space) -> Subspace {
    let n = space.dim();
    let k = rng.random_range(0..n);
    loop {
        let rows: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.random_range(-2..=2)).collect())
            .collect();
        let y = Subspace::from_vectors(space, &rows).expect("rows have length n");
        if y.dim() == k {
            return y;
        }
    }
}

/// Random nonzero small-integer direction.
pub fn random_direction<R: Rng>(rng: &mut R, space: Space) -> Direction {
    loop {
        let v: Vec<i64> = (0..space.dim()).map(|_| rng.random_range(-3..=3)).collect();
        if let Ok(d) = Direction::from_integers(space, &v) {
            return d;
        }
    }
}

/// Random chain of independent integer lifts of length `len`.
pub fn random_chain<R: Rng>(rng: &mut R, space: Space, len: usize) -> DirectionChain {
    loop {
        let lifts: Vec<Direction> = (0..len).map(|_| random_direction(rng, space)).collect();
        if let Ok(c) = DirectionChain::new(space, lifts) {
            return c;
        }
    }
}

fn random_boundary<R: Rng>(rng: &mut R, d: usize) -> BoundaryExpr {
    let coord = |rng: &mut R| BoundaryExpr::coord(rng.random_range(0..d));
    match rng.random_range(0..4) {
        0 => coord(rng).scaled(rng.random_range(-1.0..1.0)),
        1 => BoundaryExpr::tanh(coord(rng).scaled(rng.random_range(0.5..2.0))),
        2 => BoundaryExpr::cos(BoundaryExpr::add(vec![
            coord(rng),
            BoundaryExpr::constant(rng.random_range(-1.0..1.0)),
        ])),
        _ => BoundaryExpr::mul(vec![coord(rng), coord(rng)]).scaled(rng.random_range(-1.0..1.0)),
    }
}

fn random_center<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Random radial function on a `d`-dimensional quotient.
///
/// Every core primitive decays at least like `|z|^-2`, and oscillators
/// carry an envelope `(1 + |z|)^-ε` with `ε ≥ 1.5`.
pub fn random_radial<R: Rng>(rng: &mut R, d: usize, with_mean_vanishing: bool) -> RadialFunction {
    let mut v = RadialFunction::new(d).with_constant(rng.random_range(-0.5..0.5));
    for _ in 0..rng.random_range(0..=2) {
        let amplitude = rng.random_range(-1.0..1.0);
        let center = random_center(rng, d);
        let p = match rng.random_range(0..3) {
            0 => CorePrimitive::Gaussian {
                amplitude,
                center,
                width: rng.random_range(0.5..2.0),
            },
            1 => CorePrimitive::InversePower {
                amplitude,
                center,
                power: rng.random_range(1.0..2.0),
            },
            _ => CorePrimitive::Bump {
                amplitude,
                center,
                radius: rng.random_range(0.5..2.0),
            },
        };
        v = v.with_core(p);
    }
    if rng.random_bool(0.8) {
        let mut t = Tail::new(random_boundary(rng, d));
        t.center = random_center(rng, d);
        v = v.with_tail(t);
    }
    if with_mean_vanishing && rng.random_bool(0.3) {
        v = v.with_mean_vanishing(MeanVanishing::Oscillator {
            amplitude: rng.random_range(-0.5..0.5),
            center: random_center(rng, d),
            frequency: (0..d).map(|_| rng.random_range(-3.0..3.0)).collect(),
            phase: rng.random_range(0.0..6.0),
            decay: rng.random_range(1.5..2.5),
        });
    }
    v
}

pub fn random_generator<R: Rng>(rng: &mut R, space: Space, with_mean_vanishing: bool) -> Generator {
    let y = random_subspace(rng, space);
    let d = space.dim() - y.dim();
    Generator::new(y, random_radial(rng, d, with_mean_vanishing)).expect("random generator is valid")
}

/// Random element with at most `max_generators` generators in total,
/// arranged as a sum of products.
pub fn random_element<R: Rng>(rng: &mut R, space: Space, max_generators: usize, with_mean_vanishing: bool) -> Element {
    let total = rng.random_range(1..=max_generators.max(1));
    let mut terms = Vec::new();
    let mut left = total;
    while left > 0 {
        let k = rng.random_range(1..=left);
        left -= k;
        terms.push(Term {
            coeff: rng.random_range(-1.0..1.0),
            factors: (0..k)
                .map(|_| Arc::new(random_generator(rng, space, with_mean_vanishing)))
                .collect(),
        });
    }
    if rng.random_bool(0.5) {
        terms.push(Term {
            coeff: rng.random_range(-1.0..1.0),
            factors: Vec::new(),
        });
    }
    Element::from_terms(space, terms)
}

/// Random point in the cube `[-r, r]^n`.
pub fn random_point<R: Rng>(rng: &mut R, space: Space, r: f64) -> Vec<f64> {
    (0..space.dim()).map(|_| rng.random_range(-r..r)).collect()
}
