//! Symbolic algebra of asymptotically homogeneous interactions.
//!
//! An [`Element`] is a finite sum of scalar-weighted products of
//! generators `v ∘ π_Y`. The localization `τ_α` acts generator by
//! generator: a generator whose kernel contains `α` survives unchanged,
//! any other collapses to its radial limit `v(π_Y(α))`.

mod boundary;
mod radial;
pub mod random;
mod wire;

pub use boundary::BoundaryExpr;
pub use radial::{cutoff, CorePrimitive, MeanVanishing, RadialFunction, Tail, TAIL_INNER, TAIL_OUTER};
pub use wire::{ElementDoc, FactorDoc, TermDoc};

use crate::geometry::{
    dot, gram_schmidt, norm, Direction, DirectionChain, GeometryError, QuotientMap, Space, Subspace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

/// Invariance tolerance used by [`Element::is_invariant_under`].
pub const INVARIANCE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InteractionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("generator kernel must be a proper subspace")]
    FullKernel,
    #[error("radial function has quotient dimension {found}, expected {expected}")]
    QuotientDimension { expected: usize, found: usize },
    #[error("invalid radial function: {0}")]
    InvalidRadial(String),
    #[error("point has length {found}, expected {expected}")]
    PointLength { expected: usize, found: usize },
}

/// The function `x ↦ v(π_Y x)` on `X`.
#[derive(Clone, Debug)]
pub struct Generator {
    quotient: QuotientMap,
    matrix: Vec<Vec<f64>>,
    radial: RadialFunction,
}

impl PartialEq for Generator {
    fn eq(&self, other: &Self) -> bool {
        self.quotient == other.quotient && self.radial == other.radial
    }
}

impl Generator {
    pub fn new(kernel: Subspace, mut radial: RadialFunction) -> Result<Self, InteractionError> {
        if kernel.is_full() {
            return Err(InteractionError::FullKernel);
        }
        let quotient = kernel.quotient_map();
        let d = quotient.quotient_dim();
        if radial.quotient_dim == 0 {
            radial.quotient_dim = d;
        }
        if radial.quotient_dim != d {
            return Err(InteractionError::QuotientDimension {
                expected: d,
                found: radial.quotient_dim,
            });
        }
        radial.validate()?;
        let matrix = quotient.matrix_f64();
        Ok(Generator {
            quotient,
            matrix,
            radial,
        })
    }

    pub fn kernel(&self) -> &Subspace {
        self.quotient.kernel()
    }

    pub fn quotient(&self) -> &QuotientMap {
        &self.quotient
    }

    pub fn radial(&self) -> &RadialFunction {
        &self.radial
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| dot(row, x)).collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.radial.eval(&self.project(x))
    }

    /// `v(π_Y(α))` for `α ⊄ Y`; `None` when `α ⊂ Y`.
    pub fn limit_along(&self, alpha: &Direction) -> Option<f64> {
        match self.quotient.project_direction(alpha) {
            Ok(beta) => Some(self.radial.radial_limit(&beta)),
            Err(_) => None,
        }
    }

    pub fn translated(&self, x: &[f64]) -> Generator {
        let s = self.project(x);
        Generator {
            quotient: self.quotient.clone(),
            matrix: self.matrix.clone(),
            radial: self.radial.translated(&s),
        }
    }

    pub fn sup_bound(&self) -> f64 {
        self.radial.sup_bound()
    }
}

/// One product term `coeff · Π factors`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub factors: Vec<Arc<Generator>>,
}

/// A generator that collapsed to a scalar under `τ_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Collapse {
    pub term: usize,
    pub kernel: Subspace,
    pub value: f64,
}

/// Element of the interaction algebra in flattened normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    space: Space,
    terms: Vec<Term>,
}

impl Element {
    pub fn zero(space: Space) -> Self {
        Element {
            space,
            terms: Vec::new(),
        }
    }

    pub fn constant(space: Space, c: f64) -> Self {
        Element {
            space,
            terms: vec![Term {
                coeff: c,
                factors: Vec::new(),
            }],
        }
        .normalized()
    }

    pub fn unit(space: Space) -> Self {
        Self::constant(space, 1.0)
    }

    pub fn generator(g: Generator) -> Self {
        let space = g.kernel().space();
        Element {
            space,
            terms: vec![Term {
                coeff: 1.0,
                factors: vec![Arc::new(g)],
            }],
        }
    }

    /// Convenience: `v ∘ π_Y`.
    pub fn from_parts(kernel: Subspace, radial: RadialFunction) -> Result<Self, InteractionError> {
        Ok(Self::generator(Generator::new(kernel, radial)?))
    }

    pub fn from_terms(space: Space, terms: Vec<Term>) -> Self {
        Element { space, terms }.normalized()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Drops zero terms and folds every factor-free term into one constant.
    pub fn normalized(mut self) -> Self {
        let mut constant = 0.0;
        let mut has_constant = false;
        let mut rest = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if t.factors.is_empty() {
                constant += t.coeff;
                has_constant = true;
            } else if t.coeff != 0.0 {
                rest.push(t);
            }
        }
        if has_constant && constant != 0.0 {
            rest.insert(
                0,
                Term {
                    coeff: constant,
                    factors: Vec::new(),
                },
            );
        }
        self.terms = rest;
        self
    }

    pub fn add(&self, other: &Element) -> Element {
        assert_eq!(self.space, other.space, "elements live on different spaces");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Element::from_terms(self.space, terms)
    }

    pub fn scale(&self, c: f64) -> Element {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff * c,
                factors: t.factors.clone(),
            })
            .collect();
        Element::from_terms(self.space, terms)
    }

    pub fn mul(&self, other: &Element) -> Element {
        assert_eq!(self.space, other.space, "elements live on different spaces");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                terms.push(Term {
                    coeff: a.coeff * b.coeff,
                    factors,
                });
            }
        }
        Element::from_terms(self.space, terms)
    }

    /// The scalar value when the element has no generator left.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [] => Some(0.0),
            [t] if t.factors.is_empty() => Some(t.coeff),
            _ => None,
        }
    }

    /// Distinct generator kernels, in order of first appearance.
    pub fn subspaces(&self) -> Vec<Subspace> {
        let mut out: Vec<Subspace> = Vec::new();
        for t in &self.terms {
            for g in &t.factors {
                if !out.contains(g.kernel()) {
                    out.push(g.kernel().clone());
                }
            }
        }
        out
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.terms.iter().flat_map(|t| t.factors.iter().map(|g| g.as_ref()))
    }

    /// Whether every term is a single generator (or a constant): the
    /// classic `Σ_Y v_Y` shape.
    pub fn is_pure_sum(&self) -> bool {
        self.terms.iter().all(|t| t.factors.len() <= 1)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.space.dim());
        self.terms
            .iter()
            .map(|t| t.coeff * t.factors.iter().map(|g| g.eval(x)).product::<f64>())
            .sum()
    }

    pub fn try_eval(&self, x: &[f64]) -> Result<f64, InteractionError> {
        if x.len() != self.space.dim() {
            return Err(InteractionError::PointLength {
                expected: self.space.dim(),
                found: x.len(),
            });
        }
        Ok(self.eval(x))
    }

    /// Upper bound on `sup |u|`.
    pub fn norm_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.abs() * t.factors.iter().map(|g| g.sup_bound()).product::<f64>())
            .sum()
    }

    /// `τ_α(u)(x) = lim_{r→∞} u(r a + x)`, computed symbolically.
    pub fn tau_alpha(&self, alpha: &Direction) -> Element {
        self.tau_alpha_traced(alpha).0
    }

    /// [`Self::tau_alpha`] together with the list of collapsed generators.
    pub fn tau_alpha_traced(&self, alpha: &Direction) -> (Element, Vec<Collapse>) {
        assert_eq!(alpha.space(), self.space, "direction lives on a different space");
        let mut collapses = Vec::new();
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut coeff = t.coeff;
                let mut kept = Vec::new();
                for g in &t.factors {
                    match g.limit_along(alpha) {
                        None => kept.push(Arc::clone(g)),
                        Some(value) => {
                            coeff *= value;
                            collapses.push(Collapse {
                                term: i,
                                kernel: g.kernel().clone(),
                                value,
                            });
                        }
                    }
                }
                Term { coeff, factors: kept }
            })
            .collect();
        (Element::from_terms(self.space, terms), collapses)
    }

    /// `τ_ᾱ = τ_{α_m} ∘ … ∘ τ_{α_1}`.
    pub fn tau_chain(&self, chain: &DirectionChain) -> Element {
        chain
            .lifts()
            .iter()
            .fold(self.clone(), |u, a| u.tau_alpha(a))
    }

    /// `χ_{a,ᾱ}(u) = τ_ᾱ(u)(a)`.
    pub fn character_eval(&self, chi: &CharacterIndex) -> f64 {
        self.tau_chain(&chi.chain).eval(&chi.point)
    }

    /// `y ↦ u(x + y)`.
    pub fn translate(&self, x: &[f64]) -> Element {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff,
                factors: t.factors.iter().map(|g| Arc::new(g.translated(x))).collect(),
            })
            .collect();
        Element {
            space: self.space,
            terms,
        }
    }

    /// Sampled test of `u(x + y) = u(x)` for `y ∈ Y`.
    pub fn is_invariant_under(&self, y: &Subspace, cfg: &InvarianceSampling) -> bool {
        self.invariance_defect(y, cfg) <= INVARIANCE_TOL
    }

    /// `max |u(x + y) - u(x)|` over the sampled pairs.
    pub fn invariance_defect(&self, y: &Subspace, cfg: &InvarianceSampling) -> f64 {
        let n = self.space.dim();
        let q = y.orthonormal_basis();
        if q.is_empty() {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.points {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-cfg.radius..cfg.radius)).collect();
            let t: Vec<f64> = q.iter().map(|_| rng.random_range(-cfg.radius..cfg.radius)).collect();
            let xy: Vec<f64> = (0..n)
                .map(|k| x[k] + t.iter().zip(&q).map(|(ti, qi)| ti * qi[k]).sum::<f64>())
                .collect();
            worst = worst.max((self.eval(&xy) - self.eval(&x)).abs());
        }
        worst
    }

    /// Box-averaged convergence of `u` toward its localization along `α`.
    pub fn mean_limit(&self, alpha: &Direction, cfg: &MeanLimitConfig) -> MeanLimit {
        let n = self.space.dim();
        let limit = self.tau_alpha(alpha);
        let m = cfg.points_per_axis.max(1);
        let h = 2.0 * cfg.halfwidth / m as f64;
        let nodes: Vec<f64> = (0..m).map(|i| -cfg.halfwidth + h * (i as f64 + 0.5)).collect();
        let total = m.pow(n as u32);
        let residuals = cfg
            .radii
            .iter()
            .map(|&r| {
                let centre: Vec<f64> = alpha.unit().iter().map(|a| r * a).collect();
                let mut acc = 0.0;
                let mut y = vec![0.0; n];
                let mut x = vec![0.0; n];
                for idx in 0..total {
                    let mut rest = idx;
                    for k in 0..n {
                        y[k] = nodes[rest % m];
                        rest /= m;
                        x[k] = centre[k] + y[k];
                    }
                    acc += (self.eval(&x) - limit.eval(&y)).abs();
                }
                acc / total as f64
            })
            .collect();
        MeanLimit {
            estimate: limit.eval(&vec![0.0; n]),
            scalar: limit.as_constant().is_some(),
            residuals,
        }
    }
}

/// Sampling parameters for invariance tests.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceSampling {
    pub points: usize,
    pub radius: f64,
    pub seed: u64,
}

impl Default for InvarianceSampling {
    fn default() -> Self {
        InvarianceSampling {
            points: 64,
            radius: 10.0,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanLimitConfig {
    pub halfwidth: f64,
    pub radii: Vec<f64>,
    pub points_per_axis: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanLimit {
    /// `τ_α(u)` at the origin; the mean limit itself when `scalar` holds.
    pub estimate: f64,
    pub scalar: bool,
    pub residuals: Vec<f64>,
}

/// Index `(a, ᾱ)` of the character `χ_{a,ᾱ}`.
///
/// The point is stored as the representative of its class modulo
/// `[ᾱ]` orthogonal to the chain span, so a full-length chain always
/// carries the zero point.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterIndex {
    pub chain: DirectionChain,
    pub point: Vec<f64>,
}

impl CharacterIndex {
    pub fn new(chain: DirectionChain, point: &[f64]) -> Result<Self, InteractionError> {
        let n = chain.space().dim();
        if point.len() != n {
            return Err(InteractionError::PointLength {
                expected: n,
                found: point.len(),
            });
        }
        let q = gram_schmidt(&chain.subspace().basis_f64());
        let mut p = point.to_vec();
        for b in &q {
            let c = dot(&p, b);
            for (pi, bi) in p.iter_mut().zip(b) {
                *pi -= c * bi;
            }
        }
        if chain.len() == n || norm(&p) < 1e-14 {
            p.iter_mut().for_each(|x| *x = 0.0);
        }
        Ok(CharacterIndex { chain, point: p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(n: usize) -> Space {
        Space::new(n).unwrap()
    }

    fn tanh_on(space: Space, kernel: &[Vec<i64>]) -> Element {
        let y = Subspace::from_vectors(space, kernel).unwrap();
        let d = space.dim() - y.dim();
        let v = RadialFunction::tail(d, BoundaryExpr::coord(0));
        Element::from_parts(y, v).unwrap()
    }

    #[test]
    fn eval_examples() {
        let s = sp(2);
        assert_eq!(Element::unit(s).eval(&[3.0, -1.0]), 1.0);
        let y = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap();
        let g = Element::from_parts(y, RadialFunction::gaussian(1, 1.0, 1.0).with_constant(0.0)).unwrap();
        // quotient coordinate is x_1, so the value on the x_2 axis is the peak
        assert_eq!(g.eval(&[0.0, 5.0]), 1.0);
        let h = tanh_on(s, &[vec![1, 0]]);
        let p = g.mul(&h);
        for x in [[0.3, 1.7], [-2.0, 4.0], [5.0, -0.1]] {
            assert!((p.eval(&x) - g.eval(&x) * h.eval(&x)).abs() < 1e-15);
        }
    }

    #[test]
    fn tau_collapses_or_keeps() {
        let s = sp(2);
        let u = tanh_on(s, &[vec![0, 1]]);
        assert_eq!(u.tau_alpha(&s.axis(0)).as_constant(), Some(1.0));
        assert_eq!(u.tau_alpha(&s.axis(0).negate()).as_constant(), Some(-1.0));
        assert_eq!(u.tau_alpha(&s.axis(1)), u);
    }

    #[test]
    fn tau_of_product_matches_ray_limit() {
        let s = sp(2);
        let a = tanh_on(s, &[vec![1, 0]]);
        let b = tanh_on(s, &[vec![0, 1]]);
        let u = a.mul(&b);
        let alpha = s.axis(1);
        let t = u.tau_alpha(&alpha);
        // kept factor is the e_2 kernel tanh-tail; the other collapses to v(π(e_2)) = 1
        assert_eq!(t.terms().len(), 1);
        assert_eq!(t.terms()[0].factors.len(), 1);
        assert_eq!(t.terms()[0].factors[0].kernel(), b.subspaces().first().unwrap());
        for x in [[0.5, 0.2], [3.0, -1.0]] {
            let mut last = f64::INFINITY;
            for r in [1e3, 1e4, 1e5, 1e6] {
                let err = (u.eval(&[x[0], x[1] + r]) - t.eval(&x)).abs();
                assert!(err <= last + 1e-15);
                last = err;
            }
            assert!(last < 1e-9);
        }
    }

    #[test]
    fn chain_examples() {
        let s = sp(2);
        let u = tanh_on(s, &[vec![1, 1]]).add(&tanh_on(s, &[vec![0, 1]]));
        assert_eq!(u.tau_chain(&DirectionChain::empty(s)), u);
        let full = DirectionChain::from_integers(s, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(u.tau_chain(&full).as_constant().is_some());
        let g = tanh_on(s, &[vec![1, 1]]);
        let chain = DirectionChain::from_integers(s, &[vec![1, 0], vec![0, 1]]).unwrap();
        let v = g.tau_chain(&chain);
        assert_eq!(v.as_constant(), Some(g.tau_alpha(&s.axis(0)).as_constant().unwrap()));
    }

    #[test]
    fn characters() {
        let s = sp(2);
        let u = tanh_on(s, &[vec![0, 1]]);
        let chi = CharacterIndex::new(DirectionChain::empty(s), &[0.4, 2.0]).unwrap();
        assert_eq!(u.character_eval(&chi), u.eval(&[0.4, 2.0]));
        let full = DirectionChain::from_integers(s, &[vec![1, 2], vec![0, 1]]).unwrap();
        let chi = CharacterIndex::new(full, &[0.4, 2.0]).unwrap();
        assert_eq!(chi.point, vec![0.0, 0.0]);
        assert_eq!(Element::unit(s).character_eval(&chi), 1.0);
    }

    #[test]
    fn translation_examples() {
        let s = sp(2);
        let y = Subspace::from_vectors(s, &[vec![1, 2]]).unwrap();
        let u = Element::from_parts(y.clone(), RadialFunction::gaussian(1, 1.0, 0.7))
            .unwrap()
            .add(&tanh_on(s, &[vec![0, 1]]).scale(0.5));
        assert_eq!(u.translate(&[0.0, 0.0]).eval(&[0.3, 0.1]), u.eval(&[0.3, 0.1]));
        let x0 = [0.25, -1.5];
        let t = u.translate(&x0);
        for i in 0..10 {
            let p = [0.37 * i as f64 - 1.0, 0.11 * i as f64];
            let q = [p[0] + x0[0], p[1] + x0[1]];
            assert!((t.eval(&p) - u.eval(&q)).abs() < 1e-12);
        }
        let g = Element::from_parts(y, RadialFunction::gaussian(1, 1.0, 0.7)).unwrap();
        let along = g.translate(&[2.0, 4.0]);
        assert!((along.eval(&[0.1, 0.9]) - g.eval(&[0.1, 0.9])).abs() < 1e-12);
    }

    #[test]
    fn invariance_examples() {
        let s = sp(2);
        let cfg = InvarianceSampling::default();
        let y2 = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap();
        let y1 = Subspace::from_vectors(s, &[vec![1, 0]]).unwrap();
        let u = tanh_on(s, &[vec![0, 1]]);
        assert!(u.is_invariant_under(&y2, &cfg));
        assert!(!u.is_invariant_under(&y1, &cfg));

        let s3 = sp(3);
        let a = Subspace::from_vectors(s3, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let b = Subspace::from_vectors(s3, &[vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let w = Element::from_parts(a.clone(), RadialFunction::gaussian(1, 1.0, 1.0))
            .unwrap()
            .add(&Element::from_parts(b.clone(), RadialFunction::tail(1, BoundaryExpr::coord(0))).unwrap());
        assert!(w.is_invariant_under(&a.intersect(&b).unwrap(), &cfg));
        assert!(!w.is_invariant_under(&a, &cfg));
    }

    #[test]
    fn mean_limit_examples() {
        let s = sp(1);
        let cfg = MeanLimitConfig {
            halfwidth: 1.0,
            radii: vec![10.0, 100.0, 1000.0],
            points_per_axis: 64,
        };
        let c = Element::constant(s, 2.5).mean_limit(&s.axis(0), &cfg);
        assert_eq!(c.residuals, vec![0.0; 3]);
        assert_eq!(c.estimate, 2.5);

        let tanh = Element::from_parts(
            Subspace::zero(s),
            RadialFunction::tail(1, BoundaryExpr::coord(0)).with_core(CorePrimitive::Gaussian {
                amplitude: 1.0,
                center: vec![],
                width: 3.0,
            }),
        )
        .unwrap();
        let m = tanh.mean_limit(&s.axis(0), &cfg);
        assert_eq!(m.estimate, 1.0);
        assert!(m.scalar);
        assert!(m.residuals.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.residuals[2] < 1e-12);
    }

    #[test]
    fn norm_bound_dominates() {
        let s = sp(2);
        let u = tanh_on(s, &[vec![0, 1]]).mul(&tanh_on(s, &[vec![1, 0]])).scale(-3.0);
        let b = u.norm_bound();
        for i in 0..50 {
            let x = [i as f64 * 0.7 - 10.0, 5.0 - i as f64 * 0.3];
            assert!(u.eval(&x).abs() <= b);
        }
    }

    #[test]
    fn rejects_bad_generators() {
        let s = sp(2);
        let full = Subspace::full(s);
        assert_eq!(
            Generator::new(full, RadialFunction::new(0)).unwrap_err(),
            InteractionError::FullKernel
        );
        let y = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap();
        assert!(matches!(
            Generator::new(y, RadialFunction::new(2)).unwrap_err(),
            InteractionError::QuotientDimension { expected: 1, found: 2 }
        ));
    }
}
