//! Exact rational geometry of the configuration space.
//!
//! Subspaces are stored in a canonical reduced row echelon form with
//! primitive integer rows, so two equal subspaces always compare equal
//! bit for bit. Directions are half-lines: `a` and `2a` are the same
//! direction, `a` and `-a` are not.

mod arrangement;
mod linalg;

pub use arrangement::{arrangement_cells, containment_pattern, sphere_samples, Cell, SamplerConfig};
pub use linalg::{rref, Rational};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest ambient dimension the crate supports.
pub const MAX_DIM: usize = 4;

/// Tolerance on the projection residual when testing a floating-point
/// direction for membership in a rational subspace.
pub const FLOAT_CONTAINMENT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unsupported dimension {0} (supported: 1..={MAX_DIM})")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector does not define a direction")]
    ZeroDirection,
    #[error("non-finite component in direction")]
    NonFinite,
    #[error("direction lies in the kernel of the quotient map")]
    DirectionInKernel,
    #[error("invalid chain: lift {index} lies in the span of the previous lifts")]
    InvalidChain { index: usize },
}

/// The ambient space `R^n` with its rational structure `Q^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    dim: usize,
}

impl Space {
    pub fn new(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        Ok(Space { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_len(&self, len: usize) -> Result<(), GeometryError> {
        if len != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }

    /// Standard basis vector `e_i` as a direction.
    pub fn axis(&self, i: usize) -> Direction {
        let mut v = vec![0i64; self.dim];
        v[i] = 1;
        Direction::from_integers(*self, &v).expect("axis vector is nonzero")
    }
}

/// Scales a rational vector to the primitive integer vector pointing the
/// same way (gcd of entries 1, sign preserved).
pub(crate) fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub(crate) fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A rational linear subspace of `X`, held in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    space: Space,
    basis: Vec<Vec<BigInt>>,
}

impl Subspace {
    pub fn zero(space: Space) -> Self {
        Subspace {
            space,
            basis: Vec::new(),
        }
    }

    pub fn full(space: Space) -> Self {
        let rows: Vec<Vec<Rational>> = (0..space.dim)
            .map(|i| {
                (0..space.dim)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Self::from_rational_rows(space, rows)
    }

    /// Canonical span of integer vectors.
    pub fn from_vectors(space: Space, vectors: &[Vec<i64>]) -> Result<Self, GeometryError> {
        let rows = vectors
            .iter()
            .map(|v| {
                space.check_len(v.len())?;
                Ok(v.iter().map(|&x| Rational::from_integer(x.into())).collect())
            })
            .collect::<Result<Vec<Vec<Rational>>, GeometryError>>()?;
        Ok(Self::from_rational_rows(space, rows))
    }

    /// Canonical span of rational vectors.
    pub fn from_rationals(space: Space, vectors: &[Vec<Rational>]) -> Result<Self, GeometryError> {
        for v in vectors {
            space.check_len(v.len())?;
        }
        Ok(Self::from_rational_rows(space, vectors.to_vec()))
    }

    fn from_rational_rows(space: Space, rows: Vec<Vec<Rational>>) -> Self {
        let (reduced, _pivots) = rref(rows, space.dim);
        let basis = reduced.iter().map(|r| primitive_integer(r)).collect();
        Subspace { space, basis }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.space.dim
    }

    /// Canonical basis rows (primitive integers, reduced echelon pattern).
    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn basis_rational(&self) -> Vec<Vec<Rational>> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect()
    }

    pub fn basis_f64(&self) -> Vec<Vec<f64>> {
        self.basis
            .iter()
            .map(|r| r.iter().map(big_to_f64).collect())
            .collect()
    }

    /// Basis rows as `i64`, when every entry fits.
    pub fn basis_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    /// Orthonormal float basis (Gram-Schmidt on the canonical rows).
    pub fn orthonormal_basis(&self) -> Vec<Vec<f64>> {
        gram_schmidt(&self.basis_f64())
    }

    fn check_same_space(&self, other: &Subspace) -> Result<(), GeometryError> {
        self.space.check_len(other.space.dim)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, GeometryError> {
        self.check_same_space(other)?;
        let mut rows = self.basis_rational();
        rows.extend(other.basis_rational());
        Ok(Self::from_rational_rows(self.space, rows))
    }

    /// `Y ∩ Z`, computed as the orthogonal complement of `Y^⊥ + Z^⊥`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, GeometryError> {
        self.check_same_space(other)?;
        let perp = self.orthogonal_complement().sum(&other.orthogonal_complement())?;
        Ok(perp.orthogonal_complement())
    }

    /// The rational orthogonal complement, in canonical form.
    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.space.dim;
        let rows = self.basis_rational();
        let (reduced, pivots) = rref(rows, n);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut null = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            null.push(v);
        }
        Self::from_rational_rows(self.space, null)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other
            .basis_rational()
            .iter()
            .all(|v| self.contains_rational(v))
    }

    /// Exact membership of a rational vector.
    pub fn contains_rational(&self, v: &[Rational]) -> bool {
        if v.len() != self.space.dim {
            return false;
        }
        let mut rows = self.basis_rational();
        rows.push(v.to_vec());
        let (reduced, _) = rref(rows, self.space.dim);
        reduced.len() == self.dim()
    }

    /// Euclidean distance from a float vector to the subspace.
    pub fn residual(&self, v: &[f64]) -> f64 {
        let q = self.orthonormal_basis();
        let mut r = v.to_vec();
        for b in &q {
            let c = dot(&r, b);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        norm(&r)
    }

    /// Whether the half-line `alpha` lies in this subspace.
    ///
    /// Exact for rational directions; for float-only directions the
    /// projection residual of the unit vector is compared with
    /// [`FLOAT_CONTAINMENT_TOL`].
    pub fn contains_direction(&self, alpha: &Direction) -> bool {
        if alpha.space != self.space {
            return false;
        }
        match &alpha.primitive {
            Some(p) => {
                let v: Vec<Rational> = p.iter().map(|x| Rational::from_integer(x.clone())).collect();
                self.contains_rational(&v)
            }
            None => self.residual(&alpha.unit) < FLOAT_CONTAINMENT_TOL,
        }
    }

    /// Quotient map `X -> X/Y` for this kernel.
    pub fn quotient_map(&self) -> QuotientMap {
        QuotientMap::new(self.clone())
    }
}

impl std::fmt::Display for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "span{{")?;
        for (i, row) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // two passes keep the basis orthonormal to rounding
        for _ in 0..2 {
            for q in &out {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let nw = norm(&w);
        if nw > 1e-12 {
            out.push(w.iter().map(|x| x / nw).collect());
        }
    }
    out
}

/// A point of the sphere at infinity: the half-line `{ r a : r > 0 }`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    space: Space,
    primitive: Option<Vec<BigInt>>,
    unit: Vec<f64>,
}

impl Direction {
    pub fn from_integers(space: Space, v: &[i64]) -> Result<Self, GeometryError> {
        let r: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(x.into())).collect();
        Self::from_rationals(space, &r)
    }

    pub fn from_rationals(space: Space, v: &[Rational]) -> Result<Self, GeometryError> {
        space.check_len(v.len())?;
        if v.iter().all(|x| x.is_zero()) {
            return Err(GeometryError::ZeroDirection);
        }
        let p = primitive_integer(v);
        let f: Vec<f64> = p.iter().map(big_to_f64).collect();
        let nf = norm(&f);
        Ok(Direction {
            space,
            unit: f.iter().map(|x| x / nf).collect(),
            primitive: Some(p),
        })
    }

    /// A direction known only in floating point (possibly irrational).
    pub fn from_f64(space: Space, v: &[f64]) -> Result<Self, GeometryError> {
        space.check_len(v.len())?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let n = norm(v);
        if n == 0.0 {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Direction {
            space,
            primitive: None,
            unit: v.iter().map(|x| x / n).collect(),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn primitive(&self) -> Option<&[BigInt]> {
        self.primitive.as_deref()
    }

    pub fn is_rational(&self) -> bool {
        self.primitive.is_some()
    }

    pub fn negate(&self) -> Direction {
        Direction {
            space: self.space,
            primitive: self.primitive.as_ref().map(|p| p.iter().map(|x| -x).collect()),
            unit: self.unit.iter().map(|x| -x).collect(),
        }
    }

    /// Rational vector of the direction (primitive integer entries).
    pub fn rational_vector(&self) -> Option<Vec<Rational>> {
        self.primitive
            .as_ref()
            .map(|p| p.iter().map(|x| Rational::from_integer(x.clone())).collect())
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.primitive {
            Some(p) => {
                let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            None => {
                let parts: Vec<String> = self.unit.iter().map(|x| format!("{x:.6}")).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

/// The canonical projection `π_Y : X -> X/Y`.
///
/// Quotient coordinates are taken against the canonical basis of the
/// rational orthogonal complement of `Y`, so `matrix · y = 0` for every
/// `y ∈ Y` and the rows have full rank `n - dim Y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuotientMap {
    kernel: Subspace,
    matrix: Vec<Vec<BigInt>>,
}

impl QuotientMap {
    pub fn new(kernel: Subspace) -> Self {
        let matrix = kernel.orthogonal_complement().basis;
        QuotientMap { kernel, matrix }
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn source(&self) -> Space {
        self.kernel.space
    }

    pub fn quotient_dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    pub fn matrix_f64(&self) -> Vec<Vec<f64>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(big_to_f64).collect())
            .collect()
    }

    pub fn apply_rational(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + Rational::from_integer(a.clone()) * b)
            })
            .collect()
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| big_to_f64(a) * b).sum())
            .collect()
    }

    /// Image of a half-line not contained in the kernel.
    pub fn project_direction(&self, alpha: &Direction) -> Result<Direction, GeometryError> {
        if self.kernel.contains_direction(alpha) {
            return Err(GeometryError::DirectionInKernel);
        }
        let qspace = Space::new(self.quotient_dim()).map_err(|_| GeometryError::DirectionInKernel)?;
        match alpha.rational_vector() {
            Some(v) => Direction::from_rationals(qspace, &self.apply_rational(&v)),
            None => Direction::from_f64(qspace, &self.apply_f64(&alpha.unit)),
        }
    }
}

/// Finite sequence of independent half-lines `(α_1, …, α_m)` given by
/// rational lifts in `X`; step `j` is read modulo `span(a_1..a_{j-1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionChain {
    space: Space,
    lifts: Vec<Direction>,
    cumulative: Vec<Subspace>,
}

impl DirectionChain {
    pub fn empty(space: Space) -> Self {
        DirectionChain {
            space,
            lifts: Vec::new(),
            cumulative: Vec::new(),
        }
    }

    pub fn new(space: Space, lifts: Vec<Direction>) -> Result<Self, GeometryError> {
        let mut cumulative: Vec<Subspace> = Vec::with_capacity(lifts.len());
        let mut current = Subspace::zero(space);
        for (j, a) in lifts.iter().enumerate() {
            space.check_len(a.space.dim)?;
            let v = a.rational_vector().ok_or(GeometryError::InvalidChain { index: j })?;
            if current.contains_rational(&v) {
                return Err(GeometryError::InvalidChain { index: j });
            }
            current = Subspace::from_rationals(space, &[&current.basis_rational()[..], &[v]].concat())?;
            cumulative.push(current.clone());
        }
        Ok(DirectionChain {
            space,
            lifts,
            cumulative,
        })
    }

    pub fn from_integers(space: Space, lifts: &[Vec<i64>]) -> Result<Self, GeometryError> {
        let dirs = lifts
            .iter()
            .map(|l| Direction::from_integers(space, l))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(space, dirs)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn lifts(&self) -> &[Direction] {
        &self.lifts
    }

    pub fn len(&self) -> usize {
        self.lifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifts.is_empty()
    }

    pub fn cumulative(&self) -> &[Subspace] {
        &self.cumulative
    }

    /// `[α_1, …, α_m]`, the span of all lifts.
    pub fn subspace(&self) -> Subspace {
        self.cumulative
            .last()
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.space))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(n: usize) -> Space {
        Space::new(n).unwrap()
    }

    fn ints(s: &Subspace) -> Vec<Vec<i64>> {
        s.basis_i64().unwrap()
    }

    #[test]
    fn span_examples() {
        let full = Subspace::from_vectors(sp(2), &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(full.dim(), 2);
        assert!(full.is_full());
        let zero = Subspace::from_vectors(sp(2), &[]).unwrap();
        assert_eq!(zero.dim(), 0);
        assert!(zero.basis().is_empty());
        let line = Subspace::from_vectors(sp(2), &[vec![2, 4], vec![1, 2]]).unwrap();
        assert_eq!(ints(&line), vec![vec![1, 2]]);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let err = Subspace::from_vectors(sp(2), &[vec![1, 0, 0]]).unwrap_err();
        assert_eq!(err, GeometryError::DimensionMismatch { expected: 2, found: 3 });
        assert!(Space::new(0).is_err());
        assert!(Space::new(5).is_err());
    }

    #[test]
    fn sum_and_intersection() {
        let s = sp(2);
        let y = Subspace::from_vectors(s, &[vec![1, 0]]).unwrap();
        let z = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap();
        assert!(y.sum(&z).unwrap().is_full());
        assert!(y.intersect(&z).unwrap().is_zero());
        assert_eq!(y.sum(&y).unwrap(), y);
        assert_eq!(y.intersect(&y).unwrap(), y);

        let s3 = sp(3);
        let y = Subspace::from_vectors(s3, &[vec![1, 1, 0]]).unwrap();
        let z = Subspace::from_vectors(s3, &[vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(y.sum(&z).unwrap(), z);
        assert_eq!(y.intersect(&z).unwrap(), y);
    }

    #[test]
    fn containment_examples() {
        let s = sp(2);
        let y = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap();
        assert!(y.contains_direction(&Direction::from_integers(s, &[0, 1]).unwrap()));
        assert!(!y.contains_direction(&Direction::from_integers(s, &[1, 1]).unwrap()));
        let s3 = sp(3);
        let y = Subspace::from_vectors(s3, &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert!(y.contains_direction(&Direction::from_integers(s3, &[1, 2, 3]).unwrap()));
        // float path
        let a = Direction::from_f64(s3, &[1.0, 2.0, 3.0]).unwrap();
        assert!(y.contains_direction(&a));
        let b = Direction::from_f64(s3, &[1.0, 2.0, 3.1]).unwrap();
        assert!(!y.contains_direction(&b));
    }

    #[test]
    fn projection_examples() {
        let s = sp(2);
        let q = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap().quotient_map();
        let p = q.project_direction(&Direction::from_integers(s, &[1, 1]).unwrap()).unwrap();
        assert_eq!(p.unit(), &[1.0]);
        let p = q.project_direction(&Direction::from_integers(s, &[-3, 7]).unwrap()).unwrap();
        assert_eq!(p.unit(), &[-1.0]);

        let q = Subspace::from_vectors(s, &[vec![1, 1]]).unwrap().quotient_map();
        assert_eq!(q.matrix()[0], vec![BigInt::from(1), BigInt::from(-1)]);
        let p = q.project_direction(&Direction::from_integers(s, &[1, 0]).unwrap()).unwrap();
        assert_eq!(p.unit(), &[1.0]);

        let err = q.project_direction(&Direction::from_integers(s, &[2, 2]).unwrap());
        assert_eq!(err.unwrap_err(), GeometryError::DirectionInKernel);
    }

    #[test]
    fn half_lines_are_not_lines() {
        let s = sp(2);
        let a = Direction::from_integers(s, &[2, 4]).unwrap();
        let b = Direction::from_integers(s, &[1, 2]).unwrap();
        let c = Direction::from_integers(s, &[-1, -2]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.negate(), c);
        assert!(Direction::from_integers(s, &[0, 0]).is_err());
    }

    #[test]
    fn chain_examples() {
        let s2 = sp(2);
        let c = DirectionChain::from_integers(s2, &[vec![1, 0]]).unwrap();
        assert_eq!(c.subspace(), Subspace::from_vectors(s2, &[vec![1, 0]]).unwrap());
        let c = DirectionChain::from_integers(s2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(c.subspace().is_full());
        let s3 = sp(3);
        let c = DirectionChain::from_integers(s3, &[vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(c.subspace().dim(), 2);
        assert_eq!(
            c.subspace(),
            Subspace::from_vectors(s3, &[vec![1, 1, 0], vec![0, 0, 1]]).unwrap()
        );
        let err = DirectionChain::from_integers(s3, &[vec![1, 1, 0], vec![2, 2, 0]]).unwrap_err();
        assert_eq!(err, GeometryError::InvalidChain { index: 1 });
        assert!(DirectionChain::empty(s3).subspace().is_zero());
    }

    #[test]
    fn complement_is_orthogonal() {
        let s = sp(4);
        let y = Subspace::from_vectors(s, &[vec![1, 2, 0, -1], vec![0, 1, 1, 3]]).unwrap();
        let c = y.orthogonal_complement();
        assert_eq!(c.dim(), 2);
        for a in y.basis() {
            for b in c.basis() {
                let d: BigInt = a.iter().zip(b).map(|(x, y)| x * y).sum();
                assert!(d.is_zero());
            }
        }
    }
}
