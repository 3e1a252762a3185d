use super::operator::{inner, norm, LinearOperator};
use super::SpectraError;
use num_complex::Complex64;

/// Relative residual target of [`resolvent_apply`].
pub const RESOLVENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CgOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            tol: RESOLVENT_TOL,
            max_iter: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `(A − z) x = b` by preconditioned conjugate gradients.
///
/// `A − z` must be positive definite; a non-positive curvature
/// `⟨p, (A−z) p⟩ ≤ 0` is reported as [`SpectraError::Indefinite`].
pub fn solve_shifted<O: LinearOperator + ?Sized>(
    op: &O,
    z: f64,
    b: &[Complex64],
    opts: &CgOptions,
) -> Result<(Vec<Complex64>, CgStats), SpectraError> {
    let n = op.size();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((vec![Complex64::default(); n], CgStats { iterations: 0, relative_residual: 0.0 }));
    }
    let shifted = |x: &[Complex64]| -> Vec<Complex64> {
        let mut y = op.apply(x);
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi -= z * xi);
        y
    };
    let precondition = |r: &[Complex64]| op.precondition(r, z).unwrap_or_else(|| r.to_vec());

    let mut x = vec![Complex64::default(); n];
    let mut r = b.to_vec();
    let mut iterations = 0;
    // restarts guard against drift of the recursive residual
    for _restart in 0..4 {
        let mut zr = precondition(&r);
        let mut rz = inner(&r, &zr).re;
        let mut p = zr.clone();
        while norm(&r) > opts.tol * bnorm {
            if iterations >= opts.max_iter {
                return Err(SpectraError::NonConvergence {
                    iterations,
                    residual: norm(&r) / bnorm,
                });
            }
            iterations += 1;
            let ap = shifted(&p);
            let curvature = inner(&p, &ap).re;
            if !(curvature > 0.0) || !(rz > 0.0) {
                return Err(SpectraError::Indefinite { iteration: iterations });
            }
            let alpha = rz / curvature;
            x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.iter_mut().zip(&ap).for_each(|(ri, ai)| *ri -= alpha * ai);
            zr = precondition(&r);
            let rz_new = inner(&r, &zr).re;
            let beta = rz_new / rz;
            rz = rz_new;
            p.iter_mut().zip(&zr).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        let ax = shifted(&x);
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let true_res = norm(&r) / bnorm;
        if true_res <= opts.tol {
            return Ok((x, CgStats { iterations, relative_residual: true_res }));
        }
    }
    Err(SpectraError::NonConvergence {
        iterations,
        residual: norm(&r) / bnorm,
    })
}

/// `(H − z)^{-1} f` to relative residual [`RESOLVENT_TOL`].
pub fn resolvent_apply<O: LinearOperator + ?Sized>(op: &O, z: f64, f: &[Complex64]) -> Result<Vec<Complex64>, SpectraError> {
    solve_shifted(op, z, f, &CgOptions::default()).map(|(x, _)| x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::operator::{materialize, random_vector};
    use crate::spectra::{DiscreteOperator, GridSpec, KineticSymbol};
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn well(n: usize) -> DiscreteOperator {
        let g = GridSpec::uniform(1, n, 8.0).unwrap();
        let v = g.nodes(0).iter().map(|x| -2.0 * (-x * x).exp()).collect();
        DiscreteOperator::from_samples(&KineticSymbol::laplacian(), &g, v).unwrap()
    }

    #[test]
    fn fourier_mode_scales() {
        let g = GridSpec::uniform(1, 32, 5.0).unwrap();
        let op = DiscreteOperator::from_samples(&KineticSymbol::laplacian(), &g, vec![0.0; 32]).unwrap();
        let k = g.freq(0, 3);
        let e: Vec<Complex64> = g.nodes(0).iter().map(|x| Complex64::from_polar(1.0, k * x)).collect();
        let u = resolvent_apply(&op, -1.0, &e).unwrap();
        for (a, b) in u.iter().zip(&e) {
            assert!((a - b / (k * k + 1.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn matches_dense_inverse() {
        let op = well(64);
        let m = materialize(&op);
        let shifted = m - nalgebra::DMatrix::<Complex64>::identity(64, 64).scale(-2.0);
        let inv = shifted.try_inverse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_vector(&mut rng, 64);
        let u = resolvent_apply(&op, -2.0, &f).unwrap();
        let dense = &inv * DVector::from_vec(f.clone());
        let err = u.iter().zip(dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn indefinite_detected() {
        let op = well(64);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_vector(&mut rng, 64);
        assert!(matches!(resolvent_apply(&op, 5.0, &f), Err(SpectraError::Indefinite { .. })));
    }
}
