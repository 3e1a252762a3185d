use super::cg::{solve_shifted, CgOptions};
use super::operator::{inner, materialize, norm, LinearOperator};
use super::SpectraError;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest operator size accepted by the dense path.
pub const DENSE_LIMIT: usize = 4096;

/// Residual target `‖Hv − λv‖ ≤ tol ‖v‖` of the iterative path.
pub const KRYLOV_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMode {
    FullDense,
    LowestK(usize),
}

/// How the Krylov space is generated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shift {
    /// Powers of `H` itself.
    None,
    /// Powers of `(H − σ)^{-1}`, `σ` below the spectrum.
    At(f64),
    /// `σ` = operator lower bound minus a margin; falls back to no shift
    /// when the operator knows no bound.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrylovOptions {
    pub block: usize,
    pub max_dim: usize,
    pub tol: f64,
    pub seed: u64,
    pub shift: Shift,
    /// Inner solve tolerance for the shift-invert path.
    pub inner_tol: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            block: 4,
            max_dim: 600,
            tol: KRYLOV_TOL,
            seed: 0x1a2c05,
            shift: Shift::Auto,
            inner_tol: 1e-10,
        }
    }
}

/// Sorted eigenvalues of `op` in the requested mode.
pub fn eigenvalues<O: LinearOperator + ?Sized>(op: &O, mode: EigenMode) -> Result<Vec<f64>, SpectraError> {
    match mode {
        EigenMode::FullDense => dense_eigenvalues(op),
        EigenMode::LowestK(k) => lowest_k(op, k, &KrylovOptions::default()),
    }
}

/// All eigenvalues of the materialized matrix.
pub fn dense_eigenvalues<O: LinearOperator + ?Sized>(op: &O) -> Result<Vec<f64>, SpectraError> {
    let n = op.size();
    if n > DENSE_LIMIT {
        return Err(SpectraError::TooLarge { size: n, limit: DENSE_LIMIT });
    }
    let m = materialize(op);
    let mut ev: Vec<f64> = if op.is_real() {
        let re: DMatrix<f64> = m.map(|z| z.re);
        SymmetricEigen::new(re).eigenvalues.iter().copied().collect()
    } else {
        SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
    };
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(SpectraError::Numeric("dense eigensolver produced non-finite values".into()));
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Orthogonalizes `v` against `basis` twice (classical Gram–Schmidt with
/// reorthogonalization) and returns the remaining norm.
fn orthogonalize(v: &mut [Complex64], basis: &[Vec<Complex64>]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let c = inner(q, v);
            v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= c * qi);
        }
    }
    norm(v)
}

/// The `k` lowest eigenvalues by block Krylov iteration with full
/// reorthogonalization and Rayleigh–Ritz extraction.
///
/// Converged values satisfy `‖Hv − λv‖ ≤ opts.tol ‖v‖`.
pub fn lowest_k<O: LinearOperator + ?Sized>(op: &O, k: usize, opts: &KrylovOptions) -> Result<Vec<f64>, SpectraError> {
    let n = op.size();
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > n {
        return Err(SpectraError::Numeric(format!("requested {k} eigenvalues of a {n}-dimensional operator")));
    }
    let sigma = match opts.shift {
        Shift::None => None,
        Shift::At(s) => Some(s),
        Shift::Auto => op.lower_bound().map(|b| b - 0.05 * (1.0 + b.abs())),
    };
    let cg = CgOptions {
        tol: opts.inner_tol,
        max_iter: 20_000,
    };
    let apply = |x: &[Complex64]| -> Result<Vec<Complex64>, SpectraError> {
        match sigma {
            None => Ok(op.apply(x)),
            Some(s) => solve_shifted(op, s, x, &cg).map(|(y, _)| y),
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let real = op.is_real();
    let random_block = |rng: &mut ChaCha8Rng, count: usize| -> Vec<Vec<Complex64>> {
        (0..count)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
                        Complex64::new(rng.random_range(-1.0..1.0), im)
                    })
                    .collect()
            })
            .collect()
    };

    let block = opts.block.max(1);
    let max_dim = opts.max_dim.min(n).max(k);
    let mut q: Vec<Vec<Complex64>> = Vec::new();
    let mut w: Vec<Vec<Complex64>> = Vec::new();
    let mut t = DMatrix::<Complex64>::zeros(0, 0);
    let mut pending = random_block(&mut rng, block);
    let mut next_check = (k + block).max(2 * block);
    let mut last_residual = f64::INFINITY;

    loop {
        // orthonormalize and expand the basis
        let first_new = q.len();
        for mut v in pending.drain(..) {
            if q.len() >= max_dim {
                break;
            }
            let scale = norm(&v);
            let r = orthogonalize(&mut v, &q);
            if r <= 1e-10 * scale.max(1e-300) {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= r);
            let av = apply(&v)?;
            q.push(v);
            w.push(av);
        }
        let m = q.len();
        if m > t.nrows() {
            let mut grown = DMatrix::<Complex64>::zeros(m, m);
            grown.view_mut((0, 0), (t.nrows(), t.ncols())).copy_from(&t);
            for j in first_new..m {
                for i in 0..=j {
                    let z = inner(&q[i], &w[j]);
                    grown[(i, j)] = z;
                    grown[(j, i)] = z.conj();
                }
            }
            t = grown;
        }
        let exhausted = m == first_new;

        if m >= next_check.min(max_dim) || exhausted || m == n {
            next_check = m + (m / 4).max(2 * block);
            if let Some(vals) = ritz_check(op, &q, &w, &t, k, sigma, opts.tol, &mut last_residual) {
                return Ok(vals);
            }
            if m >= max_dim || m == n {
                return Err(SpectraError::NonConvergence {
                    iterations: m,
                    residual: last_residual,
                });
            }
        }

        pending = if exhausted {
            // invariant subspace reached early: restart with fresh vectors
            random_block(&mut rng, block)
        } else {
            w[first_new..m].to_vec()
        };
    }
}

/// Rayleigh–Ritz on the current basis; returns the `k` lowest values of
/// `H` once all their residuals are below `tol`.
#[allow(clippy::too_many_arguments)]
fn ritz_check<O: LinearOperator + ?Sized>(
    op: &O,
    q: &[Vec<Complex64>],
    w: &[Vec<Complex64>],
    t: &DMatrix<Complex64>,
    k: usize,
    sigma: Option<f64>,
    tol: f64,
    last_residual: &mut f64,
) -> Option<Vec<f64>> {
    let m = q.len();
    if m < k {
        return None;
    }
    let eig = SymmetricEigen::new(t.clone());
    let mut order: Vec<usize> = (0..m).collect();
    match sigma {
        // lowest λ of H
        None => order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])),
        // largest μ = 1/(λ − σ)
        Some(_) => order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a])),
    }
    let n = q[0].len();
    let mut values = Vec::with_capacity(k);
    let mut worst: f64 = 0.0;
    for &idx in order.iter().take(k) {
        let s = eig.eigenvectors.column(idx);
        let mut y = vec![Complex64::default(); n];
        for (j, qj) in q.iter().enumerate() {
            let c = s[j];
            y.iter_mut().zip(qj).for_each(|(yi, qi)| *yi += c * qi);
        }
        let yn = norm(&y);
        let (lambda, res) = match sigma {
            None => {
                let theta = eig.eigenvalues[idx];
                let mut r = vec![Complex64::default(); n];
                for (j, wj) in w.iter().enumerate() {
                    let c = s[j];
                    r.iter_mut().zip(wj).for_each(|(ri, wi)| *ri += c * wi);
                }
                r.iter_mut().zip(&y).for_each(|(ri, yi)| *ri -= theta * yi);
                (theta, norm(&r) / yn)
            }
            Some(_) => {
                if eig.eigenvalues[idx] <= 0.0 {
                    *last_residual = f64::INFINITY;
                    return None;
                }
                let hy = op.apply(&y);
                let lambda = inner(&y, &hy).re / (yn * yn);
                let r: Vec<Complex64> = hy.iter().zip(&y).map(|(a, b)| a - lambda * b).collect();
                (lambda, norm(&r) / yn)
            }
        };
        worst = worst.max(res);
        values.push(lambda);
    }
    *last_residual = worst;
    if worst <= tol {
        values.sort_by(f64::total_cmp);
        Some(values)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{DiscreteOperator, GridSpec, KineticSymbol};
    use std::f64::consts::PI;

    #[test]
    fn free_modes_exact() {
        let g = GridSpec::uniform(1, 8, PI).unwrap();
        let op = DiscreteOperator::from_samples(&KineticSymbol::laplacian(), &g, vec![0.0; 8]).unwrap();
        let ev = dense_eigenvalues(&op).unwrap();
        let expected = [0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0, 16.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        let shifted = dense_eigenvalues(&op.shifted(2.5)).unwrap();
        for (a, b) in shifted.iter().zip(&ev) {
            assert!((a - b - 2.5).abs() < 1e-12);
        }
    }

    fn well(n: usize, l: f64) -> DiscreteOperator {
        let g = GridSpec::uniform(1, n, l).unwrap();
        let v = g.nodes(0).iter().map(|x| -2.0 * (-x * x).exp() + 0.3 * x.tanh()).collect();
        DiscreteOperator::from_samples(&KineticSymbol::laplacian(), &g, v).unwrap()
    }

    #[test]
    fn krylov_matches_dense() {
        let op = well(64, 8.0);
        let dense = dense_eigenvalues(&op).unwrap();
        for shift in [Shift::None, Shift::Auto] {
            let opts = KrylovOptions { shift, ..Default::default() };
            let low = lowest_k(&op, 6, &opts).unwrap();
            for (a, b) in low.iter().zip(&dense) {
                assert!((a - b).abs() <= 1e-8, "{shift:?}: {low:?} vs {dense:?}");
            }
        }
    }

    #[test]
    fn degenerate_free_spectrum() {
        let g = GridSpec::uniform(1, 32, PI).unwrap();
        let op = DiscreteOperator::from_samples(&KineticSymbol::laplacian(), &g, vec![0.0; 32]).unwrap();
        let low = lowest_k(&op, 5, &KrylovOptions::default()).unwrap();
        let expected = [0.0, 1.0, 1.0, 4.0, 4.0];
        for (a, b) in low.iter().zip(expected) {
            assert!((a - b).abs() < 1e-8, "{low:?}");
        }
    }

    #[test]
    fn dense_limit_enforced() {
        let g = GridSpec::uniform(1, 8192, 10.0).unwrap();
        let op = DiscreteOperator::from_samples(&KineticSymbol::laplacian(), &g, vec![0.0; 8192]).unwrap();
        assert!(matches!(dense_eigenvalues(&op), Err(SpectraError::TooLarge { .. })));
    }
}
