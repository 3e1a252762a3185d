//! Dense diagnostic of the position–momentum limit property of a
//! resolvent `R = (H + shift)^{-1}`: `‖(T_x − 1) R‖ → 0` as `x → 0` and
//! `‖[M_k, R]‖ → 0` as `k → 0`.

use super::operator::materialize;
use super::{DiscreteOperator, SpectraError};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest grid accepted (dense inverse plus SVDs).
pub const PMLP_LIMIT: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationProbe {
    pub x: Vec<f64>,
    /// `x` rounded to the nearest grid translation.
    pub x_grid: Vec<f64>,
    pub norm: f64,
    /// `|x_grid| · ‖ |p| R ‖`
    pub gradient_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumProbe {
    pub k: Vec<f64>,
    /// `k` rounded to the nearest dual-lattice point, so that `M_k` is a
    /// periodic multiplier.
    pub k_grid: Vec<f64>,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmlpReport {
    pub shift: f64,
    pub translations: Vec<TranslationProbe>,
    pub momenta: Vec<MomentumProbe>,
    /// Both sequences decrease along the given (decreasing) probes.
    pub decreasing: bool,
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14)
}

/// Runs the diagnostic with `R = (H + shift)^{-1}`; `shift` must make
/// `H + shift` invertible.
pub fn pm_limit_diagnostic(
    op: &DiscreteOperator,
    shift: f64,
    x_small: &[Vec<f64>],
    k_small: &[Vec<f64>],
) -> Result<PmlpReport, SpectraError> {
    let grid = op.grid();
    let n = grid.len();
    let d = grid.dim();
    if n > PMLP_LIMIT {
        return Err(SpectraError::TooLarge { size: n, limit: PMLP_LIMIT });
    }
    if x_small.iter().chain(k_small).any(|v| v.len() != d) {
        return Err(SpectraError::DimensionMismatch {
            expected: d,
            found: x_small.iter().chain(k_small).map(Vec::len).find(|&l| l != d).unwrap_or(0),
        });
    }
    let a = materialize(op) + DMatrix::<Complex64>::identity(n, n).scale(shift);
    let r = a
        .try_inverse()
        .ok_or_else(|| SpectraError::Numeric("H + shift is singular".into()))?;

    // ‖ |p| R ‖, applied column by column in Fourier space
    let kabs: Vec<f64> = grid
        .freq_vectors()
        .iter()
        .map(|k| k.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let mut pr = r.clone();
    for mut col in pr.column_iter_mut() {
        let mut v: Vec<Complex64> = col.iter().copied().collect();
        op.fft().forward(&mut v);
        v.iter_mut().zip(&kabs).for_each(|(z, k)| *z *= k);
        op.fft().inverse(&mut v);
        col.iter_mut().zip(v).for_each(|(c, z)| *c = z);
    }
    let grad_norm = spectral_norm(&pr);

    let translations: Vec<TranslationProbe> = x_small
        .iter()
        .map(|x| {
            let steps: Vec<i64> = (0..d).map(|a| (x[a] / grid.spacing(a)).round() as i64).collect();
            let x_grid: Vec<f64> = (0..d).map(|a| steps[a] as f64 * grid.spacing(a)).collect();
            // (T_x f)(y) = f(y − x): row i of T R is row (i − s) of R
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                let idx = grid.multi_index(i);
                let src: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .map(|(a, &j)| {
                        let na = grid.points()[a] as i64;
                        (j as i64 - steps[a]).rem_euclid(na) as usize
                    })
                    .collect();
                let si = grid.flat_index(&src);
                for j in 0..n {
                    m[(i, j)] = r[(si, j)] - r[(i, j)];
                }
            }
            let xn = x_grid.iter().map(|v| v * v).sum::<f64>().sqrt();
            TranslationProbe {
                x: x.clone(),
                x_grid,
                norm: spectral_norm(&m),
                gradient_bound: xn * grad_norm,
            }
        })
        .collect();

    let nodes = grid.node_coords();
    let momenta: Vec<MomentumProbe> = k_small
        .iter()
        .map(|k| {
            let k_grid: Vec<f64> = (0..d)
                .map(|a| (k[a] / grid.base_freq(a)).round() * grid.base_freq(a))
                .collect();
            let phase: Vec<Complex64> = nodes
                .iter()
                .map(|x| Complex64::from_polar(1.0, x.iter().zip(&k_grid).map(|(a, b)| a * b).sum()))
                .collect();
            let m = DMatrix::from_fn(n, n, |i, j| (phase[i] - phase[j]) * r[(i, j)]);
            MomentumProbe {
                k: k.clone(),
                k_grid,
                norm: spectral_norm(&m),
            }
        })
        .collect();

    let decreasing = non_increasing(&translations.iter().map(|t| t.norm).collect::<Vec<_>>())
        && non_increasing(&momenta.iter().map(|t| t.norm).collect::<Vec<_>>());
    Ok(PmlpReport {
        shift,
        translations,
        momenta,
        decreasing,
    })
}
