//! Spectra of operators that are translation invariant along a subspace.
//!
//! If `H = h(p) + v` with `v(x + c) = v(x)` for all `c ∈ C`, the partial
//! Fourier transform along `C` decomposes `H` into the fibers
//! `H(k_∥) = h(k_∥, p_⊥) + v(q_⊥)` acting on `C^⊥`, and
//! `σ(H) = ⋃_{k_∥} σ(H(k_∥))`.

use super::eigen::{dense_eigenvalues, lowest_k, KrylovOptions, DENSE_LIMIT};
use super::kinetic::shell_points;
use super::{DiscreteOperator, GridSpec, KineticSymbol, SpectraError, SpectrumSet};
use crate::geometry::Subspace;
use crate::interactions::{Element, InvarianceSampling, TAIL_OUTER};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Floor of the default merge tolerance.
pub const MIN_MERGE_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FiberConfig {
    /// Longitudinal samples per axis of `C` (forced odd so `k_∥ = 0` is
    /// included).
    pub longitudinal_samples: usize,
    /// Absolute spectral window; when absent it is
    /// `[bottom − below, bottom + above]` around the computed bottom.
    pub window: Option<(f64, f64)>,
    pub below: f64,
    pub above: f64,
    pub merge_tol: Option<f64>,
    /// Eigenvalue cap for transverse operators too large for the dense path.
    pub max_iterative_eigs: usize,
}

impl Default for FiberConfig {
    fn default() -> Self {
        FiberConfig {
            longitudinal_samples: 33,
            window: None,
            below: 1.0,
            above: 20.0,
            merge_tol: None,
            max_iterative_eigs: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberSpectrum {
    pub set: SpectrumSet,
    pub window: (f64, f64),
    /// Bottom of the computed spectrum (before clipping).
    pub bottom: f64,
    /// Longitudinal frequency cutoff `K`.
    pub cutoff: f64,
    pub merge_tol: f64,
    pub longitudinal_samples: usize,
    /// Closed-form interval for a constant potential.
    pub analytic: bool,
    pub warnings: Vec<String>,
}

fn combine(par: &[Vec<f64>], perp: &[Vec<f64>], kp: &[f64], kt: &[f64], n: usize) -> Vec<f64> {
    let mut k = vec![0.0; n];
    for (c, e) in kp.iter().zip(par).chain(kt.iter().zip(perp)) {
        for (ki, ei) in k.iter_mut().zip(e) {
            *ki += c * ei;
        }
    }
    k
}

/// Discrete approximation of `σ(h(p) + u)` for `u` invariant along `c`.
///
/// A constant `u` yields the interval `[u + inf h, window top]` directly.
/// Otherwise the transverse operator is diagonalized at every
/// longitudinal sample and band `n` contributes
/// `[min_k E_n(k), max_k E_n(k)]`; for `h = |k|²` a single fiber suffices
/// because `E_n(k_∥) = E_n(0) + |k_∥|²`.
pub fn fiber_spectrum(
    h: &KineticSymbol,
    u: &Element,
    c: &Subspace,
    transverse: Option<&GridSpec>,
    cfg: &FiberConfig,
) -> Result<FiberSpectrum, SpectraError> {
    fiber_spectrum_divergence(h, u, None, c, transverse, cfg)
}

/// Sampled coefficient table at transverse nodes.
type SampledTable = Vec<(usize, usize, Vec<f64>)>;

/// As [`fiber_spectrum`], with an additional divergence-form part
/// `Σ p^μ g_{μν} p^ν` whose coefficients are also invariant along `c`.
///
/// Along the fiber `p^μ = a_μ(k_∥) + Σ_i b_{μi} p_⊥^i` with
/// `a = (1, k_∥ e_∥)` and `b_{μi} = (e_⊥^i)_μ`, which turns the form into a
/// transverse divergence-form operator.
pub fn fiber_spectrum_divergence(
    h: &KineticSymbol,
    u: &Element,
    g: Option<&[Vec<Option<Element>>]>,
    c: &Subspace,
    transverse: Option<&GridSpec>,
    cfg: &FiberConfig,
) -> Result<FiberSpectrum, SpectraError> {
    let n = u.space().dim();
    if c.space().dim() != n {
        return Err(SpectraError::DimensionMismatch {
            expected: n,
            found: c.space().dim(),
        });
    }
    h.check_proper(n)?;
    if let Some(g) = g {
        if g.len() != n + 1 || g.iter().any(|r| r.len() != n + 1) {
            return Err(SpectraError::InvalidCoefficients(format!("need a {0}x{0} coefficient table", n + 1)));
        }
    }
    let coeffs: Vec<(usize, usize, &Element)> = g
        .map(|g| {
            (0..=n)
                .flat_map(|mu| (0..=n).map(move |nu| (mu, nu)))
                .filter_map(|(mu, nu)| g[mu][nu].as_ref().map(|e| (mu, nu, e)))
                .collect()
        })
        .unwrap_or_default();

    let constant_coeffs: Option<Vec<(usize, usize, f64)>> =
        coeffs.iter().map(|&(mu, nu, e)| e.as_constant().map(|v| (mu, nu, v))).collect();
    if let (Some(value), Some(cc)) = (u.as_constant(), &constant_coeffs) {
        let bottom = value + constant_symbol_min(h, cc, n);
        let window = cfg.window.unwrap_or((bottom - cfg.below, bottom + cfg.above));
        let tol = cfg.merge_tol.unwrap_or(MIN_MERGE_TOL);
        let mut set = SpectrumSet::from_intervals(vec![(bottom, window.1.max(bottom))], tol).clip(window.0, window.1);
        set.source_count = 1;
        return Ok(FiberSpectrum {
            set,
            window,
            bottom,
            cutoff: f64::INFINITY,
            merge_tol: tol,
            longitudinal_samples: 0,
            analytic: true,
            warnings: Vec::new(),
        });
    }

    let sampling = InvarianceSampling::default();
    let defect = coeffs
        .iter()
        .map(|(_, _, e)| e.invariance_defect(c, &sampling))
        .fold(u.invariance_defect(c, &sampling), f64::max);
    if defect > crate::interactions::INVARIANCE_TOL {
        return Err(SpectraError::InvarianceViolated { defect });
    }
    let par = c.orthonormal_basis();
    let perp = c.orthogonal_complement().orthonormal_basis();
    if perp.is_empty() {
        return Err(SpectraError::Numeric(
            "a non-constant potential cannot be invariant along the whole space".into(),
        ));
    }
    let Some(grid) = transverse else {
        return Err(SpectraError::InvalidGrid("a transverse grid is required".into()));
    };
    if grid.dim() != perp.len() {
        return Err(SpectraError::DimensionMismatch {
            expected: perp.len(),
            found: grid.dim(),
        });
    }
    let mut warnings = Vec::new();
    let box_min = grid.halflengths().iter().copied().fold(f64::INFINITY, f64::min);
    if box_min < 10.0 * TAIL_OUTER {
        warnings.push(format!(
            "box half-length {box_min} is below ten times the tail cutoff radius {TAIL_OUTER}"
        ));
    }

    let nodes: Vec<Vec<f64>> = grid
        .node_coords()
        .iter()
        .map(|q| combine(&par, &perp, &[], q, n))
        .collect();
    let sample = |e: &Element| -> Result<Vec<f64>, SpectraError> {
        nodes
            .iter()
            .map(|x| e.try_eval(x))
            .collect::<Result<_, _>>()
            .map_err(|e| SpectraError::Numeric(e.to_string()))
    };
    let potential = sample(u)?;
    let g_samples: Vec<(usize, usize, Vec<f64>)> = coeffs
        .iter()
        .map(|&(mu, nu, e)| sample(e).map(|s| (mu, nu, s)))
        .collect::<Result<_, _>>()?;
    let v_min = potential.iter().copied().fold(f64::INFINITY, f64::min);
    let t = perp.len();
    // b[μ][i]: weight of p_⊥^i in p^μ
    let b: Vec<Vec<f64>> = (0..=n)
        .map(|mu| (0..t).map(|i| if mu == 0 { 0.0 } else { perp[i][mu - 1] }).collect())
        .collect();
    let a_of = |kp: &[f64]| -> Vec<f64> {
        let k = combine(&par, &perp, kp, &[], n);
        std::iter::once(1.0).chain(k).collect()
    };
    let transverse_table = |kp: &[f64]| -> SampledTable {
        if g_samples.is_empty() {
            return Vec::new();
        }
        let a = a_of(kp);
        let len = grid.len();
        let mut table: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; len]; t + 1]; t + 1];
        for (mu, nu, s) in &g_samples {
            let left: Vec<f64> = std::iter::once(a[*mu]).chain(b[*mu].iter().copied()).collect();
            let right: Vec<f64> = std::iter::once(a[*nu]).chain(b[*nu].iter().copied()).collect();
            for (i, li) in left.iter().enumerate() {
                for (j, rj) in right.iter().enumerate() {
                    let w = li * rj;
                    if w != 0.0 {
                        table[i][j].iter_mut().zip(s).for_each(|(x, y)| *x += w * y);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (i, row) in table.into_iter().enumerate() {
            for (j, samples) in row.into_iter().enumerate() {
                if samples.iter().any(|x| *x != 0.0) {
                    out.push((i, j, samples));
                }
            }
        }
        out
    };
    let freqs = grid.freq_vectors();
    let zero_par = vec![0.0; par.len()];
    let fiber = |kp: &[f64]| -> Result<DiscreteOperator, SpectraError> {
        let symbol = freqs.iter().map(|kt| h.eval(&combine(&par, &perp, kp, kt, n))).collect();
        DiscreteOperator::from_symbol(grid, symbol, potential.clone())?.with_divergence_samples(transverse_table(kp))
    };
    let fiber_eigs = |op: &DiscreteOperator, top: Option<f64>| -> Result<Vec<f64>, SpectraError> {
        if op.grid().len() <= DENSE_LIMIT {
            return dense_eigenvalues(op);
        }
        let mut count = 32usize.min(op.grid().len());
        loop {
            let ev = lowest_k(op, count, &KrylovOptions::default())?;
            let reached = top.is_some_and(|t| ev.last().is_some_and(|l| *l >= t));
            if reached || count >= cfg.max_iterative_eigs {
                return Ok(ev);
            }
            count = (2 * count).min(cfg.max_iterative_eigs);
        }
    };

    // spacing of the transverse discretization
    let h0 = h.eval(&combine(&par, &perp, &zero_par, &vec![0.0; t], n));
    let gap = (0..t)
        .map(|a| {
            let mut kt = vec![0.0; t];
            kt[a] = grid.base_freq(a);
            h.eval(&combine(&par, &perp, &zero_par, &kt, n)) - h0
        })
        .fold(f64::INFINITY, f64::min);
    let tol = cfg.merge_tol.unwrap_or((2.0 * gap).max(MIN_MERGE_TOL));

    let provisional_top = cfg.window.map(|w| w.1);
    let base = fiber_eigs(&fiber(&zero_par)?, provisional_top)?;
    let top = provisional_top.unwrap_or(base[0] + cfg.above);
    // |k_∥| ≤ K with (kinetic + zeroth-order coefficient)(K e_∥) + min v ≥ top
    let along = |kk: f64| {
        let mut kp = zero_par.clone();
        kp[0] = kk;
        let a = a_of(&kp);
        let g00 = (0..grid.len())
            .map(|i| {
                g_samples
                    .iter()
                    .map(|(mu, nu, s)| a[*mu] * a[*nu] * s[i])
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        let g00 = if g_samples.is_empty() { 0.0 } else { g00 };
        h.eval(&combine(&par, &perp, &kp, &vec![0.0; t], n)) + g00 + v_min
    };
    let mut hi = 1.0;
    while along(hi) < top {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(SpectraError::Numeric("longitudinal cutoff does not reach the window top".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if along(mid) >= top {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let cutoff = hi;

    let (bands, samples): (Vec<(f64, f64)>, usize) = if h.is_euclidean_quadratic() && g_samples.is_empty() {
        (base.iter().map(|&e| (e, e + cutoff * cutoff)).collect(), 1)
    } else {
        let m = cfg.longitudinal_samples.max(1) | 1;
        let line: Vec<f64> = (0..m)
            .map(|i| if m == 1 { 0.0 } else { -cutoff + 2.0 * cutoff * i as f64 / (m - 1) as f64 })
            .collect();
        let points: Vec<Vec<f64>> = (0..m.pow(par.len() as u32))
            .map(|mut idx| {
                (0..par.len())
                    .map(|_| {
                        let v = line[idx % m];
                        idx /= m;
                        v
                    })
                    .collect()
            })
            .collect();
        let spectra: Vec<Vec<f64>> = points
            .par_iter()
            .map(|kp| fiber_eigs(&fiber(kp)?, Some(top)))
            .collect::<Result<_, _>>()?;
        let count = spectra.iter().map(Vec::len).min().unwrap_or(0);
        let bands = (0..count)
            .map(|j| {
                spectra.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s[j]), b.max(s[j])))
            })
            .collect();
        (bands, points.len())
    };
    let bottom = bands.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    let window = cfg.window.unwrap_or((bottom - cfg.below, bottom + cfg.above));
    let mut set = SpectrumSet::from_intervals(bands, tol).clip(window.0, window.1);
    set.source_count = base.len() * samples;
    Ok(FiberSpectrum {
        set,
        window,
        bottom,
        cutoff,
        merge_tol: tol,
        longitudinal_samples: samples,
        analytic: false,
        warnings,
    })
}

/// `inf_k [h(k) + Σ k^μ g_{μν} k^ν]` (with `k^0 = 1`) for constant
/// coefficients, sampled on geometric shells.
fn constant_symbol_min(h: &KineticSymbol, g: &[(usize, usize, f64)], n: usize) -> f64 {
    if g.is_empty() {
        return h.min_estimate(n);
    }
    let s = |k: &[f64]| {
        let kk: Vec<f64> = std::iter::once(1.0).chain(k.iter().copied()).collect();
        h.eval(k) + g.iter().map(|&(mu, nu, v)| kk[mu] * v * kk[nu]).sum::<f64>()
    };
    let dirs = shell_points(n);
    (0..=60)
        .flat_map(|i| {
            let r = 1e-3 * 1.25f64.powi(i);
            dirs.iter().map(move |u| u.iter().map(|x| x * r).collect::<Vec<f64>>())
        })
        .map(|k| s(&k))
        .fold(s(&vec![0.0; n]), f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Space;
    use crate::interactions::RadialFunction;

    fn s2() -> Space {
        Space::new(2).unwrap()
    }

    #[test]
    fn free_plane() {
        let c = Subspace::from_vectors(s2(), &[vec![0, 1]]).unwrap();
        let g = GridSpec::uniform(1, 256, 40.0).unwrap();
        let f = fiber_spectrum(&KineticSymbol::laplacian(), &Element::zero(s2()), &c, Some(&g), &FiberConfig::default())
            .unwrap();
        assert_eq!(f.set.intervals().len(), 1);
        assert!(f.bottom.abs() < 1e-12);
        assert_eq!(f.set.intervals()[0], (0.0, 20.0));
    }

    #[test]
    fn constant_is_analytic() {
        let u = Element::constant(s2(), 1.5);
        let f = fiber_spectrum(&KineticSymbol::laplacian(), &u, &Subspace::full(s2()), None, &FiberConfig::default())
            .unwrap();
        assert!(f.analytic);
        assert_eq!(f.set.intervals(), &[(1.5, 21.5)]);
        let rel = KineticSymbol::relativistic(vec![1.0, 0.5]);
        let f = fiber_spectrum(&rel, &u, &Subspace::full(s2()), None, &FiberConfig::default()).unwrap();
        assert_eq!(f.set.inf(), Some(3.0));
    }

    #[test]
    fn gaussian_trough_bottom() {
        let y = Subspace::from_vectors(s2(), &[vec![0, 1]]).unwrap();
        let u = Element::from_parts(y.clone(), RadialFunction::gaussian(1, -2.0, 1.0)).unwrap();
        let g = GridSpec::uniform(1, 1024, 30.0).unwrap();
        let f = fiber_spectrum(&KineticSymbol::laplacian(), &u, &y, Some(&g), &FiberConfig::default()).unwrap();
        assert!((f.bottom + 0.954_784).abs() < 2e-3, "{}", f.bottom);
        assert_eq!(f.set.intervals().len(), 1);
    }

    #[test]
    fn relativistic_fibers_sample_longitudinally() {
        let y = Subspace::from_vectors(s2(), &[vec![0, 1]]).unwrap();
        let u = Element::from_parts(y.clone(), RadialFunction::gaussian(1, -1.0, 1.0)).unwrap();
        let g = GridSpec::uniform(1, 128, 20.0).unwrap();
        let h = KineticSymbol::relativistic(vec![1.0, 1.0]);
        let cfg = FiberConfig {
            longitudinal_samples: 9,
            ..Default::default()
        };
        let f = fiber_spectrum(&h, &u, &y, Some(&g), &cfg).unwrap();
        assert_eq!(f.longitudinal_samples, 9);
        assert!(f.bottom < 2.0 && f.bottom > 1.0);
    }

    #[test]
    fn divergence_fiber_matches_scaled_laplacian() {
        // p₁ 2 p₁ + p₂ 2 p₂ = 2|p|², so a trough u gives 2 E(u/2)
        let y = Subspace::from_vectors(s2(), &[vec![0, 1]]).unwrap();
        let u = Element::from_parts(y.clone(), RadialFunction::gaussian(1, -2.0, 1.0)).unwrap();
        let two = Some(Element::constant(s2(), 2.0));
        let table = vec![vec![None, None, None], vec![None, two.clone(), None], vec![None, None, two]];
        let zero = KineticSymbol::Custom {
            expr: crate::interactions::BoundaryExpr::constant(0.0),
        };
        let g = GridSpec::uniform(1, 256, 20.0).unwrap();
        let cfg = FiberConfig {
            longitudinal_samples: 5,
            ..Default::default()
        };
        // the zero symbol is not proper, so use h = |k|² and compare with 3|p|²
        assert!(fiber_spectrum_divergence(&zero, &u, Some(&table), &y, Some(&g), &cfg).is_err());
        let f = fiber_spectrum_divergence(&KineticSymbol::laplacian(), &u, Some(&table), &y, Some(&g), &cfg).unwrap();
        let half = Element::from_parts(y.clone(), RadialFunction::gaussian(1, -2.0 / 3.0, 1.0)).unwrap();
        let reference = fiber_spectrum(&KineticSymbol::laplacian(), &half, &y, Some(&g), &FiberConfig::default()).unwrap();
        assert!((f.bottom - 3.0 * reference.bottom).abs() < 1e-8, "{} vs {}", f.bottom, reference.bottom);
    }

    #[test]
    fn invariance_enforced() {
        let y = Subspace::from_vectors(s2(), &[vec![0, 1]]).unwrap();
        let x = Subspace::from_vectors(s2(), &[vec![1, 0]]).unwrap();
        let u = Element::from_parts(y, RadialFunction::gaussian(1, -2.0, 1.0)).unwrap();
        let g = GridSpec::uniform(1, 64, 20.0).unwrap();
        assert!(matches!(
            fiber_spectrum(&KineticSymbol::laplacian(), &u, &x, Some(&g), &FiberConfig::default()),
            Err(SpectraError::InvarianceViolated { .. })
        ));
    }
}
