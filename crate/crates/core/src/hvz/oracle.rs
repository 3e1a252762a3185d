//! Independent numerical checks of the localization picture: eigenvalue
//! accumulation in growing boxes, and strong resolvent convergence of
//! translated Hamiltonians toward their localizations.

use super::{localize, HamiltonianSpec, HvzError};
use crate::geometry::Direction;
use crate::spectra::{
    dense_eigenvalues, lowest_k, solve_shifted, CgOptions, DiscreteOperator, GridSpec, KineticSymbol, KrylovOptions,
    Shift, SpectraError,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Eigenvalues computed per box.
pub const TRUNCATION_EIGS: usize = 30;

/// Largest box diagonalized densely by the truncation oracle.
const ORACLE_DENSE_LIMIT: usize = 1024;

/// Eigenvalues of the full truncated Hamiltonian on one box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationBox {
    pub grid: GridSpec,
    pub eigenvalues: Vec<f64>,
    pub dense: bool,
}

/// Number of eigenvalues `≤ energy` in each box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub energy: f64,
    pub counts: Vec<usize>,
    pub growing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub boxes: Vec<TruncationBox>,
    /// Counts are meaningful only up to the smallest top eigenvalue.
    pub valid_up_to: f64,
    pub rows: Vec<CountRow>,
    /// Smallest energy whose count keeps growing across all doublings.
    pub threshold: Option<f64>,
}

impl TruncationReport {
    /// `|threshold − reference|`, infinite when no threshold was found.
    pub fn deviation(&self, reference: f64) -> f64 {
        self.threshold.map_or(f64::INFINITY, |t| (t - reference).abs())
    }
}

fn growing(counts: &[usize]) -> bool {
    counts.last().is_some_and(|&c| c >= 3)
        && counts.windows(2).all(|w| {
            if w[0] == 0 {
                w[1] > 0
            } else {
                w[1] as f64 > 1.5 * w[0] as f64
            }
        })
}

/// Full truncated operator of `h` on `grid`.
pub(crate) fn truncated_operator(h: &HamiltonianSpec, grid: &GridSpec) -> Result<DiscreteOperator, HvzError> {
    let op = DiscreteOperator::assemble(&h.kinetic, &h.potential, grid)?;
    let Some(g) = &h.divergence else { return Ok(op) };
    let nodes = grid.node_coords();
    let mut terms = Vec::new();
    for (mu, row) in g.iter().enumerate() {
        for (nu, e) in row.iter().enumerate() {
            let Some(e) = e else { continue };
            let samples = nodes
                .iter()
                .map(|x| e.try_eval(x))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| SpectraError::Numeric(e.to_string()))?;
            terms.push((mu, nu, samples));
        }
    }
    Ok(op.with_divergence_samples(terms)?)
}

/// Lowest `k` eigenvalues of the full Hamiltonian truncated to `grid`.
pub fn truncated_box(h: &HamiltonianSpec, grid: &GridSpec, k: usize) -> Result<TruncationBox, HvzError> {
    h.validate()?;
    let op = truncated_operator(h, grid)?;
    let n = grid.len();
    let k = k.min(n);
    let (eigenvalues, dense) = if n <= ORACLE_DENSE_LIMIT {
        (dense_eigenvalues(&op)?[..k].to_vec(), true)
    } else {
        // the Krylov basis dominates memory on large boxes
        let max_dim = (12_000_000 / n).clamp(4 * k, 600);
        let ground = lowest_k(&op, 1, &KrylovOptions { max_dim, ..KrylovOptions::default() })?[0];
        // shift-invert just below the ground state separates the
        // low cluster far better than the crude lower bound
        let opts = KrylovOptions {
            max_dim,
            shift: Shift::At(ground - 0.05 * (1.0 + ground.abs())),
            ..KrylovOptions::default()
        };
        (lowest_k(&op, k, &opts)?, false)
    };
    Ok(TruncationBox {
        grid: grid.clone(),
        eigenvalues,
        dense,
    })
}

/// Lowest [`TRUNCATION_EIGS`] eigenvalues of `H` on each box, and the
/// energy above which their counts grow without bound as the box grows
/// (count ratio `> 1.5` across every consecutive pair of boxes, with at
/// least three eigenvalues in the largest box). Boxes must be listed in
/// increasing size.
pub fn truncation_oracle(h: &HamiltonianSpec, grids: &[GridSpec]) -> Result<TruncationReport, HvzError> {
    h.validate()?;
    if h.space.dim() > 2 {
        return Err(HvzError::InvalidSpec("the truncation oracle supports dimensions 1 and 2".into()));
    }
    if grids.len() < 2 {
        return Err(HvzError::InvalidSpec("at least two boxes are needed".into()));
    }
    let boxes = grids
        .iter()
        .map(|grid| truncated_box(h, grid, TRUNCATION_EIGS))
        .collect::<Result<Vec<_>, HvzError>>()?;

    let valid_up_to = boxes
        .iter()
        .map(|b| b.eigenvalues.last().copied().unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    let mut energies: Vec<f64> = boxes
        .iter()
        .flat_map(|b| b.eigenvalues.iter().copied())
        .filter(|&e| e <= valid_up_to)
        .collect();
    energies.sort_by(f64::total_cmp);
    energies.dedup();
    let rows: Vec<CountRow> = energies
        .into_iter()
        .map(|energy| {
            let counts: Vec<usize> = boxes
                .iter()
                .map(|b| b.eigenvalues.iter().filter(|&&e| e <= energy).count())
                .collect();
            CountRow {
                energy,
                growing: growing(&counts),
                counts,
            }
        })
        .collect();
    let threshold = rows.iter().find(|r| r.growing).map(|r| r.energy);
    Ok(TruncationReport {
        boxes,
        valid_up_to,
        rows,
        threshold,
    })
}

/// The operator the translated Hamiltonians are compared with.
#[derive(Clone, Debug, PartialEq)]
pub enum LimitOperator {
    /// `h(p) + v_α` with `v_α` sampled at the grid nodes.
    Potential(Vec<f64>),
    /// The localization is `∞`: its resolvent is `0`.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventLimitRow {
    pub radius: f64,
    /// `‖(H_r + c)^{-1} f‖` per test vector.
    pub norms: Vec<f64>,
    /// `‖(H_r + c)^{-1} f − (H_α + c)^{-1} f‖` per test vector.
    pub errors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventLimitReport {
    pub shift: f64,
    /// `‖(H_α + c)^{-1} f‖` per test vector (zeros for `∞`).
    pub limit_norms: Vec<f64>,
    /// Errors of the untranslated operator (`r = 0`).
    pub baseline: Vec<f64>,
    pub rows: Vec<ResolventLimitRow>,
    /// Errors are non-increasing in `r` for every test vector.
    pub decreasing: bool,
}

impl ResolventLimitReport {
    /// Largest error at the largest radius.
    pub fn final_error(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.errors.iter().copied().fold(0.0, f64::max))
    }
}

/// Normalized Gaussian test vectors: centred widths 1 and 2, and width 1
/// shifted by one unit along the first axis.
pub fn test_vectors(grid: &GridSpec) -> Vec<Vec<f64>> {
    let nodes = grid.node_coords();
    let bump = |centre: f64, width: f64| -> Vec<f64> {
        let v: Vec<f64> = nodes
            .iter()
            .map(|x| {
                let r2: f64 = x.iter().enumerate().map(|(a, xi)| {
                    let c = if a == 0 { centre } else { 0.0 };
                    (xi - c) * (xi - c)
                }).sum();
                (-r2 / (2.0 * width * width)).exp()
            })
            .collect();
        let n = (v.iter().map(|x| x * x).sum::<f64>() * grid.cell_volume()).sqrt();
        v.into_iter().map(|x| x / n).collect()
    };
    vec![bump(0.0, 1.0), bump(0.0, 2.0), bump(1.0, 1.0)]
}

fn l2_norm(grid: &GridSpec, v: &[Complex64]) -> f64 {
    (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_volume()).sqrt()
}

fn solve_all(op: &DiscreteOperator, c: f64, tests: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, SpectraError> {
    let opts = CgOptions::default();
    tests.iter().map(|f| solve_shifted(op, -c, f, &opts).map(|(x, _)| x)).collect()
}

/// Compares `(H_r + c)^{-1} f` with `(H_α + c)^{-1} f`, where `H_r` has
/// the translated potential `x ↦ v(r α̂ + x)` on `grid`. Norms are
/// continuum `L²` norms (node sums times the cell volume).
#[allow(clippy::too_many_arguments)]
pub fn resolvent_limit_check_fn<F>(
    h: &KineticSymbol,
    grid: &GridSpec,
    v: F,
    alpha: &[f64],
    radii: &[f64],
    tests: &[Vec<f64>],
    c: f64,
    limit: &LimitOperator,
) -> Result<ResolventLimitReport, SpectraError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = grid.dim();
    if alpha.len() != d {
        return Err(SpectraError::DimensionMismatch {
            expected: d,
            found: alpha.len(),
        });
    }
    if tests.iter().any(|f| f.len() != grid.len()) {
        return Err(SpectraError::DimensionMismatch {
            expected: grid.len(),
            found: tests.iter().map(Vec::len).find(|&l| l != grid.len()).unwrap_or(0),
        });
    }
    let nodes = grid.node_coords();
    let tests: Vec<Vec<Complex64>> = tests
        .iter()
        .map(|f| f.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    let free = DiscreteOperator::from_samples(h, grid, vec![0.0; grid.len()])?;
    let limit_solutions: Vec<Vec<Complex64>> = match limit {
        LimitOperator::Potential(samples) => solve_all(&free.with_potential(samples.clone())?, c, &tests)?,
        LimitOperator::Infinite => tests.iter().map(|f| vec![Complex64::default(); f.len()]).collect(),
    };
    let limit_norms: Vec<f64> = limit_solutions.iter().map(|x| l2_norm(grid, x)).collect();

    let at_radius = |r: f64| -> Result<ResolventLimitRow, SpectraError> {
        let samples: Vec<f64> = nodes
            .iter()
            .map(|x| {
                let y: Vec<f64> = x.iter().zip(alpha).map(|(xi, ai)| xi + r * ai).collect();
                v(&y)
            })
            .collect();
        let sols = solve_all(&free.with_potential(samples)?, c, &tests)?;
        let norms = sols.iter().map(|x| l2_norm(grid, x)).collect();
        let errors = sols
            .iter()
            .zip(&limit_solutions)
            .map(|(a, b)| {
                let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                l2_norm(grid, &diff)
            })
            .collect();
        Ok(ResolventLimitRow { radius: r, norms, errors })
    };
    let baseline = at_radius(0.0)?.errors;
    let rows = radii
        .par_iter()
        .map(|&r| at_radius(r))
        .collect::<Result<Vec<_>, _>>()?;
    let decreasing = (0..tests.len()).all(|i| {
        rows.windows(2)
            .all(|w| w[1].errors[i] <= w[0].errors[i] * (1.0 + 1e-9) + 1e-12)
    });
    Ok(ResolventLimitReport {
        shift: c,
        limit_norms,
        baseline,
        rows,
        decreasing,
    })
}

/// [`resolvent_limit_check_fn`] for a Hamiltonian with an element
/// potential, compared with its symbolic localization `H_α`. The shift
/// `c` makes every sampled operator positive.
pub fn resolvent_limit_check(
    h: &HamiltonianSpec,
    alpha: &Direction,
    radii: &[f64],
    tests: &[Vec<f64>],
    grid: &GridSpec,
) -> Result<ResolventLimitReport, HvzError> {
    h.validate()?;
    if h.space.dim() > 2 || grid.dim() != h.space.dim() {
        return Err(HvzError::InvalidSpec("resolvent limits need a grid of the space dimension (≤ 2)".into()));
    }
    if h.divergence.is_some() {
        return Err(HvzError::InvalidSpec("resolvent limits support potentials only".into()));
    }
    let loc = localize(h, alpha);
    let nodes = grid.node_coords();
    let limit: Vec<f64> = nodes.iter().map(|x| loc.localized.potential.eval(x)).collect();
    let u = &h.potential;
    let mut vmin = limit.iter().copied().fold(0.0, f64::min);
    for &r in std::iter::once(&0.0).chain(radii) {
        for x in &nodes {
            let y: Vec<f64> = x.iter().zip(alpha.unit()).map(|(xi, ai)| xi + r * ai).collect();
            vmin = vmin.min(u.eval(&y));
        }
    }
    let c = 1.0 - vmin - h.kinetic.min_estimate(h.space.dim()).min(0.0);
    Ok(resolvent_limit_check_fn(
        &h.kinetic,
        grid,
        |x| u.eval(x),
        alpha.unit(),
        radii,
        tests,
        c,
        &LimitOperator::Potential(limit),
    )?)
}

/// Values of `v` along a ray at doubling radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceProbe {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// `|v|` exceeds `100` and grows by `≥ 1.5×` over each of the last
    /// three doublings: the localization along the ray is `∞`.
    pub diverges: bool,
}

/// Detects a potential that is unbounded along the ray `r α̂`, whose
/// localization is the `∞` operator (empty spectrum).
pub fn detect_infinite_localization<F: Fn(&[f64]) -> f64>(v: F, alpha: &[f64]) -> DivergenceProbe {
    let radii: Vec<f64> = (0..8).map(|i| 10.0 * 2f64.powi(i)).collect();
    let values: Vec<f64> = radii
        .iter()
        .map(|r| {
            let x: Vec<f64> = alpha.iter().map(|a| r * a).collect();
            v(&x)
        })
        .collect();
    let tail = &values[values.len() - 4..];
    let diverges = tail.last().is_some_and(|v| v.abs() > 100.0)
        && tail.windows(2).all(|w| w[1].abs() >= 1.5 * w[0].abs());
    DivergenceProbe { radii, values, diverges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Space, Subspace};
    use crate::interactions::{BoundaryExpr, Element, RadialFunction};

    fn tanh_1d() -> HamiltonianSpec {
        let s = Space::new(1).unwrap();
        let v = Element::from_parts(Subspace::zero(s), RadialFunction::tail(1, BoundaryExpr::coord(0))).unwrap();
        HamiltonianSpec::new(KineticSymbol::laplacian(), v)
    }

    #[test]
    fn free_threshold_is_zero() {
        let s = Space::new(1).unwrap();
        let h = HamiltonianSpec::new(KineticSymbol::laplacian(), Element::zero(s));
        let grids: Vec<GridSpec> = [(128, 12.5), (256, 25.0), (512, 50.0)]
            .iter()
            .map(|&(n, l)| GridSpec::uniform(1, n, l).unwrap())
            .collect();
        let rep = truncation_oracle(&h, &grids).unwrap();
        let t = rep.threshold.unwrap();
        assert!(t.abs() < 5e-2, "{t}");
    }

    #[test]
    fn constant_along_ray_matches_at_every_radius() {
        let s = Space::new(2).unwrap();
        let y = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap();
        let v = Element::from_parts(y, RadialFunction::gaussian(1, -1.0, 1.0)).unwrap();
        let h = HamiltonianSpec::new(KineticSymbol::laplacian(), v);
        let grid = GridSpec::uniform(2, 32, 8.0).unwrap();
        let alpha = Direction::from_integers(s, &[0, 1]).unwrap();
        let rep = resolvent_limit_check(&h, &alpha, &[5.0, 10.0], &test_vectors(&grid), &grid).unwrap();
        assert!(rep.baseline.iter().all(|e| *e <= 1e-8));
        assert!(rep.rows.iter().flat_map(|r| &r.errors).all(|e| *e <= 1e-8));
    }

    #[test]
    fn tanh_translates_toward_limit() {
        let h = tanh_1d();
        let grid = GridSpec::uniform(1, 256, 25.0).unwrap();
        let alpha = Direction::from_integers(Space::new(1).unwrap(), &[1]).unwrap();
        let rep = resolvent_limit_check(&h, &alpha, &[2.0, 4.0, 8.0], &test_vectors(&grid), &grid).unwrap();
        assert!(rep.decreasing, "{rep:?}");
        assert!(rep.final_error() < 1e-3);
    }

    #[test]
    fn divergence_detection() {
        assert!(detect_infinite_localization(|x| x[0].max(0.0), &[1.0]).diverges);
        assert!(!detect_infinite_localization(|x| x[0].max(0.0), &[-1.0]).diverges);
        assert!(!detect_infinite_localization(|x| x[0].tanh(), &[1.0]).diverges);
    }
}
