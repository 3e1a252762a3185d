use super::{FftNd, GridSpec, KineticSymbol, SpectraError};
use crate::interactions::Element;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A Hermitian operator on `C^n`, known only through its action.
pub trait LinearOperator: Sync {
    fn size(&self) -> usize;

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;

    /// Approximate inverse of `A - shift`, positive definite, if cheaply
    /// available.
    fn precondition(&self, _r: &[Complex64], _shift: f64) -> Option<Vec<Complex64>> {
        None
    }

    /// The matrix has real entries in the standard basis.
    fn is_real(&self) -> bool {
        false
    }

    /// A cheap lower bound on the spectrum, if known.
    fn lower_bound(&self) -> Option<f64> {
        None
    }
}

/// Discrete inner product `Σ conj(x_i) y_i` (unweighted).
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense matrix of `op` obtained by applying it to unit vectors,
/// symmetrized to remove rounding asymmetry.
pub fn materialize<O: LinearOperator + ?Sized>(op: &O) -> DMatrix<Complex64> {
    let n = op.size();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut e = vec![Complex64::default(); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        let col = op.apply(&e);
        e[j] = Complex64::default();
        for (i, z) in col.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    let adj = m.adjoint();
    (m + adj).scale(0.5)
}

/// Random complex vector with standard normal-ish entries.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Largest relative Hermiticity defect `|⟨f,Hg⟩ − ⟨Hf,g⟩| / (‖f‖‖g‖)`
/// over `pairs` random pairs.
pub fn hermiticity_residual<O: LinearOperator + ?Sized>(op: &O, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = op.size();
    (0..pairs)
        .map(|_| {
            let f = random_vector(&mut rng, n);
            let g = random_vector(&mut rng, n);
            let lhs = inner(&f, &op.apply(&g));
            let rhs = inner(&op.apply(&f), &g);
            (lhs - rhs).norm() / (norm(&f) * norm(&g))
        })
        .fold(0.0, f64::max)
}

/// `A + shift` for a borrowed operator.
pub struct Shifted<'a, O: ?Sized> {
    pub op: &'a O,
    pub shift: f64,
}

impl<O: LinearOperator + ?Sized> LinearOperator for Shifted<'_, O> {
    fn size(&self) -> usize {
        self.op.size()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = self.op.apply(x);
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += self.shift * xi);
        y
    }

    fn precondition(&self, r: &[Complex64], shift: f64) -> Option<Vec<Complex64>> {
        self.op.precondition(r, shift - self.shift)
    }

    fn is_real(&self) -> bool {
        self.op.is_real()
    }

    fn lower_bound(&self) -> Option<f64> {
        self.op.lower_bound().map(|b| b + self.shift)
    }
}

/// Sampled coefficient `g_{μν}` of a first-order divergence-form operator.
#[derive(Clone, Debug)]
struct DivergenceTerm {
    mu: usize,
    nu: usize,
    samples: Vec<f64>,
}

/// Matrix-free periodic discretization of
/// `h(p) + v + Σ_{μ,ν} p^μ g_{μν} p^ν` with `p^0 = 1`.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    grid: GridSpec,
    symbol: Vec<f64>,
    potential: Vec<f64>,
    divergence: Vec<DivergenceTerm>,
    /// `freq_table[a][i]`: frequency along axis `a` of Fourier slot `i`
    /// (filled only when divergence terms are present).
    freq_table: Vec<Vec<f64>>,
    fft: Arc<FftNd>,
    real: bool,
}

impl DiscreteOperator {
    /// `h(p) + u` with `u` sampled at the grid nodes.
    pub fn assemble(h: &KineticSymbol, u: &Element, grid: &GridSpec) -> Result<Self, SpectraError> {
        if u.space().dim() != grid.dim() {
            return Err(SpectraError::DimensionMismatch {
                expected: grid.dim(),
                found: u.space().dim(),
            });
        }
        let potential = grid
            .node_coords()
            .iter()
            .map(|x| u.try_eval(x))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| SpectraError::Numeric(e.to_string()))?;
        Self::from_samples(h, grid, potential)
    }

    /// `h(p) + v` with the potential given by its node samples.
    pub fn from_samples(h: &KineticSymbol, grid: &GridSpec, potential: Vec<f64>) -> Result<Self, SpectraError> {
        h.check_proper(grid.dim())?;
        let symbol = grid.freq_vectors().iter().map(|k| h.eval(k)).collect();
        Self::from_symbol(grid, symbol, potential)
    }

    /// Operator with an explicit multiplier per Fourier slot (FFT order).
    pub fn from_symbol(grid: &GridSpec, symbol: Vec<f64>, potential: Vec<f64>) -> Result<Self, SpectraError> {
        if symbol.len() != grid.len() || potential.len() != grid.len() {
            return Err(SpectraError::DimensionMismatch {
                expected: grid.len(),
                found: symbol.len().min(potential.len()),
            });
        }
        if symbol.iter().chain(&potential).any(|x| !x.is_finite()) {
            return Err(SpectraError::Numeric("non-finite symbol or potential sample".into()));
        }
        let real = symbol_is_even(grid, &symbol);
        Ok(DiscreteOperator {
            grid: grid.clone(),
            symbol,
            potential,
            divergence: Vec::new(),
            freq_table: Vec::new(),
            fft: Arc::new(FftNd::new(grid.points())),
            real,
        })
    }

    /// `Σ_{μ,ν ∈ {0..d}} p^μ g_{μν} p^ν`, where `coeffs[μ][ν]` is the
    /// coefficient (absent entries are zero) and index 0 stands for the
    /// identity.
    pub fn assemble_divergence(coeffs: &[Vec<Option<Element>>], grid: &GridSpec) -> Result<Self, SpectraError> {
        let d = grid.dim();
        if coeffs.len() != d + 1 || coeffs.iter().any(|r| r.len() != d + 1) {
            return Err(SpectraError::InvalidCoefficients(format!(
                "need a {0}x{0} coefficient table",
                d + 1
            )));
        }
        let nodes = grid.node_coords();
        let sample = |g: &Element| -> Result<Vec<f64>, SpectraError> {
            if g.space().dim() != d {
                return Err(SpectraError::DimensionMismatch {
                    expected: d,
                    found: g.space().dim(),
                });
            }
            nodes
                .iter()
                .map(|x| g.try_eval(x))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| SpectraError::Numeric(e.to_string()))
        };
        let mut op = Self::from_symbol(grid, vec![0.0; grid.len()], vec![0.0; grid.len()])?;
        let mut first_order = false;
        for mu in 0..=d {
            for nu in 0..=d {
                let a = coeffs[mu][nu].as_ref().map(&sample).transpose()?;
                let b = coeffs[nu][mu].as_ref().map(&sample).transpose()?;
                let symmetric = match (&a, &b) {
                    (None, None) => true,
                    (Some(a), Some(b)) => a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-14 * (1.0 + x.abs())),
                    (Some(a), None) | (None, Some(a)) => a.iter().all(|x| *x == 0.0),
                };
                if !symmetric {
                    return Err(SpectraError::InvalidCoefficients(format!(
                        "g[{mu}][{nu}] differs from g[{nu}][{mu}]"
                    )));
                }
                let Some(samples) = a else { continue };
                if mu == 0 && nu == 0 {
                    op.potential.iter_mut().zip(&samples).for_each(|(v, g)| *v += g);
                } else {
                    first_order |= (mu == 0) != (nu == 0);
                    op.divergence.push(DivergenceTerm { mu, nu, samples });
                }
            }
        }
        op.real &= !first_order;
        if !op.divergence.is_empty() {
            let fv = grid.freq_vectors();
            op.freq_table = (0..d).map(|a| fv.iter().map(|k| k[a]).collect()).collect();
        }
        Ok(op)
    }

    /// Adds sampled divergence terms `p^μ g p^ν` (index 0 = identity);
    /// the table must be symmetric, `(μ, ν)` and `(ν, μ)` both present.
    pub fn with_divergence_samples(mut self, terms: Vec<(usize, usize, Vec<f64>)>) -> Result<Self, SpectraError> {
        let d = self.grid.dim();
        for (mu, nu, samples) in terms {
            if mu > d || nu > d || samples.len() != self.grid.len() {
                return Err(SpectraError::InvalidCoefficients(format!("bad term ({mu}, {nu})")));
            }
            if mu == 0 && nu == 0 {
                self.potential.iter_mut().zip(&samples).for_each(|(v, g)| *v += g);
                continue;
            }
            self.real &= (mu == 0) == (nu == 0);
            self.divergence.push(DivergenceTerm { mu, nu, samples });
        }
        if !self.divergence.is_empty() && self.freq_table.is_empty() {
            let fv = self.grid.freq_vectors();
            self.freq_table = (0..d).map(|a| fv.iter().map(|k| k[a]).collect()).collect();
        }
        Ok(self)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn has_divergence(&self) -> bool {
        !self.divergence.is_empty()
    }

    /// Same kinetic part, potential shifted by a constant.
    pub fn shifted(&self, c: f64) -> Self {
        let mut op = self.clone();
        op.potential.iter_mut().for_each(|v| *v += c);
        op
    }

    /// Same kinetic part with a different potential.
    pub fn with_potential(&self, potential: Vec<f64>) -> Result<Self, SpectraError> {
        if potential.len() != self.grid.len() || potential.iter().any(|v| !v.is_finite()) {
            return Err(SpectraError::Numeric("potential samples do not match the grid".into()));
        }
        let mut op = self.clone();
        op.potential = potential;
        Ok(op)
    }

    pub fn fft(&self) -> &FftNd {
        &self.fft
    }

    /// `p_axis f` as a Fourier multiplier by the frequency.
    fn momentum(&self, fhat: &[Complex64], axis: usize) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = fhat
            .iter()
            .zip(&self.freq_table[axis])
            .map(|(z, k)| z * k)
            .collect();
        self.fft.inverse(&mut out);
        out
    }

    /// `⟨f, H f⟩`, `‖f‖²` and the first Sobolev norm `⟨f, (1+|p|²) f⟩`.
    fn quadratic_forms(&self, f: &[Complex64]) -> (f64, f64, f64) {
        let hf = self.apply(f);
        let mut fhat = f.to_vec();
        self.fft.forward(&mut fhat);
        let n = self.grid.len() as f64;
        let sobolev: f64 = self
            .grid
            .freq_vectors()
            .iter()
            .zip(&fhat)
            .map(|(k, z)| (1.0 + k.iter().map(|x| x * x).sum::<f64>()) * z.norm_sqr())
            .sum::<f64>()
            / n;
        (inner(f, &hf).re, inner(f, f).re, sobolev)
    }

    /// Empirical coercivity: the largest `δ` with
    /// `⟨f,Hf⟩ + γ‖f‖² ≥ δ ⟨f,(1+|p|²)f⟩` on 200 random trial vectors
    /// (a mix of white noise and smooth profiles).
    pub fn coercivity_check(&self, gamma: f64, delta: f64, seed: u64) -> CoercivityReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.grid.len();
        let freqs = self.grid.freq_vectors();
        let mut worst = f64::INFINITY;
        for t in 0..200 {
            let f = if t % 2 == 0 {
                random_vector(&mut rng, n)
            } else {
                let mut fhat: Vec<Complex64> = random_vector(&mut rng, n)
                    .into_iter()
                    .zip(&freqs)
                    .map(|(z, k)| z / (1.0 + k.iter().map(|x| x * x).sum::<f64>()))
                    .collect();
                self.fft.inverse(&mut fhat);
                fhat
            };
            let (form, mass, sobolev) = self.quadratic_forms(&f);
            worst = worst.min((form + gamma * mass) / sobolev);
        }
        CoercivityReport {
            gamma,
            delta,
            empirical_delta: worst,
            coercive: worst >= delta,
            trials: 200,
        }
    }
}

fn symbol_is_even(grid: &GridSpec, symbol: &[f64]) -> bool {
    (0..grid.len()).all(|i| {
        let idx = grid.multi_index(i);
        let mirror: Vec<usize> = idx
            .iter()
            .zip(grid.points())
            .map(|(&j, &n)| (n - j) % n)
            .collect();
        symbol[i] == symbol[grid.flat_index(&mirror)]
    })
}

impl LinearOperator for DiscreteOperator {
    fn size(&self) -> usize {
        self.grid.len()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.size(), "vector length does not match the grid");
        let mut xhat = x.to_vec();
        self.fft.forward(&mut xhat);
        let mut y: Vec<Complex64> = xhat.iter().zip(&self.symbol).map(|(z, h)| z * h).collect();
        self.fft.inverse(&mut y);
        for ((yi, xi), v) in y.iter_mut().zip(x).zip(&self.potential) {
            *yi += xi * v;
        }
        if self.divergence.is_empty() {
            return y;
        }
        let d = self.grid.dim();
        // p^ν x for every ν in use
        let mut px: Vec<Option<Vec<Complex64>>> = vec![None; d + 1];
        px[0] = Some(x.to_vec());
        for t in &self.divergence {
            if px[t.nu].is_none() {
                px[t.nu] = Some(self.momentum(&xhat, t.nu - 1));
            }
        }
        // w_μ = Σ_ν g_{μν} p^ν x
        let mut w: Vec<Option<Vec<Complex64>>> = vec![None; d + 1];
        for t in &self.divergence {
            let src = px[t.nu].as_ref().expect("filled above");
            let acc = w[t.mu].get_or_insert_with(|| vec![Complex64::default(); x.len()]);
            for ((a, s), g) in acc.iter_mut().zip(src).zip(&t.samples) {
                *a += s * g;
            }
        }
        for (mu, wm) in w.into_iter().enumerate() {
            let Some(mut wm) = wm else { continue };
            if mu > 0 {
                self.fft.forward(&mut wm);
                wm = self.momentum(&wm, mu - 1);
            }
            y.iter_mut().zip(&wm).for_each(|(a, b)| *a += b);
        }
        y
    }

    fn precondition(&self, r: &[Complex64], shift: f64) -> Option<Vec<Complex64>> {
        if self.has_divergence() {
            return None;
        }
        let mean_v = self.potential.iter().sum::<f64>() / self.potential.len() as f64;
        let c0 = (mean_v - shift).max(1e-3 * (1.0 + shift.abs()));
        let mut z = r.to_vec();
        self.fft.forward(&mut z);
        z.iter_mut()
            .zip(&self.symbol)
            .for_each(|(zi, h)| *zi /= (h + c0).max(1e-8));
        self.fft.inverse(&mut z);
        Some(z)
    }

    fn is_real(&self) -> bool {
        self.real
    }

    fn lower_bound(&self) -> Option<f64> {
        if self.has_divergence() {
            return None;
        }
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        Some(min(&self.symbol) + min(&self.potential))
    }
}

/// Outcome of [`DiscreteOperator::coercivity_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    pub gamma: f64,
    pub delta: f64,
    pub empirical_delta: f64,
    pub coercive: bool,
    pub trials: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Space, Subspace};
    use crate::interactions::{BoundaryExpr, RadialFunction, Tail};

    fn free_1d(n: usize, l: f64) -> DiscreteOperator {
        let g = GridSpec::uniform(1, n, l).unwrap();
        DiscreteOperator::from_samples(&KineticSymbol::laplacian(), &g, vec![0.0; n]).unwrap()
    }

    #[test]
    fn free_operator_multiplies_modes() {
        let op = free_1d(8, std::f64::consts::PI);
        let g = op.grid().clone();
        for m in [0usize, 1, 3, 4, 6] {
            let e: Vec<Complex64> = (0..8)
                .map(|j| Complex64::from_polar(1.0, g.freq(0, m) * g.node(0, j)))
                .collect();
            let he = op.apply(&e);
            let k = g.freq(0, m);
            for (a, b) in he.iter().zip(&e) {
                assert!((a - b * k * k).norm() < 1e-12);
            }
        }
        assert!(op.is_real());
    }

    #[test]
    fn divergence_identity_matches_laplacian() {
        let s = Space::new(2).unwrap();
        let g = GridSpec::uniform(2, 16, 3.0).unwrap();
        let one = Some(Element::constant(s, 1.0));
        let coeffs = vec![
            vec![None, None, None],
            vec![None, one.clone(), None],
            vec![None, None, one],
        ];
        let div = DiscreteOperator::assemble_divergence(&coeffs, &g).unwrap();
        let lap = DiscreteOperator::assemble(&KineticSymbol::laplacian(), &Element::zero(s), &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_vector(&mut rng, g.len());
        let (a, b) = (div.apply(&f), lap.apply(&f));
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn divergence_with_tail_is_hermitian() {
        let s = Space::new(1).unwrap();
        let g = GridSpec::uniform(1, 64, 10.0).unwrap();
        let tail = RadialFunction::new(1)
            .with_constant(1.0)
            .with_tail(Tail::new(BoundaryExpr::coord(0).scaled(0.5)));
        let g11 = Element::from_parts(Subspace::zero(s), tail).unwrap();
        let half = Element::constant(s, 0.3);
        let coeffs = vec![vec![None, Some(half.clone())], vec![Some(half), Some(g11)]];
        let op = DiscreteOperator::assemble_divergence(&coeffs, &g).unwrap();
        assert!(!op.is_real());
        assert!(hermiticity_residual(&op, 20, 7) <= 1e-10);
        let rep = op.coercivity_check(1.0, 0.1, 3);
        assert!(rep.coercive, "{rep:?}");
    }

    #[test]
    fn asymmetric_coefficients_rejected() {
        let s = Space::new(1).unwrap();
        let g = GridSpec::uniform(1, 16, 3.0).unwrap();
        let coeffs = vec![vec![None, Some(Element::constant(s, 1.0))], vec![None, None]];
        assert!(matches!(
            DiscreteOperator::assemble_divergence(&coeffs, &g),
            Err(SpectraError::InvalidCoefficients(_))
        ));
    }
}
