use super::SpectraError;
use crate::geometry::{sphere_samples, Space, Subspace};
use crate::interactions::BoundaryExpr;
use serde::{Deserialize, Serialize};

/// Shell radii used by the properness check.
pub const PROPERNESS_SHELLS: [f64; 3] = [10.0, 100.0, 1000.0];

/// Kinetic energy `h(k)`, applied as a Fourier multiplier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KineticSymbol {
    /// `|k|^{2s}`
    Power { s: f64 },
    /// `Σ_j (|k_j|² + m_j²)^{1/2}` over consecutive blocks of
    /// `particle_dim` coordinates.
    Relativistic {
        masses: Vec<f64>,
        #[serde(default = "one")]
        particle_dim: usize,
    },
    /// Any continuous expression in the coordinates of `k`.
    Custom { expr: BoundaryExpr },
}

fn one() -> usize {
    1
}

impl Default for KineticSymbol {
    fn default() -> Self {
        KineticSymbol::laplacian()
    }
}

impl KineticSymbol {
    pub fn laplacian() -> Self {
        KineticSymbol::Power { s: 1.0 }
    }

    pub fn relativistic(masses: Vec<f64>) -> Self {
        KineticSymbol::Relativistic { masses, particle_dim: 1 }
    }

    pub fn eval(&self, k: &[f64]) -> f64 {
        match self {
            KineticSymbol::Power { s } => {
                let k2: f64 = k.iter().map(|x| x * x).sum();
                if *s == 1.0 {
                    k2
                } else {
                    k2.powf(*s)
                }
            }
            KineticSymbol::Relativistic { masses, particle_dim } => masses
                .iter()
                .enumerate()
                .map(|(j, m)| {
                    let block = &k[j * particle_dim..(j + 1) * particle_dim];
                    (block.iter().map(|x| x * x).sum::<f64>() + m * m).sqrt()
                })
                .sum(),
            KineticSymbol::Custom { expr } => expr.eval(k),
        }
    }

    /// `h(k) = |k|²`, which splits additively over any orthogonal
    /// decomposition of the frequency space.
    pub fn is_euclidean_quadratic(&self) -> bool {
        matches!(self, KineticSymbol::Power { s } if *s == 1.0)
    }

    pub fn validate(&self, dim: usize) -> Result<(), SpectraError> {
        match self {
            KineticSymbol::Power { s } => {
                if !(*s > 0.0 && s.is_finite()) {
                    return Err(SpectraError::ImproperSymbol(format!("power symbol needs s > 0, got {s}")));
                }
            }
            KineticSymbol::Relativistic { masses, particle_dim } => {
                if *particle_dim == 0 || masses.len() * particle_dim != dim {
                    return Err(SpectraError::ImproperSymbol(format!(
                        "{} masses of dimension {particle_dim} do not cover {dim} coordinates",
                        masses.len()
                    )));
                }
                if masses.iter().any(|m| !m.is_finite()) {
                    return Err(SpectraError::ImproperSymbol("masses must be finite".into()));
                }
            }
            KineticSymbol::Custom { expr } => {
                if expr.max_coord().is_some_and(|c| c >= dim) {
                    return Err(SpectraError::ImproperSymbol(format!(
                        "custom symbol uses a coordinate beyond dimension {dim}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Minimum of `h` over sampled points of the shell `|k| = radius`.
    pub fn shell_min(&self, dim: usize, radius: f64) -> f64 {
        shell_points(dim)
            .iter()
            .map(|u| {
                let k: Vec<f64> = u.iter().map(|x| x * radius).collect();
                self.eval(&k)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `inf h`: exact for the power and relativistic symbols, sampled on
    /// geometric shells for custom ones.
    pub fn min_estimate(&self, dim: usize) -> f64 {
        match self {
            KineticSymbol::Power { .. } => 0.0,
            KineticSymbol::Relativistic { masses, .. } => masses.iter().map(|m| m.abs()).sum(),
            KineticSymbol::Custom { .. } => (0..=40)
                .map(|i| self.shell_min(dim, 1e-3 * 1.5f64.powi(i)))
                .fold(self.eval(&vec![0.0; dim]), f64::min),
        }
    }

    /// Properness: `min_{|k|=K} h(k)` must grow with `K` on the shells
    /// [`PROPERNESS_SHELLS`].
    pub fn check_proper(&self, dim: usize) -> Result<(), SpectraError> {
        self.validate(dim)?;
        let mins: Vec<f64> = PROPERNESS_SHELLS.iter().map(|&r| self.shell_min(dim, r)).collect();
        if mins.iter().any(|m| !m.is_finite()) || !mins.windows(2).all(|w| w[1] > w[0]) {
            return Err(SpectraError::ImproperSymbol(format!(
                "shell minima {mins:?} on |k| = {PROPERNESS_SHELLS:?} do not grow"
            )));
        }
        Ok(())
    }
}

pub(crate) fn shell_points(dim: usize) -> Vec<Vec<f64>> {
    let space = Space::new(dim).expect("kinetic symbols live in dimension 1..=4");
    let mut pts: Vec<Vec<f64>> = sphere_samples(space, &Subspace::full(space), 64)
        .into_iter()
        .map(|d| d.unit().to_vec())
        .collect();
    for a in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[a] = s;
            pts.push(e);
        }
    }
    pts
}
