use super::SpectraError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Periodic grid on the box `[-L_a, L_a)` per axis.
///
/// Nodes are `x_j = -L + 2L j / N`; frequencies are `k_m = π m / L` for
/// `m ∈ [-N/2, N/2)`, stored in FFT order (`m = j` for `j < N/2`, else
/// `j - N`). Flat indices are row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    points: Vec<usize>,
    halflengths: Vec<f64>,
}

impl GridSpec {
    pub fn new(points: Vec<usize>, halflengths: Vec<f64>) -> Result<Self, SpectraError> {
        if points.is_empty() || points.len() > 3 || points.len() != halflengths.len() {
            return Err(SpectraError::InvalidGrid(format!(
                "need 1..=3 axes with matching lengths, got {} points and {} half-lengths",
                points.len(),
                halflengths.len()
            )));
        }
        for (&n, &l) in points.iter().zip(&halflengths) {
            if n < 2 || n % 2 != 0 {
                return Err(SpectraError::InvalidGrid(format!("points per axis must be even, got {n}")));
            }
            if !(l > 0.0 && l.is_finite()) {
                return Err(SpectraError::InvalidGrid(format!("half-length must be positive, got {l}")));
            }
        }
        Ok(GridSpec { points, halflengths })
    }

    pub fn uniform(dim: usize, n: usize, l: f64) -> Result<Self, SpectraError> {
        Self::new(vec![n; dim], vec![l; dim])
    }

    /// Default resolution: 2048 nodes on `[-100, 100)` in one dimension,
    /// 128² on `[-40, 40)²`, 32³ on `[-16, 16)³`.
    pub fn default_for(dim: usize) -> Result<Self, SpectraError> {
        match dim {
            1 => Self::uniform(1, 2048, 100.0),
            2 => Self::uniform(2, 128, 40.0),
            3 => Self::uniform(3, 32, 16.0),
            _ => Err(SpectraError::InvalidGrid(format!("no numerics in dimension {dim}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn halflengths(&self) -> &[f64] {
        &self.halflengths
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.halflengths[axis] / self.points[axis] as f64
    }

    /// Volume element of one cell.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn node(&self, axis: usize, j: usize) -> f64 {
        -self.halflengths[axis] + self.spacing(axis) * j as f64
    }

    pub fn nodes(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|j| self.node(axis, j)).collect()
    }

    /// Integer frequency label `m` of FFT slot `j`.
    pub fn mode(&self, axis: usize, j: usize) -> i64 {
        let n = self.points[axis];
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    pub fn freq(&self, axis: usize, j: usize) -> f64 {
        PI * self.mode(axis, j) as f64 / self.halflengths[axis]
    }

    pub fn freqs(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|j| self.freq(axis, j)).collect()
    }

    /// Smallest nonzero frequency along `axis`.
    pub fn base_freq(&self, axis: usize) -> f64 {
        PI / self.halflengths[axis]
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.points[a];
            flat /= self.points[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.points).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Coordinates of every node, in flat order.
    pub fn node_coords(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|f| {
                self.multi_index(f)
                    .iter()
                    .enumerate()
                    .map(|(a, &j)| self.node(a, j))
                    .collect()
            })
            .collect()
    }

    /// Frequency vector of every Fourier slot, in flat order.
    pub fn freq_vectors(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|f| {
                self.multi_index(f)
                    .iter()
                    .enumerate()
                    .map(|(a, &j)| self.freq(a, j))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_freqs() {
        let g = GridSpec::uniform(1, 8, PI).unwrap();
        assert_eq!(g.node(0, 0), -PI);
        assert!((g.node(0, 4)).abs() < 1e-15);
        let m: Vec<i64> = (0..8).map(|j| g.mode(0, j)).collect();
        assert_eq!(m, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!((g.freq(0, 3) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn flat_round_trip() {
        let g = GridSpec::new(vec![4, 6], vec![1.0, 2.0]).unwrap();
        for f in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(f)), f);
        }
        assert_eq!(g.multi_index(7), vec![1, 1]);
    }

    #[test]
    fn rejects_odd_points() {
        assert!(GridSpec::uniform(1, 7, 1.0).is_err());
        assert!(GridSpec::uniform(1, 8, 0.0).is_err());
        assert!(GridSpec::new(vec![8], vec![1.0, 1.0]).is_err());
    }
}
