use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Separable multi-dimensional FFT over a row-major array.
///
/// The forward transform is unnormalized; the inverse divides by the
/// total size so that `inverse(forward(f)) = f`.
#[derive(Clone)]
pub struct FftNd {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("shape", &self.shape).finish()
    }
}

impl FftNd {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        FftNd {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        assert_eq!(data.len(), self.len());
        let d = self.shape.len();
        for axis in 0..d {
            let n = self.shape[axis];
            let plan = &plans[axis];
            let stride: usize = self.shape[axis + 1..].iter().product();
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            if stride == 1 {
                // contiguous lines
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let outer = data.len() / (n * stride);
            let mut line = vec![Complex64::default(); n];
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    for j in 0..n {
                        line[j] = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for j in 0..n {
                        data[base + j * stride] = line[j];
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_mode() {
        let f = FftNd::new(&[4, 8]);
        let orig: Vec<Complex64> = (0..32).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let mut x = orig.clone();
        f.forward(&mut x);
        f.inverse(&mut x);
        for (a, b) in x.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
        // a pure mode along the second axis lands in a single slot
        let mut e: Vec<Complex64> = (0..32)
            .map(|i| {
                let j = (i % 8) as f64;
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * j / 8.0)
            })
            .collect();
        f.forward(&mut e);
        for (i, z) in e.iter().enumerate() {
            let expected = if i == 3 { 32.0 } else { 0.0 };
            assert!((z.norm() - expected).abs() < 1e-10, "slot {i}: {z}");
        }
    }
}
