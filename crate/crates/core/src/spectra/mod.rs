//! Periodic-grid numerics: Fourier-multiplier operators, Hermitian
//! eigensolvers, resolvent solves, fiber spectra and interval sets.

mod cg;
mod eigen;
mod fft;
mod fiber;
mod grid;
mod intervals;
mod kinetic;
mod operator;
mod pmlp;

pub use cg::{resolvent_apply, solve_shifted, CgOptions, CgStats, RESOLVENT_TOL};
pub use eigen::{dense_eigenvalues, eigenvalues, lowest_k, EigenMode, KrylovOptions, Shift, DENSE_LIMIT, KRYLOV_TOL};
pub use fft::FftNd;
pub use fiber::{fiber_spectrum, fiber_spectrum_divergence, FiberConfig, FiberSpectrum, MIN_MERGE_TOL};
pub use grid::GridSpec;
pub use intervals::SpectrumSet;
pub use kinetic::{KineticSymbol, PROPERNESS_SHELLS};
pub use operator::{
    hermiticity_residual, inner, materialize, norm, random_vector, CoercivityReport, DiscreteOperator,
    LinearOperator, Shifted,
};
pub use pmlp::{pm_limit_diagnostic, MomentumProbe, PmlpReport, TranslationProbe, PMLP_LIMIT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("improper kinetic symbol: {0}")]
    ImproperSymbol(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid divergence coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("operator of size {size} exceeds the dense limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("indefinite system detected at CG iteration {iteration}")]
    Indefinite { iteration: usize },
    #[error("potential is not invariant along the fibering subspace (defect {defect:e})")]
    InvarianceViolated { defect: f64 },
    #[error("numeric failure: {0}")]
    Numeric(String),
}
