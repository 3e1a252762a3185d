//! Essential spectra of N-body type Hamiltonians `H = h(p) + V` whose
//! interactions have radial limits at infinity.
//!
//! The essential spectrum is assembled from the localizations at infinity
//! `H_α`, one per direction `α` of the sphere at infinity:
//!
//! * [`geometry`] holds the exact rational lattice of subspaces and the
//!   direction arrangement on the sphere at infinity.
//! * [`interactions`] is the symbolic algebra of potentials `v ∘ π_Y` with
//!   the localization morphisms `τ_α`, chained morphisms and characters.
//! * [`spectra`] discretizes `h(p) + v` on a periodic grid and computes
//!   spectra, resolvents and fiber decompositions.
//! * [`hvz`] builds every `H_α` and returns the closed union of their
//!   spectra, together with the independent oracles and demos.
//! * [`config`] and [`report`] are the JSON/CSV front end used by the
//!   `hvzlab` binary.

pub mod cli;
pub mod config;
pub mod geometry;
pub mod hvz;
pub mod interactions;
pub mod report;
pub mod spectra;
pub mod verify;
