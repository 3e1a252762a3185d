//! Spectrum of a Hamiltonian that is translation invariant along a subspace.
//!
//! ```bash
//! cargo run --release --example fiber_spectrum
//! ```

use hvzlab::geometry::{Space, Subspace};
use hvzlab::interactions::{Element, RadialFunction};
use hvzlab::spectra::{fiber_spectrum, FiberConfig, GridSpec, KineticSymbol};

fn main() {
    let s = Space::new(2).unwrap();
    let y = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap();
    let well = Element::from_parts(y.clone(), RadialFunction::gaussian(1, -2.0, 1.0)).unwrap();
    let grid = GridSpec::uniform(1, 256, 50.0).unwrap();
    for (name, h) in [("|k|²", KineticSymbol::laplacian()), ("√(|k|²+1)", KineticSymbol::relativistic(vec![1.0, 1.0]))] {
        let fs = fiber_spectrum(&h, &well, &y, Some(&grid), &FiberConfig::default()).unwrap();
        println!("h = {name}: bottom {:.6}, intervals {:?}", fs.bottom, fs.set.intervals());
    }
}
