//! Eigenvalues of the Hamiltonian in growing boxes pile up at the bottom of
//! the essential spectrum.
//!
//! ```bash
//! cargo run --release --example truncation
//! ```

use hvzlab::geometry::{Space, Subspace};
use hvzlab::hvz::{truncation_oracle, HamiltonianSpec};
use hvzlab::interactions::{BoundaryExpr, Element, RadialFunction};
use hvzlab::spectra::{GridSpec, KineticSymbol};

fn main() {
    let s = Space::new(1).unwrap();
    let v = Element::from_parts(Subspace::zero(s), RadialFunction::tail(1, BoundaryExpr::coord(0))).unwrap();
    let h = HamiltonianSpec::new(KineticSymbol::laplacian(), v);
    let grids: Vec<GridSpec> = [(256, 12.5), (512, 25.0), (1024, 50.0)]
        .iter()
        .map(|&(n, l)| GridSpec::uniform(1, n, l).unwrap())
        .collect();
    let rep = truncation_oracle(&h, &grids).unwrap();
    for row in rep.rows.iter().take(8) {
        println!("E = {:+.5}: counts {:?}{}", row.energy, row.counts, if row.growing { " growing" } else { "" });
    }
    println!("threshold {:?} (exact −1)", rep.threshold);
}
