//! Essential spectrum of the bundled configurations from the union of the
//! spectra of their localizations.
//!
//! ```bash
//! cargo run --release --example essential_spectrum
//! ```

use hvzlab::config::RunConfig;
use hvzlab::hvz::essential_spectrum;
use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["tanh1d.json", "classic2d.json", "twolines2d.json"] {
        let h = RunConfig::load(&dir.join(name)).unwrap().hamiltonian().unwrap();
        let est = essential_spectrum(&h).unwrap();
        println!("{name}: inf = {:.6}, union {:?}", est.inf().unwrap(), est.essential_spectrum.intervals());
        for c in &est.cells {
            println!("  cell {:#b} ({} samples): {:?}", c.pattern, c.samples.len(), c.intervals);
        }
    }
}
