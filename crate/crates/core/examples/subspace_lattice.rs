//! Exact subspace arithmetic and the arrangement cells cut out on the sphere.
//!
//! ```bash
//! cargo run --example subspace_lattice
//! ```

use hvzlab::geometry::{arrangement_cells, SamplerConfig, Space, Subspace};

fn main() {
    let s = Space::new(3).unwrap();
    let y = Subspace::from_vectors(s, &[vec![1, 1, 0]]).unwrap();
    let z = Subspace::from_vectors(s, &[vec![0, 1, 1], vec![1, 0, 0]]).unwrap();
    let sum = y.sum(&z).unwrap();
    let cap = y.intersect(&z).unwrap();
    println!("dim Y = {}, dim Z = {}, dim(Y+Z) = {}, dim(Y∩Z) = {}", y.dim(), z.dim(), sum.dim(), cap.dim());
    println!("Y∩Z basis: {:?}", cap.basis_i64().unwrap());

    let q = y.quotient_map();
    println!("X/Y has dimension {}; matrix {:?}", q.quotient_dim(), q.matrix_f64());

    let cells = arrangement_cells(s, &[y, z], &SamplerConfig::default());
    for c in &cells {
        println!(
            "cell pattern {:#b}: span dim {}, {} samples, representative {:?}",
            c.pattern,
            c.span.dim(),
            c.samples.len(),
            c.representative.unit()
        );
    }
}
