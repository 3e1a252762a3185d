//! Localizing a potential at infinity: `τ_α(u)` versus `u(rα̂ + x)` for large `r`.
//!
//! ```bash
//! cargo run --example ray_limits
//! ```

use hvzlab::geometry::{Direction, Space, Subspace};
use hvzlab::interactions::{BoundaryExpr, Element, RadialFunction};

fn main() {
    let s = Space::new(2).unwrap();
    // a well along the first axis plus a tail whose limits depend on the direction
    let y = Subspace::from_vectors(s, &[vec![1, 0]]).unwrap();
    let well = Element::from_parts(y, RadialFunction::gaussian(1, -2.0, 1.0)).unwrap();
    let tail = Element::from_parts(Subspace::zero(s), RadialFunction::tail(2, BoundaryExpr::coord(1))).unwrap();
    let u = well.add(&tail);

    let x = [0.2, 0.5];
    for v in [[1, 0], [0, 1], [1, 1], [-3, 1]] {
        let a = Direction::from_integers(s, &v).unwrap();
        let t = u.tau_alpha(&a);
        let limit = t.eval(&x);
        let far: Vec<f64> = x.iter().zip(a.unit()).map(|(xi, ai)| xi + 1e4 * ai).collect();
        println!("α = {v:?}: τ_α(u)(x) = {limit:+.6}, u(10⁴α̂ + x) = {:+.6}", u.eval(&far));
    }
}
