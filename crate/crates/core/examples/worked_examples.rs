//! The three worked examples: an infinite localization, a union of
//! localized spectra that is not closed, and non-commuting localizations.
//!
//! ```bash
//! cargo run --release --example worked_examples
//! ```

use hvzlab::hvz::{noncommute_demo, pathology_demo, unclosed_union_demo};

fn main() {
    let p = pathology_demo(&[10.0, 20.0, 40.0]).unwrap();
    for row in &p.plus.rows {
        println!("+ side r = {}: resolvent norms {:?}", row.radius, row.norms);
    }
    for row in &p.minus.rows {
        println!("− side r = {}: distance to free resolvent {:?}", row.radius, row.errors);
    }

    let u = unclosed_union_demo();
    println!("limit value {} , gap to every localization {:.3e}", u.limit, u.gap);

    let n = noncommute_demo();
    println!("τ_ατ_β(u) = {}, τ_βτ_α(u) = {}", n.alpha_beta, n.beta_alpha);
}
