//! Bottom of the localized spectrum along a great circle of directions.
//!
//! ```bash
//! cargo run --release --example continuity
//! ```

use hvzlab::hvz::{continuity_profile, two_body_instance};

fn main() {
    let h = two_body_instance();
    let rep = continuity_profile(&h, &[32, 64, 128]).unwrap();
    for l in &rep.levels {
        println!("{} directions: max jump {:.3e}, shrink {:?}", l.samples, l.max_jump, l.shrink);
    }
}
