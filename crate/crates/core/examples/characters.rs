//! Characters of the algebra indexed by a point and a chain of directions.
//!
//! ```bash
//! cargo run --example characters
//! ```

use hvzlab::geometry::{DirectionChain, Space};
use hvzlab::interactions::random::random_element;
use hvzlab::interactions::CharacterIndex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = Space::new(3).unwrap();
    let u = random_element(&mut rng, s, 3, false);
    let v = random_element(&mut rng, s, 3, false);
    let chain = DirectionChain::from_integers(s, &[vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
    let chi = CharacterIndex::new(chain, &[0.0, 0.5, -1.0]).unwrap();
    let (cu, cv, cuv) = (u.character_eval(&chi), v.character_eval(&chi), u.mul(&v).character_eval(&chi));
    println!("χ(u) = {cu:.6}, χ(v) = {cv:.6}, χ(uv) = {cuv:.6}, residual = {:.1e}", (cuv - cu * cv).abs());
}
