//! Property tests over randomly generated subspaces, elements and spectra.

use hvzlab::geometry::{Direction, Space, Subspace};
use hvzlab::interactions::random::{random_direction, random_element, random_point};
use hvzlab::spectra::SpectrumSet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rows(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), 0..=n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modular_law(a in rows(3), b in rows(3)) {
        let s = Space::new(3).unwrap();
        let y = Subspace::from_vectors(s, &a).unwrap();
        let z = Subspace::from_vectors(s, &b).unwrap();
        let sum = y.sum(&z).unwrap();
        let cap = y.intersect(&z).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), y.dim() + z.dim());
        prop_assert!(sum.contains_subspace(&z) && z.contains_subspace(&cap));
    }

    #[test]
    fn canonical_form_is_idempotent(a in rows(4)) {
        let s = Space::new(4).unwrap();
        let y = Subspace::from_vectors(s, &a).unwrap();
        let again = Subspace::from_vectors(s, &y.basis_i64().unwrap()).unwrap();
        prop_assert_eq!(again.basis(), y.basis());
    }

    #[test]
    fn projection_ignores_kernel_shifts(v in prop::collection::vec(-3i64..=3, 3), t in -5i64..=5) {
        let s = Space::new(3).unwrap();
        let y = Subspace::from_vectors(s, &[vec![1, 1, 0]]).unwrap();
        prop_assume!(v.iter().any(|&c| c != 0));
        let a = Direction::from_integers(s, &v).unwrap();
        prop_assume!(!y.contains_direction(&a));
        let moved: Vec<i64> = v.iter().zip([1, 1, 0]).map(|(c, k)| c + t * k).collect();
        let b = Direction::from_integers(s, &moved).unwrap();
        let q = y.quotient_map();
        let (pa, pb) = (q.project_direction(&a).unwrap(), q.project_direction(&b).unwrap());
        prop_assert_eq!(pa.primitive(), pb.primitive());
    }

    #[test]
    fn translation_shifts_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Space::new(2).unwrap();
        let u = random_element(&mut rng, s, 3, true);
        let x = random_point(&mut rng, s, 3.0);
        let y = random_point(&mut rng, s, 3.0);
        let shifted = u.translate(&x);
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!((shifted.eval(&y) - u.eval(&xy)).abs() <= 1e-12);
    }

    #[test]
    fn localization_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Space::new(3).unwrap();
        let u = random_element(&mut rng, s, 4, true);
        let a = random_direction(&mut rng, s);
        let t = u.tau_alpha(&a);
        let x = random_point(&mut rng, s, 4.0);
        prop_assert!((t.tau_alpha(&a).eval(&x) - t.eval(&x)).abs() <= 1e-12);
    }

    #[test]
    fn union_is_commutative_and_contains_both(
        a in prop::collection::vec(-5.0f64..5.0, 0..10),
        b in prop::collection::vec(-5.0f64..5.0, 0..10),
    ) {
        let (x, y) = (SpectrumSet::merge_intervals(&a, 0.1), SpectrumSet::merge_intervals(&b, 0.1));
        let u = x.union(&y);
        let w = y.union(&x);
        prop_assert_eq!(u.intervals(), w.intervals());
        prop_assert!(x.is_subset_of(&u, 1e-12) && y.is_subset_of(&u, 1e-12));
        prop_assert_eq!(x.hausdorff(&x), 0.0);
    }
}
