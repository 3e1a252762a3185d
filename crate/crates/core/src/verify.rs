//! Seeded invariant suites behind `hvzlab verify`.
//!
//! Each suite returns named checks with the measured value and the
//! threshold it is held to, so results are machine readable.

use crate::geometry::{Direction, DirectionChain, Rational, Space, Subspace};
use crate::hvz::{noncommute_demo, NONCOMMUTE_MIN_GAP};
use crate::interactions::random::{random_chain, random_direction, random_element, random_point, random_subspace};
use crate::interactions::{BoundaryExpr, CharacterIndex, Element, InvarianceSampling, RadialFunction};
use crate::spectra::{
    dense_eigenvalues, hermiticity_residual, lowest_k, random_vector, resolvent_apply, DiscreteOperator, GridSpec,
    KineticSymbol, KrylovOptions, LinearOperator, Shift, SpectrumSet,
};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SUITES: [&str; 13] = [
    "morphism",
    "projection",
    "ray_limit",
    "character",
    "noncommute",
    "chain_lift",
    "fixed_point",
    "sum",
    "geometry",
    "hermiticity",
    "eigen_dual",
    "resolvent",
    "intervals",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("unknown suite `{0}` (known: {known})", known = SUITES.join(", "))]
    UnknownSuite(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// `value ≤ threshold`.
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    /// `value ≥ threshold`.
    fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value >= threshold,
        }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            passed: ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Runs one suite by name.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport, VerifyError> {
    let checks = match name {
        "morphism" => morphism(seed, 100, 20),
        "projection" => projection(seed, 200, 20),
        "ray_limit" => ray_limit(seed, 50),
        "character" => character(seed, 100),
        "noncommute" => noncommute(),
        "chain_lift" => chain_lift(seed, 50),
        "fixed_point" => fixed_point(seed, 50),
        "sum" => sum_rule(seed, 50),
        "geometry" => geometry(seed, 200),
        "hermiticity" => hermiticity(seed),
        "eigen_dual" => eigen_dual(seed),
        "resolvent" => resolvent(seed),
        "intervals" => intervals(seed, 100),
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Runs the named suites, or all of them.
pub fn run(selector: Option<&str>, seed: u64) -> Result<Vec<SuiteReport>, VerifyError> {
    match selector {
        None | Some("all") => SUITES.iter().map(|s| run_suite(s, seed)).collect(),
        Some(list) => list.split(',').map(|s| run_suite(s.trim(), seed)).collect(),
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_space<R: Rng>(rng: &mut R) -> Space {
    Space::new(rng.random_range(2..=3)).expect("dimension 2 or 3")
}

/// Largest `|τ_α(u₁u₂) − τ_α(u₁)τ_α(u₂)|` over `pairs` random pairs,
/// `directions` directions each and 50 points per direction.
pub fn morphism_residual(seed: u64, pairs: usize, directions: usize) -> f64 {
    let mut rng = rng_for(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let s = random_space(&mut rng);
        let u1 = random_element(&mut rng, s, 4, true);
        let u2 = random_element(&mut rng, s, 4, true);
        let prod = u1.mul(&u2);
        for _ in 0..directions {
            let a = random_direction(&mut rng, s);
            let (tp, t1, t2) = (prod.tau_alpha(&a), u1.tau_alpha(&a), u2.tau_alpha(&a));
            for _ in 0..50 {
                let x = random_point(&mut rng, s, 5.0);
                worst = worst.max((tp.eval(&x) - t1.eval(&x) * t2.eval(&x)).abs());
            }
        }
    }
    worst
}

/// Largest `|τ_α(τ_α(u)) − τ_α(u)|` over random elements and directions.
pub fn projection_residual(seed: u64, elements: usize, directions: usize) -> f64 {
    let mut rng = rng_for(seed, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..elements {
        let s = random_space(&mut rng);
        let u = random_element(&mut rng, s, 4, true);
        for _ in 0..directions {
            let a = random_direction(&mut rng, s);
            let t = u.tau_alpha(&a);
            let tt = t.tau_alpha(&a);
            for _ in 0..50 {
                let x = random_point(&mut rng, s, 5.0);
                worst = worst.max((tt.eval(&x) - t.eval(&x)).abs());
            }
        }
    }
    worst
}

/// `|u(r α̂ + x) − τ_α(u)(x)|` at `r = 10⁶` for random instances (largest value).
pub fn ray_limit_residual(seed: u64, instances: usize) -> f64 {
    let mut rng = rng_for(seed, 3);
    let r = 1e6;
    (0..instances)
        .map(|_| {
            let s = random_space(&mut rng);
            let u = random_element(&mut rng, s, 4, false);
            let a = random_direction(&mut rng, s);
            let x = random_point(&mut rng, s, 1.0);
            let far: Vec<f64> = x.iter().zip(a.unit()).map(|(xi, ai)| xi + r * ai).collect();
            (u.eval(&far) - u.tau_alpha(&a).eval(&x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest `|χ(uv) − χ(u)χ(v)|` over random triples; every fourth chain
/// has full length.
pub fn character_residual(seed: u64, triples: usize) -> f64 {
    let mut rng = rng_for(seed, 4);
    (0..triples)
        .map(|i| {
            let s = random_space(&mut rng);
            let u = random_element(&mut rng, s, 4, true);
            let v = random_element(&mut rng, s, 4, true);
            let len = if i % 4 == 0 { s.dim() } else { rng.random_range(0..=s.dim()) };
            let chain = random_chain(&mut rng, s, len);
            let chi = CharacterIndex::new(chain, &random_point(&mut rng, s, 5.0)).expect("point has length n");
            (u.mul(&v).character_eval(&chi) - u.character_eval(&chi) * v.character_eval(&chi)).abs()
        })
        .fold(0.0, f64::max)
}

fn morphism(seed: u64, pairs: usize, directions: usize) -> Vec<Check> {
    vec![Check::at_most("multiplicativity", morphism_residual(seed, pairs, directions), 1e-12)]
}

fn projection(seed: u64, elements: usize, directions: usize) -> Vec<Check> {
    vec![Check::at_most("idempotence", projection_residual(seed, elements, directions), 1e-12)]
}

fn ray_limit(seed: u64, instances: usize) -> Vec<Check> {
    let mut checks = vec![Check::at_most("ray_limit_1e6", ray_limit_residual(seed, instances), 1e-6)];
    // pure tails converge monotonically once past the cutoff radius
    let s = Space::new(2).expect("plane");
    let y = Subspace::from_vectors(s, &[vec![1, 2]]).expect("line");
    let u = Element::from_parts(y, RadialFunction::tail(1, BoundaryExpr::tanh(BoundaryExpr::coord(0)))).expect("tail");
    let a = Direction::from_integers(s, &[2, -1]).expect("direction");
    let x = [0.3, -0.4];
    let t = u.tau_alpha(&a).eval(&x);
    let errs: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|r| {
            let far: Vec<f64> = x.iter().zip(a.unit()).map(|(xi, ai)| xi + r * ai).collect();
            (u.eval(&far) - t).abs()
        })
        .collect();
    checks.push(Check::holds("tail_monotone", errs.windows(2).all(|w| w[1] <= w[0])));
    checks
}

fn character(seed: u64, triples: usize) -> Vec<Check> {
    let mut checks = vec![Check::at_most("multiplicativity", character_residual(seed, triples), 1e-12)];
    let mut rng = rng_for(seed, 5);
    let s = Space::new(2).expect("plane");
    let u = random_element(&mut rng, s, 3, false);
    let a = random_point(&mut rng, s, 3.0);
    let chi = CharacterIndex::new(DirectionChain::empty(s), &a).expect("point");
    checks.push(Check::at_most("empty_chain_is_evaluation", (u.character_eval(&chi) - u.eval(&a)).abs(), 0.0));
    checks.push(Check::at_most("unit", (Element::unit(s).character_eval(&chi) - 1.0).abs(), 0.0));
    checks
}

fn noncommute() -> Vec<Check> {
    let r = noncommute_demo();
    vec![Check::at_least("gap", r.gap, NONCOMMUTE_MIN_GAP)]
}

fn integer_lift(a: &Direction) -> Vec<i64> {
    a.primitive()
        .expect("random chains are rational")
        .iter()
        .map(|x| x.to_i64().expect("small lift"))
        .collect()
}

/// Perturbing a lift by earlier lifts leaves `τ_ᾱ` unchanged.
fn chain_lift(seed: u64, cases: usize) -> Vec<Check> {
    let mut rng = rng_for(seed, 6);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let s = random_space(&mut rng);
        let len = rng.random_range(2..=s.dim());
        let chain = random_chain(&mut rng, s, len);
        let u = random_element(&mut rng, s, 4, true);
        let mut lifts: Vec<Vec<i64>> = chain.lifts().iter().map(integer_lift).collect();
        let j = rng.random_range(1..len);
        for i in 0..j {
            let c: i64 = rng.random_range(-2..=2);
            let prev = lifts[i].clone();
            lifts[j].iter_mut().zip(&prev).for_each(|(x, p)| *x += c * p);
        }
        let moved = DirectionChain::from_integers(s, &lifts).expect("perturbed lifts stay independent");
        let (t1, t2) = (u.tau_chain(&chain), u.tau_chain(&moved));
        for _ in 0..20 {
            let x = random_point(&mut rng, s, 5.0);
            worst = worst.max((t1.eval(&x) - t2.eval(&x)).abs());
        }
    }
    vec![Check::at_most("lift_independence", worst, 1e-12)]
}

fn sampled_equal<R: Rng>(rng: &mut R, a: &Element, b: &Element) -> bool {
    (0..30).all(|_| {
        let x = random_point(rng, a.space(), 8.0);
        (a.eval(&x) - b.eval(&x)).abs() <= 1e-12
    })
}

/// `u` is invariant under `Y` exactly when `τ_α(u) = u` along a basis of `Y`.
fn fixed_point(seed: u64, cases: usize) -> Vec<Check> {
    let mut rng = rng_for(seed, 7);
    let cfg = InvarianceSampling::default();
    let mut agree = 0usize;
    let mut total = 0usize;
    for _ in 0..cases {
        let s = random_space(&mut rng);
        // sums of single generators, so invariance is decided by the kernels
        let mut u = Element::zero(s);
        for _ in 0..rng.random_range(1..=3) {
            u = u.add(&random_element(&mut rng, s, 1, false));
        }
        let y = random_subspace(&mut rng, s);
        if y.is_zero() {
            continue;
        }
        let invariant = u.is_invariant_under(&y, &cfg);
        let fixed = y.basis_i64().expect("small rows").iter().all(|row| {
            let a = Direction::from_integers(s, row).expect("basis row");
            sampled_equal(&mut rng, &u.tau_alpha(&a), &u) && sampled_equal(&mut rng, &u.tau_alpha(&a.negate()), &u)
        });
        total += 1;
        agree += usize::from(invariant == fixed);
    }
    vec![Check::at_least("agreement", agree as f64 / total.max(1) as f64, 1.0)]
}

/// Invariance under `Y` and `Z` implies invariance under `Y + Z`.
fn sum_rule(seed: u64, cases: usize) -> Vec<Check> {
    let mut rng = rng_for(seed, 8);
    let cfg = InvarianceSampling::default();
    let mut violations = 0usize;
    let mut tested = 0usize;
    for _ in 0..cases {
        let s = random_space(&mut rng);
        let u = random_element(&mut rng, s, 3, false);
        // test against subspaces of the kernels, where invariance is likely
        let kernels = u.subspaces();
        let pick = |rng: &mut ChaCha8Rng| -> Subspace {
            if kernels.is_empty() || rng.random_bool(0.3) {
                random_subspace(rng, s)
            } else {
                kernels[rng.random_range(0..kernels.len())].clone()
            }
        };
        let (y, z) = (pick(&mut rng), pick(&mut rng));
        if u.is_invariant_under(&y, &cfg) && u.is_invariant_under(&z, &cfg) {
            tested += 1;
            let w = y.sum(&z).expect("same space");
            violations += usize::from(!u.is_invariant_under(&w, &cfg));
        }
    }
    vec![
        Check::at_most("violations", violations as f64, 0.0),
        Check::at_least("instances_tested", tested as f64, 1.0),
    ]
}

fn geometry(seed: u64, cases: usize) -> Vec<Check> {
    let mut rng = rng_for(seed, 9);
    let mut formula = true;
    let mut canonical = true;
    let mut quotient = true;
    for _ in 0..cases {
        let s = Space::new(rng.random_range(1..=4)).expect("dimension 1..=4");
        let y = random_subspace(&mut rng, s);
        let z = random_subspace(&mut rng, s);
        let sum = y.sum(&z).expect("same space");
        let cap = y.intersect(&z).expect("same space");
        formula &= sum.dim() + cap.dim() == y.dim() + z.dim();
        formula &= sum.contains_subspace(&y) && y.contains_subspace(&cap);
        let again = Subspace::from_rationals(s, &y.basis_rational()).expect("rows");
        canonical &= again == y && again.basis() == y.basis();
        let q = y.quotient_map();
        quotient &= q.quotient_dim() == s.dim() - y.dim();
        for row in y.basis_rational() {
            quotient &= q.apply_rational(&row).iter().all(|c| *c == Rational::from_integer(0.into()));
        }
    }
    vec![
        Check::holds("dimension_formula", formula),
        Check::holds("canonical_form", canonical),
        Check::holds("quotient_kernel", quotient),
    ]
}

fn sample_operators(seed: u64) -> Vec<(String, DiscreteOperator)> {
    let mut rng = rng_for(seed, 10);
    let mut out = Vec::new();
    let g1 = GridSpec::uniform(1, 128, 10.0).expect("grid");
    let s1 = Space::new(1).expect("line");
    let u1 = random_element(&mut rng, s1, 3, true);
    out.push((
        "laplacian_1d".into(),
        DiscreteOperator::assemble(&KineticSymbol::laplacian(), &u1, &g1).expect("assemble"),
    ));
    out.push((
        "relativistic_1d".into(),
        DiscreteOperator::assemble(&KineticSymbol::relativistic(vec![1.0]), &u1, &g1).expect("assemble"),
    ));
    let g2 = GridSpec::uniform(2, 16, 5.0).expect("grid");
    let s2 = Space::new(2).expect("plane");
    let u2 = random_element(&mut rng, s2, 3, true);
    out.push((
        "laplacian_2d".into(),
        DiscreteOperator::assemble(&KineticSymbol::laplacian(), &u2, &g2).expect("assemble"),
    ));
    // g₁₁ = 1 + 0.5 tanh-tail, plus a symmetric first-order part
    let tail = Element::from_parts(Subspace::zero(s1), RadialFunction::tail(1, BoundaryExpr::coord(0))).expect("tail");
    let g11 = Element::constant(s1, 1.0).add(&tail.scale(0.5));
    let g01 = tail.scale(0.2);
    let table = vec![
        vec![Some(Element::constant(s1, 0.3)), Some(g01.clone())],
        vec![Some(g01), Some(g11)],
    ];
    out.push((
        "divergence_1d".into(),
        DiscreteOperator::assemble_divergence(&table, &g1).expect("assemble"),
    ));
    out
}

fn hermiticity(seed: u64) -> Vec<Check> {
    sample_operators(seed)
        .iter()
        .map(|(name, op)| Check::at_most(name.clone(), hermiticity_residual(op, 20, seed), 1e-10))
        .collect()
}

fn eigen_dual(seed: u64) -> Vec<Check> {
    let g = GridSpec::uniform(1, 64, 8.0).expect("grid");
    let v: Vec<f64> = g.nodes(0).iter().map(|x| -2.0 * (-x * x).exp() + 0.5 * x.tanh()).collect();
    let op = DiscreteOperator::from_samples(&KineticSymbol::laplacian(), &g, v).expect("operator");
    let dense = dense_eigenvalues(&op).expect("dense");
    let mut checks = Vec::new();
    for (label, shift) in [("krylov_plain", Shift::None), ("krylov_shift_invert", Shift::Auto)] {
        let opts = KrylovOptions {
            shift,
            seed,
            ..KrylovOptions::default()
        };
        let value = match lowest_k(&op, 8, &opts) {
            Ok(low) => low.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        };
        checks.push(Check::at_most(label, value, 1e-8));
    }
    checks
}

fn resolvent(seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 11);
    let mut checks = Vec::new();
    for (name, op) in sample_operators(seed) {
        let z = op.lower_bound().unwrap_or(-10.0) - 1.0;
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let f = random_vector(&mut rng, op.size());
            let Ok(u) = resolvent_apply(&op, z, &f) else {
                worst = f64::INFINITY;
                break;
            };
            let back: Vec<Complex64> = op.apply(&u).iter().zip(&u).map(|(a, b)| a - z * b).collect();
            let err = back.iter().zip(&f).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
                / f.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(err);
        }
        checks.push(Check::at_most(format!("{name}_identity"), worst, 1e-8));
    }
    checks
}

fn intervals(seed: u64, cases: usize) -> Vec<Check> {
    let mut rng = rng_for(seed, 12);
    let tol = 0.05;
    let random_set = |rng: &mut ChaCha8Rng| {
        let eigs: Vec<f64> = (0..rng.random_range(0..12)).map(|_| rng.random_range(-5.0..5.0)).collect();
        SpectrumSet::merge_intervals(&eigs, tol)
    };
    let (mut commutative, mut associative, mut zero_self) = (true, true, true);
    for _ in 0..cases {
        let (a, b, c) = (random_set(&mut rng), random_set(&mut rng), random_set(&mut rng));
        commutative &= a.union(&b).intervals() == b.union(&a).intervals();
        associative &= a.union(&b).union(&c).intervals() == a.union(&b.union(&c)).intervals();
        zero_self &= a.hausdorff(&a) == 0.0;
    }
    let merged = SpectrumSet::merge_intervals(&[0.0, 0.5, 1.0], 0.3);
    let split = SpectrumSet::merge_intervals(&[0.0, 10.0], 0.3);
    let h = SpectrumSet::from_intervals(vec![(0.0, 1.0)], tol)
        .hausdorff(&SpectrumSet::from_intervals(vec![(0.0, 1.0), (5.0, 6.0)], tol));
    vec![
        Check::holds("union_commutative", commutative),
        Check::holds("union_associative", associative),
        Check::holds("hausdorff_self_zero", zero_self),
        Check::holds("merge_bridges", merged.intervals() == [(-0.3, 1.3)]),
        Check::holds("merge_separates", split.intervals().len() == 2),
        Check::at_most("hausdorff_example", (h - 5.0).abs(), 1e-12),
    ]
}
