//! Acceptance suite. Prints one pass/fail line per criterion, then fails if
//! any criterion did.
//!
//! ```text
//! cargo test -p benford-core --test acceptance -- --nocapture
//! ```

#![allow(clippy::approx_constant)]

use std::time::{Duration, Instant};

use benford_core::analyze::{empirical_digit_distribution, fit_report, scale_invariance_report};
use benford_core::construct::{benford_partition, construct_n_digit, verify_n_digit, BumpFamily};
use benford_core::density::{mod1_project, Piece, PieceShape, PiecewiseDensity};
use benford_core::digits::{
    benford_block_prob, extract_digits, full_digit_distribution, DigitBlock, DigitDistribution,
};
use benford_core::presets;
use benford_core::sample::{chunk_rng, sample_y};
use rand_core::RngCore;

const TABLE_ROW: [f64; 9] = [0.3010, 0.1761, 0.1249, 0.0969, 0.0792, 0.0669, 0.0580, 0.0512, 0.0458];
const TABLE_TOL: f64 = 0.005;
const MIN_P_VALUE: f64 = 0.001;
const TABLE_BUDGET: Duration = Duration::from_secs(10);
const SEED: u64 = 42;
const DRAWS: usize = 100_000;

const EXACT_TOL: f64 = 1e-12;
const N_DIGIT_TOL: f64 = 1e-9;
const NEXT_LEVEL_MIN_ERROR: f64 = 1e-4;
const SINE_MIN_DEVIATION: f64 = 0.01;
const INVARIANCE_BUDGET: Duration = Duration::from_secs(5);
const RIEMANN_PANELS: usize = 1_000_000;
const RIEMANN_TOL: f64 = 1e-7;
const PROJECTION_TOL: f64 = 1e-10;
const DIGIT_CASES: usize = 100_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Seeded sample of the first-digit sine density, as text.
fn table_run() -> (Vec<u8>, DigitDistribution, Duration) {
    let start = Instant::now();
    let set = sample_y(&presets::sine_one_digit(), DRAWS, SEED).unwrap();
    let emp = empirical_digit_distribution(set.values(), 1).unwrap();
    let elapsed = start.elapsed();
    let mut bytes = Vec::new();
    set.write_csv(&mut bytes).unwrap();
    bytes.extend_from_slice(emp.to_csv_string().as_bytes());
    (bytes, emp, elapsed)
}

fn table_reproduction() -> Outcome {
    let (_, emp, elapsed) = table_run();
    let max_dev = emp.probabilities().iter().zip(TABLE_ROW).map(|(e, t)| (e - t).abs()).fold(0.0, f64::max);
    let fit = fit_report(&emp, &DigitDistribution::benford(10, 1).unwrap()).unwrap();
    outcome(
        max_dev <= TABLE_TOL && fit.p_value > MIN_P_VALUE && elapsed < TABLE_BUDGET,
        format!(
            "max |emp - table| = {max_dev:.5} (<= {TABLE_TOL}), p = {:.4} (> {MIN_P_VALUE}), {:.2?} (< {TABLE_BUDGET:?})",
            fit.p_value, elapsed
        ),
    )
}

fn block_probability() -> Outcome {
    let p = benford_block_prob(&DigitBlock::new(vec![8, 4, 7]).unwrap());
    let expected = (848.0f64 / 847.0).log10();
    let err = (p - expected).abs();
    outcome(err <= EXACT_TOL && format!("{p:.6}") == "0.000512", format!("P(847) = {p:.6}, error {err:.1e}"))
}

fn geometric_construction() -> Outcome {
    let g_dag = mod1_project(&presets::geometric_steps(presets::GEOMETRIC_TERMS).unwrap());
    let flat = (0..1000).map(|i| (g_dag.evaluate(i as f64 / 1000.0) - 1.0).abs()).fold(0.0, f64::max);
    let digits = full_digit_distribution(&g_dag, 1).unwrap();
    let benford = digits.max_abs_diff(&DigitDistribution::benford(10, 1).unwrap()).unwrap();
    outcome(
        flat <= EXACT_TOL && benford <= EXACT_TOL,
        format!("max |g_dag - 1| = {flat:.1e}, max first-digit error {benford:.1e} (<= {EXACT_TOL:.0e})"),
    )
}

fn n_digit_construction() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=2 {
        let g_dag = construct_n_digit(&benford_partition(n).unwrap(), &BumpFamily::named("sine").unwrap()).unwrap();
        let at = verify_n_digit(&g_dag, n).unwrap();
        let next = verify_n_digit(&g_dag, n + 1).unwrap();
        pass &= at.max_abs_error <= N_DIGIT_TOL && next.max_abs_error > NEXT_LEVEL_MIN_ERROR;
        parts.push(format!("n={n}: {:.1e} at n, {:.1e} at n+1", at.max_abs_error, next.max_abs_error));
    }
    outcome(pass, parts.join("; "))
}

fn invariance_experiment() -> Outcome {
    let scales: Vec<f64> = (0..100).map(|i| 10f64.powf(i as f64 / 100.0)).collect();
    let start = Instant::now();
    let uniform = scale_invariance_report(&presets::uniform(), &scales, 1).unwrap();
    let sine = scale_invariance_report(&presets::sine_one_digit(), &scales, 1).unwrap();
    let elapsed = start.elapsed();
    outcome(
        uniform.max_deviation <= EXACT_TOL && sine.max_deviation > SINE_MIN_DEVIATION && elapsed < INVARIANCE_BUDGET,
        format!(
            "uniform max TV {:.1e} (<= {EXACT_TOL:.0e}), sine max TV {:.4} (> {SINE_MIN_DEVIATION}), {elapsed:.2?}",
            uniform.max_deviation, sine.max_deviation
        ),
    )
}

fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = (b - a) / RIEMANN_PANELS as f64;
    (0..RIEMANN_PANELS).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

fn oracle_equivalence() -> Outcome {
    let shapes = [
        PieceShape::Constant { level: 2.5 },
        PieceShape::Linear { left: 0.3, right: 1.7 },
        PieceShape::SineBump,
        PieceShape::Tabulated { ordinates: vec![0.2, 1.5, 0.7, 0.9, 2.0] },
    ];
    let mut riemann = 0.0f64;
    for shape in shapes {
        let g = PiecewiseDensity::new(vec![Piece { lo: 0.5, hi: 2.0, shape, weight: 1.0 }]).unwrap();
        let (a, b) = (0.61, 1.87);
        let closed = g.integrate(a, b).unwrap();
        riemann = riemann.max((closed - midpoint(|x| g.evaluate(x), a, b)).abs());
    }
    let tri = presets::triangle(0.0, 1.5, 3.0).unwrap();
    let g_dag = mod1_project(&tri);
    let projection = (0..1000)
        .map(|i| {
            let x = i as f64 / 1000.0;
            let direct: f64 = (-1..=4).map(|k| tri.evaluate(x + k as f64)).sum();
            (g_dag.evaluate(x) - direct).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        riemann <= RIEMANN_TOL && projection <= PROJECTION_TOL,
        format!(
            "integrate vs Riemann {riemann:.1e} (<= {RIEMANN_TOL:.0e}), triangle projection {projection:.1e} (<= {PROJECTION_TOL:.0e})"
        ),
    )
}

/// Leading `n` digits of the exact decimal expansion of `y`.
fn decimal_oracle(y: f64, n: usize) -> Vec<u8> {
    // 800 significant digits exceed the exact expansion of every f64
    let text = format!("{y:.800e}");
    text.bytes().filter(u8::is_ascii_digit).take(n).map(|c| c - b'0').collect()
}

fn digit_extraction() -> Outcome {
    let mut rng = chunk_rng(7, 0);
    let mut mismatches = 0;
    for i in 0..DIGIT_CASES {
        let u = (rng.next_u64() >> 11) as f64 * (-53f64).exp2();
        let y = 10f64.powf(600.0 * u - 300.0);
        let n = 1 + i % 6;
        if extract_digits(y, n).unwrap().digits() != decimal_oracle(y, n) {
            mismatches += 1;
        }
    }
    let d2 = extract_digits(2.718, 2).unwrap();
    let known = extract_digits(2.718, 1).unwrap().digits() == [2] && d2.digits() == [2, 7];
    outcome(
        mismatches == 0 && known,
        format!("{mismatches} mismatches in {DIGIT_CASES}; D1(2.718) = 2, D2(2.718) = {}", d2.digits()[1]),
    )
}

fn determinism() -> Outcome {
    let (first, _, _) = table_run();
    let (second, _, _) = table_run();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(table_run).0;
    outcome(
        first == second && first == single,
        format!("{} bytes, identical across repeats and a one-thread pool", first.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("table reproduction", table_reproduction),
        ("block probability exactness", block_probability),
        ("geometric construction", geometric_construction),
        ("n-digit construction", n_digit_construction),
        ("scale invariance experiment", invariance_experiment),
        ("oracle equivalence", oracle_equivalence),
        ("digit extraction", digit_extraction),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let r = check();
        println!("criterion {} ({name}): {} - {}", i + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
        if !r.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
