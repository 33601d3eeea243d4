//! `oracle-check`: brute-force validation suites at oracle scale.
//!
//! Three suites: GRAND vs exhaustive ML likelihood equivalence, normalized
//! guesswork-moment growth against the SCGF, and the rate function against
//! a dense conjugate grid search. Each prints one pass/fail line; any
//! failure makes the command exit nonzero.

use grandsim_core::bits::Bits;
use grandsim_core::exponents::{guesswork_scgf, min_entropy_rate, rate_function};
use grandsim_core::grand::{grand_decode, ml_decode_exhaustive, DecodeOutcome};
use grandsim_core::noise::{BscNoise, NoiseModel};
use grandsim_core::LinearCode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::{Cli, CliError};

/// `(1/n) log2 E[G^alpha]` computed exactly from the sorted guesswork
/// distribution.
pub fn normalized_guesswork_moment(model: &NoiseModel, n: usize, alpha: f64) -> f64 {
    let dist = model
        .guesswork_distribution(n)
        .expect("oracle-scale length");
    let total: f64 = dist
        .iter()
        .enumerate()
        .map(|(j, p)| ((j + 1) as f64).powf(alpha) * p)
        .sum();
    total.log2() / n as f64
}

/// Dense grid maximization of `g*a - L(a)` over the open branch plus the
/// boundary branch; independent of the bisection path.
pub fn conjugate_grid_oracle(model: &NoiseModel, g: f64, step: f64) -> f64 {
    let mut best = min_entropy_rate(model) - g;
    let mut alpha = -0.9999;
    while alpha <= 64.0 {
        best = best.max(g * alpha - guesswork_scgf(model, alpha));
        alpha += step;
    }
    best
}

pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn ml_equivalence_suite(trials: u64, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code = LinearCode::sample_rlc(16, 11, &mut rng).expect("[16,11] dimensions");
    let mut mismatches = 0u64;
    for p in [0.05, 0.2] {
        let model = NoiseModel::Bsc(BscNoise::new(p).unwrap());
        for _ in 0..trials {
            let u = Bits::random(11, &mut rng);
            let x = code.encode(&u).unwrap();
            let z = model.sample(16, &mut rng);
            let y = x.xor(&z);
            let dec = grand_decode(&code, &model, &y, None).unwrap();
            let effect = match dec.outcome {
                DecodeOutcome::Decoded { noise_effect, .. } => noise_effect,
                DecodeOutcome::Abandoned => unreachable!("unbounded"),
            };
            let ml = ml_decode_exhaustive(&code, &model, &y).unwrap();
            if model.log2_likelihood(&effect) != ml.noise_log2_likelihood {
                mismatches += 1;
            }
        }
    }
    SuiteReport {
        name: "ml_equivalence".into(),
        passed: mismatches == 0,
        detail: format!("{mismatches} likelihood mismatches in {} decodes", 2 * trials),
    }
}

pub struct MomentCase {
    pub p: f64,
    pub alpha: f64,
    pub scgf: f64,
    pub gaps: Vec<f64>,
    pub trend_monotone: bool,
}

pub fn moment_cases() -> Vec<MomentCase> {
    let mut cases = Vec::new();
    for p in [0.1, 0.25] {
        let model = NoiseModel::Bsc(BscNoise::new(p).unwrap());
        for alpha in [0.5, 1.0, 2.0] {
            let scgf = guesswork_scgf(&model, alpha);
            let gaps: Vec<f64> = (8..=16)
                .map(|n| (normalized_guesswork_moment(&model, n, alpha) - scgf).abs())
                .collect();
            let trend_monotone = gaps.windows(2).all(|w| w[1] <= w[0] + 1e-9);
            cases.push(MomentCase {
                p,
                alpha,
                scgf,
                gaps,
                trend_monotone,
            });
        }
    }
    cases
}

pub fn moment_suite() -> SuiteReport {
    let cases = moment_cases();
    let mut passed = true;
    let mut detail = String::new();
    for c in &cases {
        let final_gap = *c.gaps.last().unwrap();
        let ok = c.trend_monotone && final_gap < 0.05;
        passed &= ok;
        detail.push_str(&format!(
            "p={} alpha={}: gap@16={:.4} (target < 0.05), trend monotone: {}; ",
            c.p, c.alpha, final_gap, c.trend_monotone
        ));
    }
    SuiteReport {
        name: "guesswork_moment".into(),
        passed,
        detail,
    }
}

pub fn conjugate_suite(pairs: u64, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let p = rng.gen_range(0.005..0.45);
        let g = rng.gen_range(0.0..1.0);
        let model = NoiseModel::Bsc(BscNoise::new(p).unwrap());
        let fast = rate_function(&model, g).value;
        let grid = conjugate_grid_oracle(&model, g, 1e-4);
        worst = worst.max((fast - grid).abs());
    }
    SuiteReport {
        name: "conjugate_oracle".into(),
        passed: worst <= 1e-6,
        detail: format!("worst |bisection - grid| = {worst:.3e} over {pairs} pairs"),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let trials = cli.trials.unwrap_or(1000);
    let seed = cli.seed.unwrap_or(1);
    let reports = vec![
        ml_equivalence_suite(trials, seed),
        moment_suite(),
        conjugate_suite(50, seed),
    ];
    let mut all_passed = true;
    for r in &reports {
        println!(
            "suite {}: {} ({})",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
        all_passed &= r.passed;
    }
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Failure("one or more oracle suites failed".into()))
    }
}
