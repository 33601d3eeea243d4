//! Monte Carlo eavesdropper sweeps.
//!
//! Each point draws uniform messages, corrupts the codeword with sampled
//! noise, decodes with a query budget and aggregates the outcome counters.
//! Per-trial random streams are derived from (seed, trial index) alone, so
//! results are independent of scheduling, and every query budget at the
//! same channel point sees the same messages and noise realizations. That
//! coupling is what makes budget comparisons (the whole point of the
//! sweeps) low-variance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bits::Bits;
use crate::code::LinearCode;
use crate::grand::{grand_decode, DecodeOutcome, GrandError};
use crate::noise::{BscNoise, MarkovNoise, NoiseError, NoiseModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("decode failed: {0}")]
    Decode(#[from] GrandError),
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
    #[error("cannot build noise model for p = {p}: {source}")]
    Model { p: f64, source: NoiseError },
}

/// Query budget of one decode arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Abandonment {
    /// Abandon after `2^exponent` failed queries.
    AtExponent(u32),
    Unbounded,
}

impl Abandonment {
    pub fn max_queries(&self) -> Option<u64> {
        match self {
            Abandonment::AtExponent(a) => Some(1u64 << a),
            Abandonment::Unbounded => None,
        }
    }

    pub fn exponent(&self) -> Option<u32> {
        match self {
            Abandonment::AtExponent(a) => Some(*a),
            Abandonment::Unbounded => None,
        }
    }
}

/// Noise family swept over the channel-parameter grid. The Markov variant
/// is a burst chain pinned to stationary flip probability p: the burst
/// state persists with the given probability and the quiet-to-burst rate is
/// solved so the stationary distribution puts mass p on the burst state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Bsc,
    MarkovBurst { persistence: f64 },
}

impl NoiseKind {
    /// Instantiates the model at flip probability `p`.
    pub fn model_at(&self, p: f64) -> Result<NoiseModel, SimError> {
        match self {
            NoiseKind::Bsc => BscNoise::new(p)
                .map(NoiseModel::Bsc)
                .map_err(|source| SimError::Model { p, source }),
            NoiseKind::MarkovBurst { persistence } => {
                let b = *persistence;
                let a = p * (1.0 - b) / (1.0 - p);
                MarkovNoise::new([[1.0 - a, a], [1.0 - b, b]], [1.0 - p, p])
                    .map(NoiseModel::Markov)
                    .map_err(|source| SimError::Model { p, source })
            }
        }
    }
}

/// Everything one sweep needs: code dimensions, channel grid, query
/// budgets, trial count and seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub p_grid: Vec<f64>,
    pub abandonments: Vec<Abandonment>,
    pub trials: u64,
    pub master_seed: u64,
    pub code_seed: u64,
    pub noise: NoiseKind,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.k == 0 || self.k >= self.n {
            return Err(SimError::InvalidConfig(format!(
                "need 1 <= k < n, got n={} k={}",
                self.n, self.k
            )));
        }
        if self.trials == 0 {
            return Err(SimError::InvalidConfig("trials must be >= 1".into()));
        }
        if self.p_grid.is_empty() {
            return Err(SimError::InvalidConfig("empty p grid".into()));
        }
        for &p in &self.p_grid {
            if !(p > 0.0 && p < 0.5) {
                return Err(SimError::InvalidConfig(format!(
                    "flip probability {p} outside (0, 0.5)"
                )));
            }
        }
        if self.abandonments.is_empty() {
            return Err(SimError::InvalidConfig("no abandonment arms".into()));
        }
        let redundancy = (self.n - self.k) as u32;
        for arm in &self.abandonments {
            if let Abandonment::AtExponent(a) = arm {
                if *a < 1 || *a > redundancy {
                    return Err(SimError::InvalidConfig(format!(
                        "abandonment exponent {a} outside 1..={redundancy}"
                    )));
                }
            }
        }
        if let NoiseKind::MarkovBurst { persistence } = self.noise {
            if !(0.0..1.0).contains(&persistence) {
                return Err(SimError::InvalidConfig(format!(
                    "burst persistence {persistence} outside [0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// Aggregated counters of one (channel point, abandonment) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PointAggregate {
    pub p: f64,
    pub abandonment: Abandonment,
    pub trials: u64,
    pub successes: u64,
    pub wrong: u64,
    pub abandoned: u64,
    pub total_queries: u64,
}

impl PointAggregate {
    /// Block error rate; abandonment counts as an error.
    pub fn bler(&self) -> f64 {
        (self.wrong + self.abandoned) as f64 / self.trials as f64
    }

    /// Fraction of trials decoded to the transmitted codeword.
    pub fn success_prob(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Success probability conditioned on not abandoning; `None` when every
    /// trial abandoned.
    pub fn cond_success_prob(&self) -> Option<f64> {
        let decoded = self.successes + self.wrong;
        if decoded == 0 {
            None
        } else {
            Some(self.successes as f64 / decoded as f64)
        }
    }

    /// Fraction of trials that produced a decoding at all.
    pub fn frac_decoded(&self) -> f64 {
        (self.successes + self.wrong) as f64 / self.trials as f64
    }

    pub fn mean_queries(&self) -> f64 {
        self.total_queries as f64 / self.trials as f64
    }

    /// Total queries spent per correct decoding, counting the work of wrong
    /// and abandoned trials in between; `None` without successes.
    pub fn mean_queries_per_success(&self) -> Option<f64> {
        if self.successes == 0 {
            None
        } else {
            Some(self.total_queries as f64 / self.successes as f64)
        }
    }

    /// Binomial standard error for a fraction estimated from `trials`.
    pub fn binomial_se(fraction: f64, trials: u64) -> f64 {
        (fraction * (1.0 - fraction) / trials as f64).sqrt()
    }
}

/// One failed sweep cell, kept alongside the successful rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub p: f64,
    pub abandonment: Abandonment,
    pub error: SimError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Successful cells, sorted by (abandonment, p).
    pub rows: Vec<PointAggregate>,
    pub failures: Vec<PointFailure>,
}

/// splitmix64; used to derive per-point seeds from the master seed.
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

pub fn derive_point_seed(master_seed: u64, p_index: usize) -> u64 {
    mix64(master_seed ^ mix64(p_index as u64 + 1))
}

fn trial_rng(point_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&point_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&trial.to_le_bytes());
    seed[16..24].copy_from_slice(b"gsimtrlz");
    ChaCha8Rng::from_seed(seed)
}

/// Runs one cell: `trials` independent transmissions decoded with the given
/// budget. Deterministic given (seed, trial index), whatever the execution
/// order. The per-trial stream draws the message first, then the noise.
pub fn run_point(
    code: &LinearCode,
    model: &NoiseModel,
    abandonment: Abandonment,
    trials: u64,
    seed: u64,
    p_label: f64,
) -> Result<PointAggregate, SimError> {
    let max_queries = abandonment.max_queries();
    let counters = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(u64, u64, u64, u64), SimError> {
            let mut rng = trial_rng(seed, trial);
            let u = Bits::random(code.k(), &mut rng);
            let x = code.encode(&u).expect("message length matches k");
            let z = model.sample(code.n(), &mut rng);
            let y = x.xor(&z);
            let result = grand_decode(code, model, &y, max_queries)?;
            let (s, w, a) = match &result.outcome {
                DecodeOutcome::Decoded { codeword, .. } => {
                    if *codeword == x {
                        (1, 0, 0)
                    } else {
                        (0, 1, 0)
                    }
                }
                DecodeOutcome::Abandoned => (0, 0, 1),
            };
            Ok((s, w, a, result.queries))
        })
        .try_reduce(
            || (0, 0, 0, 0),
            |acc, item| Ok((acc.0 + item.0, acc.1 + item.1, acc.2 + item.2, acc.3 + item.3)),
        )?;
    Ok(PointAggregate {
        p: p_label,
        abandonment,
        trials,
        successes: counters.0,
        wrong: counters.1,
        abandoned: counters.2,
        total_queries: counters.3,
    })
}

/// Runs the whole grid. The code is sampled once from `code_seed`; each
/// channel point gets its own seed derived from the master seed and shares
/// it across the abandonment arms.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput, SimError> {
    config.validate()?;
    let mut code_rng = ChaCha8Rng::seed_from_u64(config.code_seed);
    let code = LinearCode::sample_rlc(config.n, config.k, &mut code_rng)
        .map_err(|e| SimError::InvalidConfig(e.to_string()))?;

    let mut cells: Vec<(usize, Abandonment)> = Vec::new();
    for (pi, _) in config.p_grid.iter().enumerate() {
        for arm in &config.abandonments {
            cells.push((pi, *arm));
        }
    }

    let results: Vec<Result<PointAggregate, PointFailure>> = cells
        .par_iter()
        .map(|&(pi, arm)| {
            let p = config.p_grid[pi];
            let seed = derive_point_seed(config.master_seed, pi);
            let model = config
                .noise
                .model_at(p)
                .map_err(|error| PointFailure {
                    p,
                    abandonment: arm,
                    error,
                })?;
            run_point(&code, &model, arm, config.trials, seed, p).map_err(|error| PointFailure {
                p,
                abandonment: arm,
                error,
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    rows.sort_by(|a, b| {
        a.abandonment
            .cmp(&b.abandonment)
            .then(a.p.partial_cmp(&b.p).unwrap())
    });
    failures.sort_by(|a, b| {
        a.abandonment
            .cmp(&b.abandonment)
            .then(a.p.partial_cmp(&b.p).unwrap())
    });
    Ok(SweepOutput { rows, failures })
}

/// Largest abandonment exponent whose conditional success probability still
/// reaches `target`, or `None` if none does. Binary search first (the
/// conditional success rate is empirically nonincreasing in the exponent);
/// if the evaluated points contradict that, falls back to a full scan.
pub fn empirical_confidence_threshold(
    code: &LinearCode,
    model: &NoiseModel,
    target: f64,
    trials: u64,
    seed: u64,
) -> Result<Option<u32>, SimError> {
    assert!(target > 0.0 && target < 1.0, "target must lie in (0, 1)");
    let a_max = (code.n() - code.k()) as u32;
    let mut evaluated: Vec<(u32, Option<f64>)> = Vec::new();
    let eval = |a: u32, evaluated: &mut Vec<(u32, Option<f64>)>| -> Result<Option<f64>, SimError> {
        if let Some((_, c)) = evaluated.iter().find(|(aa, _)| *aa == a) {
            return Ok(*c);
        }
        let agg = run_point(
            code,
            model,
            Abandonment::AtExponent(a),
            trials,
            seed,
            f64::NAN,
        )?;
        let c = agg.cond_success_prob();
        evaluated.push((a, c));
        Ok(c)
    };
    let qualifies = |c: Option<f64>| c.is_some_and(|c| c >= target);

    let mut lo = 1u32;
    let mut hi = a_max;
    if !qualifies(eval(lo, &mut evaluated)?) {
        lo = 0; // even the smallest budget fails
    } else if qualifies(eval(hi, &mut evaluated)?) {
        lo = hi;
    } else {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if qualifies(eval(mid, &mut evaluated)?) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    // monotonicity audit over everything we measured
    evaluated.sort_by_key(|(a, _)| *a);
    let monotone = evaluated.windows(2).all(|w| {
        let (_, c1) = w[0];
        let (_, c2) = w[1];
        match (c1, c2) {
            (Some(c1), Some(c2)) => c1 >= c2,
            // an undefined (all-abandoned) cell only makes sense at small a
            (None, _) => true,
            (Some(_), None) => false,
        }
    });
    if !monotone {
        let mut best = None;
        for a in 1..=a_max {
            if qualifies(eval(a, &mut evaluated)?) {
                best = Some(a);
            }
        }
        return Ok(best);
    }
    Ok(if lo == 0 { None } else { Some(lo) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{binary_entropy, channel_summary};

    fn sample_code(n: usize, k: usize, seed: u64) -> LinearCode {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        LinearCode::sample_rlc(n, k, &mut rng).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut cfg = SweepConfig {
            n: 16,
            k: 11,
            p_grid: vec![0.1],
            abandonments: vec![Abandonment::AtExponent(3), Abandonment::Unbounded],
            trials: 10,
            master_seed: 1,
            code_seed: 2,
            noise: NoiseKind::Bsc,
        };
        assert!(cfg.validate().is_ok());
        cfg.p_grid = vec![0.6];
        assert!(cfg.validate().is_err());
        cfg.p_grid = vec![0.1];
        cfg.abandonments = vec![Abandonment::AtExponent(6)];
        assert!(cfg.validate().is_err());
        cfg.abandonments = vec![Abandonment::AtExponent(0)];
        assert!(cfg.validate().is_err());
        cfg.abandonments = vec![Abandonment::Unbounded];
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn burst_kind_hits_requested_stationary_flip_rate() {
        let kind = NoiseKind::MarkovBurst { persistence: 0.8 };
        let model = kind.model_at(0.1).unwrap();
        match &model {
            NoiseModel::Markov(m) => {
                let t = m.transition();
                let stationary_burst = t[0][1] / (t[0][1] + t[1][0]);
                assert!((stationary_burst - 0.1).abs() < 1e-12);
            }
            _ => panic!("expected a Markov model"),
        }
    }

    #[test]
    fn near_noiseless_point_decodes_instantly() {
        let code = sample_code(128, 116, 40);
        let model = NoiseKind::Bsc.model_at(1e-6).unwrap();
        let agg = run_point(&code, &model, Abandonment::Unbounded, 500, 7, 1e-6).unwrap();
        assert!(agg.bler() <= 0.01);
        assert!(agg.mean_queries() < 1.5);
    }

    #[test]
    fn counter_algebra_and_identities() {
        let code = sample_code(16, 11, 41);
        let model = NoiseKind::Bsc.model_at(0.08).unwrap();
        for arm in [
            Abandonment::AtExponent(2),
            Abandonment::AtExponent(5),
            Abandonment::Unbounded,
        ] {
            let agg = run_point(&code, &model, arm, 400, 9, 0.08).unwrap();
            assert_eq!(agg.successes + agg.wrong + agg.abandoned, agg.trials);
            assert!((agg.bler() - (1.0 - agg.success_prob())).abs() < 1e-12);
            assert!(agg.success_prob() <= agg.frac_decoded());
            if let Some(c) = agg.cond_success_prob() {
                assert!((c * agg.frac_decoded() - agg.success_prob()).abs() < 1e-12);
            }
            if let Some(cap) = arm.max_queries() {
                assert!(agg.mean_queries() <= cap as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn sweeps_are_reproducible_and_order_independent() {
        let cfg = SweepConfig {
            n: 16,
            k: 11,
            p_grid: vec![0.02, 0.1, 0.2],
            abandonments: vec![
                Abandonment::AtExponent(2),
                Abandonment::AtExponent(5),
                Abandonment::Unbounded,
            ],
            trials: 200,
            master_seed: 77,
            code_seed: 78,
            noise: NoiseKind::Bsc,
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.failures.is_empty());
        assert_eq!(a.rows.len(), 9);
        // permuting the declared grids leaves per-cell aggregates intact
        let mut cfg2 = cfg.clone();
        cfg2.abandonments.reverse();
        let c = run_sweep(&cfg2).unwrap();
        assert_eq!(a.rows, c.rows);
        // rows come out sorted by (abandonment, p)
        for w in a.rows.windows(2) {
            assert!(
                (w[0].abandonment, w[0].p) <= (w[1].abandonment, w[1].p),
                "rows out of order"
            );
        }
    }

    #[test]
    fn reversed_p_grid_changes_seeds_but_not_semantics() {
        // p-derived cells keep their own statistics wherever they appear
        let base = SweepConfig {
            n: 16,
            k: 11,
            p_grid: vec![0.05, 0.15],
            abandonments: vec![Abandonment::Unbounded],
            trials: 300,
            master_seed: 5,
            code_seed: 6,
            noise: NoiseKind::Bsc,
        };
        let out = run_sweep(&base).unwrap();
        let p_of_rows: Vec<f64> = out.rows.iter().map(|r| r.p).collect();
        assert_eq!(p_of_rows, vec![0.05, 0.15]);
    }

    #[test]
    fn full_budget_matches_unbounded_below_capacity() {
        // with a = n - k the abandonment rarely fires below capacity
        let (n, k) = (16, 11);
        let code = sample_code(n, k, 42);
        let p = 0.04; // h(0.04) = 0.24 < 1 - k/n = 0.3125
        assert!(binary_entropy(p) < 1.0 - k as f64 / n as f64);
        let model = NoiseKind::Bsc.model_at(p).unwrap();
        let trials = 2000;
        let capped = run_point(
            &code,
            &model,
            Abandonment::AtExponent((n - k) as u32),
            trials,
            3,
            p,
        )
        .unwrap();
        let unbounded = run_point(&code, &model, Abandonment::Unbounded, trials, 3, p).unwrap();
        let se = PointAggregate::binomial_se(unbounded.bler(), trials);
        assert!(
            (capped.bler() - unbounded.bler()).abs() <= 2.0 * se.max(1e-3),
            "bler {} vs {}",
            capped.bler(),
            unbounded.bler()
        );
    }

    #[test]
    fn threshold_below_capacity_is_full_redundancy() {
        let code = sample_code(16, 11, 43);
        let model = NoiseKind::Bsc.model_at(0.02).unwrap();
        let got = empirical_confidence_threshold(&code, &model, 0.5, 400, 11).unwrap();
        assert_eq!(got, Some(5));
    }

    #[test]
    fn threshold_beyond_min_capacity_collapses() {
        let code = sample_code(16, 11, 44);
        // min-capacity for p: 1 + log2(1-p) < 11/16 needs p > 0.195
        let model = NoiseKind::Bsc.model_at(0.3).unwrap();
        let summary = channel_summary(&model).unwrap();
        assert!(summary.min_capacity < 11.0 / 16.0);
        let got = empirical_confidence_threshold(&code, &model, 0.5, 600, 12).unwrap();
        assert!(got.is_none_or(|a| a <= 2), "expected collapse, got {got:?}");
    }
}
