//! Guesswork exponents for binary additive noise.
//!
//! With all logs base 2, the scaled cumulant generating function of the
//! logarithm of guesswork is
//!
//! ```text
//! L(a) = a * H_{1/(1+a)}   for a in (-1, inf),
//! L(a) = -H_min            for a <= -1,
//! ```
//!
//! where `H_b` is the order-b Renyi entropy rate of the noise and `H_min`
//! its min-entropy rate. Its Legendre-Fenchel transform
//! `I(g) = sup_a { g*a - L(a) }` is the large-deviation rate function of
//! `(1/n) log2 G(N^n)`. For a code of rate R used beyond capacity, the
//! probability that a maximum-likelihood decoding is correct decays like
//! `2^(-n I(1-R))`, and any g with `I(g) < 1-R-g` gives a query budget
//! `2^(n g)` below which a found decoding concentrates on being correct.
//!
//! BSC quantities use closed forms; Markov chains get their Renyi rates
//! from the spectral radius of the entrywise powered transition matrix and
//! their min-entropy rate from the max-plus cycle mean, both by iteration
//! with explicit tolerances.

use thiserror::Error;

use crate::noise::{MarkovNoise, NoiseModel};

/// Upper end of the supremum search; the derivative of the SCGF saturates
/// well before this for any g of interest.
const ALPHA_MAX: f64 = 64.0;
/// Lower end of the open branch, kept one finite-difference step clear of
/// the kink at -1.
const ALPHA_MIN: f64 = -1.0 + 2e-6;
const FD_STEP: f64 = 1e-6;
const POWER_ITER_TOL: f64 = 1e-12;
const MAXPLUS_TOL: f64 = 1e-10;
const ITER_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExponentError {
    #[error("Renyi order must be positive and not 1, got {0}")]
    InvalidOrder(f64),
    #[error("chain is reducible; no unique stationary distribution")]
    ReducibleChain,
}

/// Value of the rate function at one point, with the maximizing order and a
/// bound on the numerical uncertainty of the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunctionResult {
    pub g: f64,
    pub value: f64,
    /// Maximizer of `g*a - L(a)`; `-1` when the boundary branch wins.
    pub alpha_star: f64,
    pub bracket_width: f64,
}

/// Entropy rates and the derived rate thresholds of a noise model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSummary {
    pub shannon_entropy_rate: f64,
    pub min_entropy_rate: f64,
    /// C = 1 - H: below this rate the intended receiver decodes reliably.
    pub capacity: f64,
    /// C_min = 1 - H_min: below this rate confident eavesdropper decoding
    /// remains possible beyond capacity.
    pub min_capacity: f64,
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

/// Order-`alpha` Renyi entropy rate in bits per symbol, `alpha > 0`,
/// `alpha != 1`.
pub fn renyi_entropy_rate(model: &NoiseModel, alpha: f64) -> Result<f64, ExponentError> {
    if alpha.is_nan() || alpha <= 0.0 || alpha == 1.0 {
        return Err(ExponentError::InvalidOrder(alpha));
    }
    Ok(match model {
        NoiseModel::Bsc(m) => bsc_renyi(m.p(), alpha),
        NoiseModel::Markov(m) => markov_renyi(m, alpha),
    })
}

/// `(1/(1-a)) * log2((1-p)^a + p^a)` in a form that stays finite for large
/// orders: the sum is factored around its dominant term.
fn bsc_renyi(p: f64, alpha: f64) -> f64 {
    let r = p / (1.0 - p);
    let log_sum = alpha * (1.0 - p).log2() + (r.powf(alpha)).ln_1p() / std::f64::consts::LN_2;
    log_sum / (1.0 - alpha)
}

fn markov_renyi(m: &MarkovNoise, alpha: f64) -> f64 {
    let t = m.transition();
    let max_entry = t.iter().flatten().cloned().fold(0.0f64, f64::max);
    // rho(T_a) = max^a * rho(S) with S = (t/max)^a entrywise; the factoring
    // keeps the iteration in range for extreme orders.
    let s = [
        [
            (t[0][0] / max_entry).powf(alpha),
            (t[0][1] / max_entry).powf(alpha),
        ],
        [
            (t[1][0] / max_entry).powf(alpha),
            (t[1][1] / max_entry).powf(alpha),
        ],
    ];
    let log2_rho = alpha * max_entry.log2() + spectral_radius_2x2(&s).log2();
    log2_rho / (1.0 - alpha)
}

/// Power iteration for the Perron root of a nonnegative 2x2 matrix. The
/// growth ratio is measured over two steps so that period-2 structure
/// (zero diagonal) still converges.
fn spectral_radius_2x2(s: &[[f64; 2]; 2]) -> f64 {
    let mut x = [1.0f64, 1.0];
    let mut prev_est = f64::NAN;
    for _ in 0..ITER_CAP {
        let norm0 = x[0] + x[1];
        let y = [
            s[0][0] * x[0] + s[0][1] * x[1],
            s[1][0] * x[0] + s[1][1] * x[1],
        ];
        let z = [
            s[0][0] * y[0] + s[0][1] * y[1],
            s[1][0] * y[0] + s[1][1] * y[1],
        ];
        let norm2 = z[0] + z[1];
        let est = (norm2 / norm0).sqrt();
        if norm2 == 0.0 {
            return 0.0;
        }
        x = [z[0] / norm2, z[1] / norm2];
        if (est - prev_est).abs() <= POWER_ITER_TOL * est.max(f64::MIN_POSITIVE) {
            return est;
        }
        prev_est = est;
    }
    prev_est
}

/// Shannon entropy rate in bits per symbol.
pub fn shannon_entropy_rate(model: &NoiseModel) -> Result<f64, ExponentError> {
    match model {
        NoiseModel::Bsc(m) => Ok(binary_entropy(m.p())),
        NoiseModel::Markov(m) => {
            let t = m.transition();
            if t[0][1] <= 0.0 || t[1][0] <= 0.0 {
                return Err(ExponentError::ReducibleChain);
            }
            let pi0 = t[1][0] / (t[0][1] + t[1][0]);
            let row_entropy = |row: &[f64; 2]| -> f64 {
                row.iter()
                    .filter(|&&x| x > 0.0)
                    .map(|&x| -x * x.log2())
                    .sum()
            };
            Ok(pi0 * row_entropy(&t[0]) + (1.0 - pi0) * row_entropy(&t[1]))
        }
    }
}

/// Min-entropy rate in bits per symbol: `-lim (1/n) max_z log2 P(z)`.
pub fn min_entropy_rate(model: &NoiseModel) -> f64 {
    match model {
        NoiseModel::Bsc(m) => -(1.0 - m.p()).log2(),
        NoiseModel::Markov(m) => {
            let t = m.transition();
            let w = [
                [t[0][0].log2(), t[0][1].log2()],
                [t[1][0].log2(), t[1][1].log2()],
            ];
            -maxplus_cycle_mean(&w)
        }
    }
}

/// Max cycle mean of a 2x2 weight matrix by value iteration. Successive
/// differences of the value function can alternate with period two, so the
/// estimate averages over two steps.
fn maxplus_cycle_mean(w: &[[f64; 2]; 2]) -> f64 {
    let step = |v: &[f64; 2]| -> [f64; 2] {
        [
            (w[0][0] + v[0]).max(w[0][1] + v[1]),
            (w[1][0] + v[0]).max(w[1][1] + v[1]),
        ]
    };
    let mut v_prev2 = [0.0f64, 0.0];
    let mut v_prev = step(&v_prev2);
    let mut v = step(&v_prev);
    let mut prev_est = f64::NAN;
    for _ in 0..ITER_CAP {
        let lam = [(v[0] - v_prev2[0]) / 2.0, (v[1] - v_prev2[1]) / 2.0];
        let est = lam[0].max(lam[1]);
        let spread = (lam[0] - lam[1]).abs();
        if spread <= MAXPLUS_TOL && (est - prev_est).abs() <= MAXPLUS_TOL {
            return est;
        }
        prev_est = est;
        v_prev2 = v_prev;
        v_prev = v;
        v = step(&v_prev);
    }
    prev_est
}

/// The guesswork SCGF `L(a)` in bits per symbol, for any real `a`.
pub fn guesswork_scgf(model: &NoiseModel, alpha: f64) -> f64 {
    if alpha <= -1.0 {
        return -min_entropy_rate(model);
    }
    if alpha == 0.0 {
        return 0.0;
    }
    match model {
        NoiseModel::Bsc(m) => {
            // (1+a) * log2((1-p)^(1/(1+a)) + p^(1/(1+a))), factored
            let p = m.p();
            let beta = 1.0 / (1.0 + alpha);
            let r = p / (1.0 - p);
            (1.0 - p).log2() + (1.0 + alpha) * (r.powf(beta)).ln_1p() / std::f64::consts::LN_2
        }
        NoiseModel::Markov(_) => {
            let beta = 1.0 / (1.0 + alpha);
            if beta == 1.0 {
                // alpha below float resolution around 0: L(a) = a*H + O(a^2)
                return alpha * shannon_entropy_rate(model).unwrap_or(0.0);
            }
            alpha * renyi_entropy_rate(model, beta).expect("beta is positive and != 1")
        }
    }
}

/// d/da of the SCGF on the open branch: closed form for the BSC, central
/// finite difference for Markov models.
fn scgf_derivative(model: &NoiseModel, alpha: f64) -> f64 {
    debug_assert!(alpha > -1.0 + FD_STEP);
    match model {
        NoiseModel::Bsc(m) => {
            let p = m.p();
            let beta = 1.0 / (1.0 + alpha);
            let r = p / (1.0 - p);
            let rb = r.powf(beta);
            rb.ln_1p() / std::f64::consts::LN_2 - beta * rb * r.log2() / (1.0 + rb)
        }
        NoiseModel::Markov(_) => {
            (guesswork_scgf(model, alpha + FD_STEP) - guesswork_scgf(model, alpha - FD_STEP))
                / (2.0 * FD_STEP)
        }
    }
}

/// Legendre-Fenchel transform `I(g) = sup_a { g*a - L(a) }` for
/// `g in [0, 1]`.
///
/// The supremum is split into the boundary branch at `a = -1` (value
/// `H_min - g`) and the open branch, where the convexity of `L` lets a
/// bisection on `L'(a) = g` locate the stationary point.
pub fn rate_function(model: &NoiseModel, g: f64) -> RateFunctionResult {
    assert!((0.0..=1.0).contains(&g), "g must lie in [0, 1], got {g}");
    let objective = |alpha: f64| g * alpha - guesswork_scgf(model, alpha);

    let boundary_value = min_entropy_rate(model) - g;

    let mut lo = ALPHA_MIN;
    let mut hi = 1.0;
    while scgf_derivative(model, hi) < g && hi < ALPHA_MAX {
        hi = (hi * 2.0).min(ALPHA_MAX);
    }

    let (open_value, open_alpha, width) = if scgf_derivative(model, lo) >= g {
        // derivative already exceeds g at the left edge: the open-branch
        // supremum sits at the edge, right next to the boundary branch
        (objective(lo), lo, 0.0)
    } else if scgf_derivative(model, hi) < g {
        // derivative never reaches g: objective is increasing throughout
        (objective(hi), hi, 0.0)
    } else {
        let mut width = f64::INFINITY;
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if scgf_derivative(model, mid) < g {
                lo = mid;
            } else {
                hi = mid;
            }
            let slope = (g - scgf_derivative(model, lo))
                .abs()
                .max((g - scgf_derivative(model, hi)).abs());
            width = slope * (hi - lo);
            if width <= 1e-10 {
                break;
            }
        }
        let mid = 0.5 * (lo + hi);
        (objective(mid), mid, width)
    };

    let (value, alpha_star) = if boundary_value >= open_value {
        (boundary_value, -1.0)
    } else {
        (open_value, open_alpha)
    };
    RateFunctionResult {
        g,
        value: value.max(0.0),
        alpha_star,
        bracket_width: width,
    }
}

/// Entropy rates with the capacity C = 1 - H and min-capacity
/// C_min = 1 - H_min.
pub fn channel_summary(model: &NoiseModel) -> Result<ChannelSummary, ExponentError> {
    let h = shannon_entropy_rate(model)?;
    let h_min = min_entropy_rate(model);
    Ok(ChannelSummary {
        shannon_entropy_rate: h,
        min_entropy_rate: h_min,
        capacity: 1.0 - h,
        min_capacity: 1.0 - h_min,
    })
}

/// Success-probability estimate `2^(-n I(1-R))` for a rate-R code of
/// length n used on this channel.
pub fn success_probability_estimate(model: &NoiseModel, n: usize, rate: f64) -> f64 {
    assert!(n >= 1, "block length must be at least 1");
    assert!((0.0..1.0).contains(&rate) && rate > 0.0, "rate must lie in (0, 1)");
    let i = rate_function(model, 1.0 - rate).value;
    2f64.powf(-(n as f64) * i)
}

/// Largest query-growth exponent `g*` in `(0, 1-R)` with
/// `I(g) < 1 - R - g`, or `None` when no such g exists. `2^(n g*)` is then
/// the largest query budget that still concentrates on correct decodings.
pub fn confident_query_exponent(model: &NoiseModel, rate: f64) -> Option<f64> {
    assert!((0.0..1.0).contains(&rate) && rate > 0.0, "rate must lie in (0, 1)");
    let slack = 1.0 - rate;
    let phi = |g: f64| rate_function(model, g).value - (slack - g);
    // strictness proxy: demand phi <= -1e-12 rather than < 0
    if phi(0.0) > -1e-12 {
        return None;
    }
    let mut lo = 0.0f64;
    let mut hi = slack;
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) <= -1e-12 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}
