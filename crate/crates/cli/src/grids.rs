//! Channel-parameter grids.

use grandsim_core::exponents::binary_entropy;

/// Flip probability at which a BSC has capacity exactly `rate`
/// (h(p) = 1 - rate, lower branch).
pub fn bsc_capacity_point(rate: f64) -> f64 {
    let target = 1.0 - rate;
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Flip probability at which a BSC has min-capacity exactly `rate`
/// (-log2(1-p) = 1 - rate).
pub fn bsc_min_capacity_point(rate: f64) -> f64 {
    1.0 - 2f64.powf(rate - 1.0)
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else {
                (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}
