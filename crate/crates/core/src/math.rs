//! `f64` helpers that `core` lacks without `std`.

use alloc::vec::Vec;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

/// Median of the finite values; `None` when empty.
pub(crate) fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    })
}

/// Harmonic mean of two positive segment sizes.
#[inline]
pub(crate) fn harmonic_mean(n0: f64, n1: f64) -> f64 {
    2.0 * n0 * n1 / (n0 + n1)
}

/// Two-sample Hoeffding threshold on a mean gap for a statistic with range
/// width `range`, segment sizes `n0`, `n1` and per-test confidence `delta`.
///
/// `range * sqrt(ln(2 / delta) / (2 m))`, with `m` the harmonic mean of the
/// segment sizes.
#[inline]
pub(crate) fn hoeffding_threshold(range: f64, n0: f64, n1: f64, delta: f64) -> f64 {
    let m = harmonic_mean(n0, n1);
    range * sqrt(ln(2.0 / delta) / (2.0 * m))
}
