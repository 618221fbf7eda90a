//! Small order-statistics helpers shared by the filters.

use alloc::vec::Vec;

/// Median of a sorted, nonempty slice. Even lengths take the midpoint of the
/// two central values.
pub(crate) fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        let (lo, hi) = (sorted[n / 2 - 1], sorted[n / 2]);
        (lo + hi) / 2.0
    }
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    median_of_sorted(&sorted)
}

/// Arithmetic mean of a multiset, clamped to its own range so rounding in the
/// sum can never carry it outside `[min, max]`. Summation runs in ascending
/// order, which makes the result independent of element order.
pub(crate) fn bounded_mean(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let sum: f64 = sorted.iter().sum();
    (sum / sorted.len() as f64).clamp(sorted[0], sorted[sorted.len() - 1])
}
