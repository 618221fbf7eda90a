//! Convergence metric and range statistics.
//!
//! The convergence metric at step `t` is the pairwise total difference among
//! compliant nodes divided by the total difference among *all* nodes at
//! `t = 0`, floored at `err / TD[0]` so rounding noise below `err` reads as
//! full agreement.

use alloc::vec::Vec;

use crate::consensus::OpinionVector;

pub const DEFAULT_ERR: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum MetricError {
    /// Every initial value is identical, so no normalizer exists.
    #[error("initial total difference is zero; the network starts in exact consensus")]
    ZeroInitialDifference,
    #[error("no compliant nodes")]
    NoCompliantNodes,
}

/// `sum_k sum_m |x_k - x_m|` over all ordered pairs.
///
/// Computed from sorted gaps: each gap between neighbors in sorted order is
/// crossed by `(k + 1) * (n - k - 1)` unordered pairs. All terms are
/// non-negative, so there is no cancellation.
pub fn total_difference(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut total = 0.0;
    for k in 0..n - 1 {
        let gap = sorted[k + 1] - sorted[k];
        total += gap * ((k + 1) * (n - k - 1)) as f64;
    }
    2.0 * total
}

/// `max(td_t / td0, err / td0)`.
pub fn convergence_metric(td_t: f64, td0: f64, err: f64) -> Result<f64, MetricError> {
    if td0.is_nan() || td0 <= 0.0 {
        return Err(MetricError::ZeroInitialDifference);
    }
    Ok(apply_floor(td_t / td0, err / td0))
}

fn apply_floor(cm: f64, floor: f64) -> f64 {
    if cm < floor {
        floor
    } else {
        cm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSeries {
    cm: Vec<f64>,
    td0: f64,
    floor: f64,
    err: f64,
}

impl ConvergenceSeries {
    /// Builds the series from per-step states. The numerator at `t = 0` is
    /// the all-node total difference (so `cm[0] = 1`); later steps use
    /// compliant nodes only.
    pub fn from_states(states: &[OpinionVector], err: f64) -> Result<Self, MetricError> {
        let first = states.first().ok_or(MetricError::NoCompliantNodes)?;
        let td0 = total_difference(first.values());
        let mut cm = Vec::with_capacity(states.len());
        cm.push(convergence_metric(td0, td0, err)?);
        for s in &states[1..] {
            let compliant: Vec<f64> = s.compliant_values().collect();
            if compliant.is_empty() {
                return Err(MetricError::NoCompliantNodes);
            }
            cm.push(convergence_metric(total_difference(&compliant), td0, err)?);
        }
        Ok(Self { cm, td0, floor: err / td0, err })
    }

    /// Applies the floor to a raw `TD[t]` series normalized by `td0`.
    pub fn from_total_differences(td: &[f64], td0: f64, err: f64) -> Result<Self, MetricError> {
        let cm = td
            .iter()
            .map(|&d| convergence_metric(d, td0, err))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { cm, td0, floor: err / td0, err })
    }

    pub fn values(&self) -> &[f64] {
        &self.cm
    }

    pub fn td0(&self) -> f64 {
        self.td0
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn last(&self) -> f64 {
        *self.cm.last().expect("series is never empty")
    }

    /// First step at which the metric sits on its floor.
    pub fn first_floor_hit(&self) -> Option<usize> {
        self.cm.iter().position(|&c| c <= self.floor)
    }
}

/// Min, max and range over compliant nodes.
pub fn compliant_range(states: &OpinionVector) -> Result<(f64, f64, f64), MetricError> {
    let mut it = states.compliant_values();
    let first = it.next().ok_or(MetricError::NoCompliantNodes)?;
    let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok((lo, hi, hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn total_difference_examples() {
        assert_eq!(total_difference(&[1.0, 2.0, 4.0]), 12.0);
        assert_eq!(total_difference(&[3.0, 3.0, 3.0]), 0.0);
        assert_eq!(total_difference(&[2.0, -5.0]), 14.0);
        assert_eq!(total_difference(&[]), 0.0);
    }

    #[test]
    fn metric_examples() {
        assert_eq!(convergence_metric(5.0, 5.0, 1e-7), Ok(1.0));
        let floored = convergence_metric(0.0, 1e3, 1e-7).unwrap();
        assert!((floored - 1e-10).abs() < 1e-24);
        assert_eq!(convergence_metric(1.0, 0.0, 1e-7), Err(MetricError::ZeroInitialDifference));
    }

    #[test]
    fn flooring_is_idempotent() {
        let once = apply_floor(1e-12, 1e-10);
        assert_eq!(apply_floor(once, 1e-10), once);
    }

    #[test]
    fn range_over_compliant_only() {
        let s = OpinionVector::all_compliant(vec![3.0, 7.0, 5.0]).unwrap();
        assert_eq!(compliant_range(&s), Ok((3.0, 7.0, 4.0)));
        let s = OpinionVector::all_compliant(vec![2.0]).unwrap();
        assert_eq!(compliant_range(&s).unwrap().2, 0.0);
        let s = OpinionVector::new(vec![3.0, 1e6, 5.0], vec![false, true, false]).unwrap();
        assert_eq!(compliant_range(&s), Ok((3.0, 5.0, 2.0)));
        let s = OpinionVector::new(vec![3.0], vec![true]).unwrap();
        assert_eq!(compliant_range(&s), Err(MetricError::NoCompliantNodes));
    }

    #[test]
    fn series_floors_and_reports_first_hit() {
        let mask = vec![false, false, true];
        let s0 = OpinionVector::new(vec![0.0, 1.0, 2.0], mask.clone()).unwrap();
        let s1 = OpinionVector::at_step(vec![0.5, 0.5, 9.0], mask, 1).unwrap();
        let series = ConvergenceSeries::from_states(&[s0, s1], 1e-7).unwrap();
        assert_eq!(series.td0(), 8.0);
        assert_eq!(series.values()[0], 1.0);
        assert_eq!(series.values()[1], series.floor());
        assert_eq!(series.first_floor_hit(), Some(1));
    }
}
