//! Exogenous broadcast behaviors for disruptive nodes.
//!
//! Every behavior is anchored on the network's state at `t = 0`: the mean of
//! all initial values (future disruptors included) and their range. Values
//! depend only on the global step index, never on what other nodes send, so
//! a trajectory can be computed once and replayed across runs.

use alloc::vec::Vec;

use rand::Rng;

/// Step from which disruptors broadcast their trajectory.
pub const DEFAULT_ACTIVE_FROM: usize = 2;

/// Fraction of the initial range spanned by uniform-noise disruptors.
pub const NOISE_RANGE_FACTOR: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisruptorSpec {
    /// `(mean0 + shift_y) + amplitude * range0 * sin(omega * t + shift_x)`
    Sine { amplitude: f64, shift_x: f64, shift_y: f64, omega: f64 },
    /// `mean0 + gradient * t`
    Linear { gradient: f64 },
    /// `mean0 + u * 0.9 * range0` with a fresh `u ~ U[0, 1]` every step.
    Noise,
}

impl DisruptorSpec {
    pub fn kind(&self) -> DisruptorKind {
        match self {
            DisruptorSpec::Sine { .. } => DisruptorKind::Sine,
            DisruptorSpec::Linear { .. } => DisruptorKind::Linear,
            DisruptorSpec::Noise => DisruptorKind::Noise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DisruptorKind {
    Sine,
    Linear,
    Noise,
}

impl DisruptorKind {
    /// Short label used in fixture tables (`T1`, `T2`, `T3`).
    pub fn code(&self) -> &'static str {
        match self {
            DisruptorKind::Sine => "T1",
            DisruptorKind::Linear => "T2",
            DisruptorKind::Noise => "T3",
        }
    }
}

/// Initial-state anchor shared by all disruptor behaviors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baseline {
    pub mean: f64,
    pub range: f64,
}

impl Baseline {
    /// Mean and range of every node's value at `t = 0`.
    ///
    /// Panics on an empty slice.
    pub fn from_initial(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "baseline needs at least one node");
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for &v in values {
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        Baseline { mean: sum / values.len() as f64, range: hi - lo }
    }
}

/// Value broadcast at step `t`. Only [`DisruptorSpec::Noise`] draws from `rng`.
pub fn disruptor_value<R: Rng + ?Sized>(
    spec: &DisruptorSpec,
    t: usize,
    baseline: Baseline,
    rng: &mut R,
) -> f64 {
    let t = t as f64;
    match *spec {
        DisruptorSpec::Sine { amplitude, shift_x, shift_y, omega } => {
            (baseline.mean + shift_y) + amplitude * baseline.range * libm::sin(omega * t + shift_x)
        }
        DisruptorSpec::Linear { gradient } => baseline.mean + gradient * t,
        DisruptorSpec::Noise => {
            let u: f64 = rng.random();
            baseline.mean + u * NOISE_RANGE_FACTOR * baseline.range
        }
    }
}

/// Materialized per-step values for `t` in `0..=t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisruptorTrajectory {
    values: Vec<f64>,
    active_from: usize,
}

impl DisruptorTrajectory {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn active_from(&self) -> usize {
        self.active_from
    }

    pub fn t_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Broadcast value at `t`, or `None` before activation.
    pub fn broadcast_at(&self, t: usize) -> Option<f64> {
        if t < self.active_from {
            None
        } else {
            self.values.get(t).copied()
        }
    }

    pub fn with_active_from(mut self, active_from: usize) -> Self {
        self.active_from = active_from;
        self
    }
}

/// Evaluates `spec` once for every step `0..=t_max`. Noise disruptors consume
/// one draw per step, in step order.
pub fn precompute_trajectory<R: Rng + ?Sized>(
    spec: &DisruptorSpec,
    t_max: usize,
    baseline: Baseline,
    rng: &mut R,
) -> DisruptorTrajectory {
    let values = (0..=t_max).map(|t| disruptor_value(spec, t, baseline, rng)).collect();
    DisruptorTrajectory { values, active_from: DEFAULT_ACTIVE_FROM }
}
