//! Per-step state updates for compliant nodes.
//!
//! Three policies share one synchronous step:
//!
//! * [`Policy::Oddic`]: median / scaled-MAD z-scores over the inclusive
//!   neighbourhood, a Hampel-capped self-referential tolerance, and a move
//!   toward the mean of the values strictly closer to the median than the
//!   node itself.
//! * [`Policy::Msr`]: trims up to `d` values strictly above and `d` strictly
//!   below the node's own value, then averages the rest.
//! * [`Policy::Mean`]: averages everything received, own value included.

use alloc::vec::Vec;

use crate::graph::Digraph;
use crate::stats;

/// Normal-consistency factor applied to the median absolute deviation.
pub const NMAD_SCALE: f64 = 1.4826;

/// Upper bound on a node's own filter value (Hampel cap).
pub const FILTER_MAX: f64 = 3.0;

pub const DEFAULT_ETA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConsensusError {
    #[error("non-finite value {value} for node {node} at t={t}")]
    NonFiniteState { node: usize, t: usize, value: f64 },
    #[error("disruptor mask has {mask} entries for {values} values")]
    MaskLength { values: usize, mask: usize },
    #[error("state vector has {values} entries but the graph has {nodes} nodes")]
    GraphMismatch { values: usize, nodes: usize },
    #[error("learning rate {0} outside (0, 1]")]
    InvalidEta(f64),
    #[error("node {0} is compliant but was given a broadcast value")]
    BroadcastForCompliant(usize),
}

/// Node states at one time step, plus the fixed compliant/disruptor split.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector {
    values: Vec<f64>,
    t: usize,
    disruptor_mask: Vec<bool>,
}

impl OpinionVector {
    pub fn new(values: Vec<f64>, disruptor_mask: Vec<bool>) -> Result<Self, ConsensusError> {
        Self::at_step(values, disruptor_mask, 0)
    }

    pub fn at_step(
        values: Vec<f64>,
        disruptor_mask: Vec<bool>,
        t: usize,
    ) -> Result<Self, ConsensusError> {
        if values.len() != disruptor_mask.len() {
            return Err(ConsensusError::MaskLength {
                values: values.len(),
                mask: disruptor_mask.len(),
            });
        }
        check_finite(&values, t)?;
        Ok(Self { values, t, disruptor_mask })
    }

    /// All nodes compliant.
    pub fn all_compliant(values: Vec<f64>) -> Result<Self, ConsensusError> {
        let mask = alloc::vec![false; values.len()];
        Self::new(values, mask)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn disruptor_mask(&self) -> &[bool] {
        &self.disruptor_mask
    }

    pub fn is_disruptor(&self, i: usize) -> bool {
        self.disruptor_mask[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values of compliant nodes, in node order.
    pub fn compliant_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.disruptor_mask)
            .filter(|(_, &d)| !d)
            .map(|(&v, _)| v)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

fn check_finite(values: &[f64], t: usize) -> Result<(), ConsensusError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(node) => Err(ConsensusError::NonFiniteState { node, t, value: values[node] }),
        None => Ok(()),
    }
}

/// Values a node sees in one step: its in-neighbors' broadcasts and, for an
/// inclusive sample, its own value as well.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodSample {
    values: Vec<f64>,
    own: f64,
}

impl NeighborhoodSample {
    /// Inclusive sample: `received` plus `own`, appended last.
    pub fn new(received: &[f64], own: f64) -> Self {
        let mut values = Vec::with_capacity(received.len() + 1);
        values.extend_from_slice(received);
        values.push(own);
        Self { values, own }
    }

    /// Sample of the received values only; `own` is kept for reference.
    pub fn received_only(received: &[f64], own: f64) -> Self {
        Self { values: received.to_vec(), own }
    }

    /// The multiset the filter statistics are computed over.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn own(&self) -> f64 {
        self.own
    }
}

/// Which values feed the ODDI-C median, MAD and z-scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleScope {
    /// In-neighbor values only; the node's own value sets its tolerance but
    /// does not shift the statistics.
    #[default]
    Received,
    /// In-neighbor values plus the node's own value.
    Inclusive,
}

/// Inclusive sample of node `i`.
pub fn collect(g: &Digraph, states: &OpinionVector, i: usize) -> NeighborhoodSample {
    collect_scoped(g, states, i, SampleScope::Inclusive)
}

pub fn collect_scoped(
    g: &Digraph,
    states: &OpinionVector,
    i: usize,
    scope: SampleScope,
) -> NeighborhoodSample {
    let values = states.values();
    let mut received = Vec::with_capacity(g.in_degree(i) + 1);
    received.extend(g.in_neighbors(i).iter().map(|&j| values[j]));
    match scope {
        SampleScope::Inclusive => {
            received.push(values[i]);
            NeighborhoodSample { values: received, own: values[i] }
        }
        SampleScope::Received => NeighborhoodSample { values: received, own: values[i] },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub median: f64,
    pub mad: f64,
    pub nmad: f64,
    /// The node's own z-score, capped at [`FILTER_MAX`].
    pub filter_value: f64,
}

/// Distance from the median in units of scaled MAD.
///
/// With a zero scaled MAD the score is 0 at the median and `+inf` elsewhere,
/// which exceeds every possible filter value.
fn zscore(v: f64, median: f64, nmad: f64) -> f64 {
    let dev = (v - median).abs();
    if nmad > 0.0 {
        dev / nmad
    } else if dev == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Median, MAD and the node's capped filter value. An empty sample (an
/// isolated node under [`SampleScope::Received`]) yields a zero filter value.
pub fn filter_params(sample: &NeighborhoodSample) -> FilterParams {
    let values = sample.values();
    if values.is_empty() {
        return FilterParams { median: sample.own(), mad: 0.0, nmad: 0.0, filter_value: 0.0 };
    }
    let median = stats::median(values);
    let deviations: Vec<f64> = values.iter().map(|v| (v - median).abs()).collect();
    let mad = stats::median(&deviations);
    let nmad = NMAD_SCALE * mad;
    let filter_value = zscore(sample.own(), median, nmad).min(FILTER_MAX);
    FilterParams { median, mad, nmad, filter_value }
}

/// Absolute median-based z-score of every value in the sample, in sample
/// order. The cap is not applied here.
pub fn zscores(sample: &NeighborhoodSample, params: &FilterParams) -> Vec<f64> {
    sample.values().iter().map(|&v| zscore(v, params.median, params.nmad)).collect()
}

/// Values whose z-score is strictly below the node's filter value.
///
/// The node's own value scores exactly its uncapped filter value, so it is
/// always rejected, as is any neighbor value equal to it.
pub fn dynamic_filter(
    sample: &NeighborhoodSample,
    scores: &[f64],
    params: &FilterParams,
) -> Vec<f64> {
    sample
        .values()
        .iter()
        .zip(scores)
        .filter(|(_, &score)| score < params.filter_value)
        .map(|(&v, _)| v)
        .collect()
}

/// Which way the update moves relative to the accepted values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateDirection {
    /// `own + eta * (mean(F) - own)`: a move toward the accepted mean.
    #[default]
    TowardAccepted,
    /// `own + eta * mean(own - f)`: the sign as literally printed in the
    /// original formulation. Diverges from the accepted values; debug only.
    Literal,
}

/// Moves `own` toward the mean of `accepted` by `eta`. An empty accepted set
/// leaves the value unchanged.
pub fn oddic_update(own: f64, accepted: &[f64], eta: f64) -> f64 {
    update_with(own, accepted, eta, UpdateDirection::TowardAccepted)
}

fn update_with(own: f64, accepted: &[f64], eta: f64, direction: UpdateDirection) -> f64 {
    if accepted.is_empty() {
        return own;
    }
    let mean = stats::bounded_mean(accepted);
    match direction {
        UpdateDirection::TowardAccepted => {
            let (lo, hi) = if own <= mean { (own, mean) } else { (mean, own) };
            (own + eta * (mean - own)).clamp(lo, hi)
        }
        UpdateDirection::Literal => own + eta * (own - mean),
    }
}

/// Mean-subsequence-reduced trimming with a known disruptor count `d`.
///
/// From the sorted sample, removes the `min(d, #above)` largest values
/// strictly above `own` and the `min(d, #below)` smallest values strictly
/// below it. The result is sorted ascending and always contains `own`.
pub fn msr_filter(sample: &NeighborhoodSample, d: usize) -> Vec<f64> {
    let own = sample.own();
    let mut sorted = sample.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let below = sorted.iter().filter(|&&v| v < own).count();
    let above = sorted.iter().filter(|&&v| v > own).count();
    let drop_low = d.min(below);
    let drop_high = d.min(above);
    sorted[drop_low..sorted.len() - drop_high].to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Oddic,
    /// MSR with the number of disruptors it is told to expect.
    Msr { known_disruptors: usize },
    Mean,
}

impl Policy {
    /// Accepted multiset for one node under this policy.
    pub fn accepted(&self, sample: &NeighborhoodSample) -> Vec<f64> {
        match *self {
            Policy::Oddic => {
                let params = filter_params(sample);
                let scores = zscores(sample, &params);
                dynamic_filter(sample, &scores, &params)
            }
            Policy::Msr { known_disruptors } => msr_filter(sample, known_disruptors),
            Policy::Mean => sample.values().to_vec(),
        }
    }
}

impl core::fmt::Display for Policy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Policy::Oddic => f.write_str("oddic"),
            Policy::Msr { known_disruptors } => write!(f, "msr{known_disruptors}"),
            Policy::Mean => f.write_str("mean"),
        }
    }
}

/// A policy together with its learning rate and update direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateRule {
    policy: Policy,
    eta: f64,
    direction: UpdateDirection,
    scope: SampleScope,
}

impl UpdateRule {
    pub fn new(policy: Policy, eta: f64) -> Result<Self, ConsensusError> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(ConsensusError::InvalidEta(eta));
        }
        Ok(Self {
            policy,
            eta,
            direction: UpdateDirection::TowardAccepted,
            scope: SampleScope::default(),
        })
    }

    /// Sample scope for ODDI-C statistics. MSR and the mean always work on
    /// the inclusive sample.
    pub fn with_scope(mut self, scope: SampleScope) -> Self {
        self.scope = scope;
        self
    }

    pub fn scope(&self) -> SampleScope {
        self.scope
    }

    pub fn with_direction(mut self, direction: UpdateDirection) -> Self {
        self.direction = direction;
        self
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn direction(&self) -> UpdateDirection {
        self.direction
    }

    /// Next value of node `i` computed from the snapshot `states`.
    pub fn node_update(&self, g: &Digraph, states: &OpinionVector, i: usize) -> f64 {
        let scope = match self.policy {
            Policy::Oddic => self.scope,
            Policy::Msr { .. } | Policy::Mean => SampleScope::Inclusive,
        };
        let sample = collect_scoped(g, states, i, scope);
        let accepted = self.policy.accepted(&sample);
        update_with(sample.own(), &accepted, self.eta, self.direction)
    }
}

/// One synchronous step from `t` to `t + 1`.
///
/// `broadcasts[i]` is `Some(v)` when node `i` is an active disruptor that
/// broadcasts `v` at `t + 1`; every other node applies `rule` to the
/// snapshot at `t`. A disruptor whose entry is `None` has not activated yet
/// and behaves compliantly.
pub fn step(
    g: &Digraph,
    states: &OpinionVector,
    rule: &UpdateRule,
    broadcasts: &[Option<f64>],
) -> Result<OpinionVector, ConsensusError> {
    let n = states.len();
    if g.node_count() != n {
        return Err(ConsensusError::GraphMismatch { values: n, nodes: g.node_count() });
    }
    assert_eq!(broadcasts.len(), n, "one broadcast slot per node");
    let next_t = states.t() + 1;
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let value = match broadcasts[i] {
            Some(v) if states.is_disruptor(i) => v,
            Some(_) => return Err(ConsensusError::BroadcastForCompliant(i)),
            None => rule.node_update(g, states, i),
        };
        next.push(value);
    }
    OpinionVector::at_step(next, states.disruptor_mask.clone(), next_t)
}
