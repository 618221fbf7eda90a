//! Scenario assembly, single runs, and Monte Carlo batches.
//!
//! A run samples initial values, anchors the disruptor behaviors on them,
//! and steps the network to `t_max`. Disruptors follow the scenario's policy
//! until they activate, then broadcast their trajectory.
//!
//! In the batch experiments every run draws a fresh graph, fresh initial
//! values and fresh disruptor identities, while the disruptor *behaviors* are
//! precomputed once (from the first run that uses them) and replayed. The two
//! policies of a batch see identical graphs, initial values and identities
//! run by run.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::consensus::{
    self, ConsensusError, OpinionVector, Policy, SampleScope, UpdateDirection, UpdateRule,
    DEFAULT_ETA,
};
use crate::disruptors::{precompute_trajectory, Baseline, DisruptorSpec, DisruptorTrajectory};
use crate::graph::{generate_random_digraph, Digraph, GraphError};
use crate::metrics::{ConvergenceSeries, MetricError, DEFAULT_ERR};
use crate::seed::{derive_subseed, StreamLabel};

pub const DEFAULT_T_MAX: usize = 40;
pub const DEFAULT_RUNS: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Consensus(#[from] ConsensusError),
    #[error("{disruptors} disruptors requested for {nodes} nodes (need fewer disruptors than nodes)")]
    TooManyDisruptors { disruptors: usize, nodes: usize },
    #[error("disruptor node {node} is outside the graph or assigned twice")]
    BadDisruptorNode { node: usize },
    #[error("initial standard deviation {0} must be finite and non-negative")]
    InvalidStdDev(f64),
    #[error("t_max must be at least 1")]
    ZeroHorizon,
    #[error("graph has no nodes")]
    EmptyGraph,
}

/// Learning rate, horizon and metric threshold shared by every run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub eta: f64,
    pub t_max: usize,
    pub err: f64,
    pub direction: UpdateDirection,
    pub scope: SampleScope,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            eta: DEFAULT_ETA,
            t_max: DEFAULT_T_MAX,
            err: DEFAULT_ERR,
            direction: UpdateDirection::TowardAccepted,
            scope: SampleScope::default(),
        }
    }
}

impl SimSettings {
    fn rule(&self, policy: Policy) -> Result<UpdateRule, ExperimentError> {
        if self.t_max == 0 {
            return Err(ExperimentError::ZeroHorizon);
        }
        Ok(UpdateRule::new(policy, self.eta)?
            .with_direction(self.direction)
            .with_scope(self.scope))
    }
}

/// Normal distribution of initial values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDistribution {
    pub mean: f64,
    pub std_dev: f64,
}

pub fn sample_initial_values<R: Rng + ?Sized>(
    n: usize,
    dist: InitialDistribution,
    rng: &mut R,
) -> Result<Vec<f64>, ExperimentError> {
    if !(dist.std_dev >= 0.0 && dist.std_dev.is_finite()) {
        return Err(ExperimentError::InvalidStdDev(dist.std_dev));
    }
    let normal = Normal::new(dist.mean, dist.std_dev)
        .map_err(|_| ExperimentError::InvalidStdDev(dist.std_dev))?;
    Ok((0..n).map(|_| normal.sample(rng)).collect())
}

/// Convergence outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub enum Convergence {
    Series(ConvergenceSeries),
    /// All initial values were identical; the metric has no normalizer.
    ExactConsensus,
}

impl Convergence {
    fn from_states(states: &[OpinionVector], err: f64) -> Result<Self, ExperimentError> {
        match ConvergenceSeries::from_states(states, err) {
            Ok(series) => Ok(Convergence::Series(series)),
            Err(MetricError::ZeroInitialDifference) => Ok(Convergence::ExactConsensus),
            Err(MetricError::NoCompliantNodes) => {
                unreachable!("simulate always keeps a compliant node")
            }
        }
    }

    pub fn series(&self) -> Option<&ConvergenceSeries> {
        match self {
            Convergence::Series(s) => Some(s),
            Convergence::ExactConsensus => None,
        }
    }
}

/// Full result of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub policy: Policy,
    /// `states[t]` for `t` in `0..=t_max`.
    pub states: Vec<OpinionVector>,
    pub convergence: Convergence,
    /// Disruptor node ids, in the order of the behaviors they carry.
    pub disruptor_nodes: Vec<usize>,
}

impl RunRecord {
    pub fn t_max(&self) -> usize {
        self.states.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.states[0].len()
    }

    pub fn final_cm(&self) -> Option<f64> {
        self.convergence.series().map(|s| s.last())
    }

    pub fn first_floor_hit(&self) -> Option<usize> {
        self.convergence.series().and_then(|s| s.first_floor_hit())
    }
}

/// Steps `initial` forward with the given disruptors (node, trajectory).
pub fn simulate(
    graph: &Digraph,
    initial: Vec<f64>,
    disruptors: &[(usize, &DisruptorTrajectory)],
    policy: Policy,
    settings: &SimSettings,
) -> Result<RunRecord, ExperimentError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(ExperimentError::EmptyGraph);
    }
    if disruptors.len() >= n {
        return Err(ExperimentError::TooManyDisruptors { disruptors: disruptors.len(), nodes: n });
    }
    let rule = settings.rule(policy)?;
    let mut mask = vec![false; n];
    for &(node, _) in disruptors {
        if node >= n || mask[node] {
            return Err(ExperimentError::BadDisruptorNode { node });
        }
        mask[node] = true;
    }

    let mut states = Vec::with_capacity(settings.t_max + 1);
    states.push(OpinionVector::new(initial, mask)?);
    let mut broadcasts = vec![None; n];
    for t in 1..=settings.t_max {
        for &(node, trajectory) in disruptors {
            broadcasts[node] = trajectory.broadcast_at(t);
        }
        let next = consensus::step(graph, states.last().expect("nonempty"), &rule, &broadcasts)?;
        states.push(next);
    }
    let convergence = Convergence::from_states(&states, settings.err)?;
    Ok(RunRecord {
        policy,
        states,
        convergence,
        disruptor_nodes: disruptors.iter().map(|&(node, _)| node).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Fixed(Digraph),
    Random { n: usize, in_degree: usize },
}

impl GraphSource {
    pub fn node_count(&self) -> usize {
        match self {
            GraphSource::Fixed(g) => g.node_count(),
            GraphSource::Random { n, .. } => *n,
        }
    }
}

/// A disruptor behavior and the node that carries it (`None`: drawn at
/// random among nodes not already assigned).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisruptorAssignment {
    pub spec: DisruptorSpec,
    pub node: Option<usize>,
}

/// Self-contained description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: GraphSource,
    pub policy: Policy,
    pub settings: SimSettings,
    pub init: InitialDistribution,
    pub disruptors: Vec<DisruptorAssignment>,
    pub master_seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let n = self.graph.node_count();
        if n == 0 {
            return Err(ExperimentError::EmptyGraph);
        }
        if let GraphSource::Random { n, in_degree } = self.graph {
            if in_degree == 0 || in_degree >= n {
                return Err(GraphError::InDegreeOutOfRange { in_degree, n }.into());
            }
        }
        if self.disruptors.len() >= n {
            return Err(ExperimentError::TooManyDisruptors {
                disruptors: self.disruptors.len(),
                nodes: n,
            });
        }
        let mut used = vec![false; n];
        for node in self.disruptors.iter().filter_map(|d| d.node) {
            if node >= n || used[node] {
                return Err(ExperimentError::BadDisruptorNode { node });
            }
            used[node] = true;
        }
        if !self.init.std_dev.is_finite() || self.init.std_dev < 0.0 {
            return Err(ExperimentError::InvalidStdDev(self.init.std_dev));
        }
        self.settings.rule(self.policy)?;
        Ok(())
    }
}

/// Fixed nodes keep their slot; the rest are drawn without replacement from
/// the unassigned nodes, in assignment order.
fn resolve_identities<R: Rng + ?Sized>(
    n: usize,
    assignments: &[Option<usize>],
    rng: &mut R,
) -> Vec<usize> {
    let fixed: Vec<usize> = assignments.iter().filter_map(|&a| a).collect();
    let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    let random_count = assignments.len() - fixed.len();
    let mut drawn = index::sample(rng, free.len(), random_count).into_iter().map(|k| free[k]);
    assignments
        .iter()
        .map(|a| a.unwrap_or_else(|| drawn.next().expect("one draw per random slot")))
        .collect()
}

/// Executes a [`RunConfig`] as batch 0, run 0 of its master seed.
pub fn run_single(config: &RunConfig) -> Result<RunRecord, ExperimentError> {
    run_indexed(config, 0)
}

/// Executes a [`RunConfig`] with the random streams of run `run` (batch 0).
pub fn run_indexed(config: &RunConfig, run: u32) -> Result<RunRecord, ExperimentError> {
    config.validate()?;
    let seed = |label| derive_subseed(config.master_seed, 0, run, label).rng();
    let graph = match &config.graph {
        GraphSource::Fixed(g) => g.clone(),
        GraphSource::Random { n, in_degree } => {
            generate_random_digraph(*n, *in_degree, &mut seed(StreamLabel::Graph))?
        }
    };
    let n = graph.node_count();
    let initial = sample_initial_values(n, config.init, &mut seed(StreamLabel::Init))?;
    let baseline = Baseline::from_initial(&initial);
    let slots: Vec<Option<usize>> = config.disruptors.iter().map(|d| d.node).collect();
    let nodes = resolve_identities(n, &slots, &mut seed(StreamLabel::Identity));
    let trajectories: Vec<DisruptorTrajectory> = config
        .disruptors
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let mut rng = seed(StreamLabel::Noise(k as u32));
            precompute_trajectory(&d.spec, config.settings.t_max, baseline, &mut rng)
        })
        .collect();
    let pairs: Vec<(usize, &DisruptorTrajectory)> = nodes.into_iter().zip(&trajectories).collect();
    simulate(&graph, initial, &pairs, config.policy, &config.settings)
}

/// One single-network scenario: a fixed graph with fixed disruptor nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedScenario {
    pub graph: Digraph,
    pub init: InitialDistribution,
    pub disruptors: Vec<(usize, DisruptorSpec)>,
}

/// Paired runs of the same scenario under ODDI-C and the plain mean.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyPair {
    pub oddic: RunRecord,
    pub mean: RunRecord,
}

/// Runs `scenario` under both policies with identical initial values and
/// disruptor trajectories. `run` selects the random streams.
pub fn run_fixed_pair(
    scenario: &FixedScenario,
    settings: &SimSettings,
    master_seed: u64,
    run: u32,
) -> Result<PolicyPair, ExperimentError> {
    let seed = |label| derive_subseed(master_seed, 0, run, label).rng();
    let n = scenario.graph.node_count();
    let initial = sample_initial_values(n, scenario.init, &mut seed(StreamLabel::Init))?;
    let baseline = Baseline::from_initial(&initial);
    let trajectories: Vec<DisruptorTrajectory> = scenario
        .disruptors
        .iter()
        .enumerate()
        .map(|(k, (_, spec))| {
            precompute_trajectory(spec, settings.t_max, baseline, &mut seed(StreamLabel::Noise(k as u32)))
        })
        .collect();
    let pairs: Vec<(usize, &DisruptorTrajectory)> =
        scenario.disruptors.iter().map(|&(node, _)| node).zip(&trajectories).collect();
    Ok(PolicyPair {
        oddic: simulate(&scenario.graph, initial.clone(), &pairs, Policy::Oddic, settings)?,
        mean: simulate(&scenario.graph, initial, &pairs, Policy::Mean, settings)?,
    })
}

/// Per-step statistics of the convergence metric across a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub batch_param: usize,
    pub policy: Policy,
    /// Runs contributing to the statistics (exact-consensus runs excluded).
    pub run_count: usize,
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BatchSummary {
    pub fn from_records(batch_param: usize, policy: Policy, records: &[RunRecord]) -> Self {
        let series: Vec<&ConvergenceSeries> =
            records.iter().filter_map(|r| r.convergence.series()).collect();
        let steps = series.first().map_or(0, |s| s.values().len());
        let mut mean = vec![0.0; steps];
        let mut min = vec![f64::INFINITY; steps];
        let mut max = vec![f64::NEG_INFINITY; steps];
        for s in &series {
            for (t, &v) in s.values().iter().enumerate() {
                mean[t] += v;
                min[t] = min[t].min(v);
                max[t] = max[t].max(v);
            }
        }
        let count = series.len();
        for t in 0..steps {
            // clamp: summation rounding must not push the mean past the extremes
            mean[t] = (mean[t] / count as f64).clamp(min[t], max[t]);
        }
        Self { batch_param, policy, run_count: count, mean, min, max }
    }

    pub fn final_mean(&self) -> Option<f64> {
        self.mean.last().copied()
    }

    /// First step at which the mean metric is at or below `threshold`.
    pub fn first_step_below(&self, threshold: f64) -> Option<usize> {
        self.mean.iter().position(|&m| m <= threshold)
    }
}

/// All runs of one batch under one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub batch_param: usize,
    pub policy: Policy,
    pub records: Vec<RunRecord>,
    pub summary: BatchSummary,
}

/// Disruptor trajectories shared across the runs and batches of one
/// experiment, indexed like the behavior table.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBank {
    trajectories: Vec<DisruptorTrajectory>,
}

impl TrajectoryBank {
    pub fn get(&self, k: usize) -> &DisruptorTrajectory {
        &self.trajectories[k]
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DisruptorTrajectory> {
        self.trajectories.iter()
    }
}

/// Shared shape of the two Monte Carlo experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloPlan {
    pub n: usize,
    pub runs: usize,
    pub init: InitialDistribution,
    pub settings: SimSettings,
    pub master_seed: u64,
}

impl Default for MonteCarloPlan {
    fn default() -> Self {
        Self {
            n: 20,
            runs: DEFAULT_RUNS,
            init: InitialDistribution { mean: 50.5, std_dev: 24.75 },
            settings: SimSettings::default(),
            master_seed: 0,
        }
    }
}

impl MonteCarloPlan {
    fn initial_values(&self, batch: usize, run: usize) -> Result<Vec<f64>, ExperimentError> {
        let mut rng = derive_subseed(self.master_seed, batch as u32, run as u32, StreamLabel::Init).rng();
        sample_initial_values(self.n, self.init, &mut rng)
    }

    /// Precomputes behavior `k` anchored on the initial values of the first
    /// run of batch `generating_batch(k)`.
    fn bank(
        &self,
        specs: &[DisruptorSpec],
        generating_batch: impl Fn(usize) -> usize,
    ) -> Result<TrajectoryBank, ExperimentError> {
        let trajectories = specs
            .iter()
            .enumerate()
            .map(|(k, spec)| {
                let batch = generating_batch(k);
                let baseline = Baseline::from_initial(&self.initial_values(batch, 0)?);
                let mut rng =
                    derive_subseed(self.master_seed, batch as u32, 0, StreamLabel::Noise(k as u32)).rng();
                Ok(precompute_trajectory(spec, self.settings.t_max, baseline, &mut rng))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        Ok(TrajectoryBank { trajectories })
    }

    /// Runs one batch: for every run a fresh random graph, initial values
    /// and identities for the first `disruptors` bank entries, shared by all
    /// `policies`.
    fn run_batch(
        &self,
        batch: usize,
        batch_param: usize,
        in_degree: usize,
        bank: &TrajectoryBank,
        disruptors: usize,
        policies: &[Policy],
    ) -> Result<Vec<BatchResult>, ExperimentError> {
        if disruptors >= self.n {
            return Err(ExperimentError::TooManyDisruptors { disruptors, nodes: self.n });
        }
        let mut per_policy: Vec<Vec<RunRecord>> = vec![Vec::with_capacity(self.runs); policies.len()];
        for run in 0..self.runs {
            let seed = |label| derive_subseed(self.master_seed, batch as u32, run as u32, label).rng();
            let graph = generate_random_digraph(self.n, in_degree, &mut seed(StreamLabel::Graph))?;
            let initial = self.initial_values(batch, run)?;
            let nodes = resolve_identities(self.n, &vec![None; disruptors], &mut seed(StreamLabel::Identity));
            let pairs: Vec<(usize, &DisruptorTrajectory)> =
                nodes.into_iter().zip(bank.iter()).collect();
            for (records, &policy) in per_policy.iter_mut().zip(policies) {
                records.push(simulate(&graph, initial.clone(), &pairs, policy, &self.settings)?);
            }
        }
        Ok(per_policy
            .into_iter()
            .zip(policies)
            .map(|(records, &policy)| BatchResult {
                batch_param,
                policy,
                summary: BatchSummary::from_records(batch_param, policy, &records),
                records,
            })
            .collect())
    }
}

/// Fixed disruptor set, increasing in-degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivitySweep {
    pub plan: MonteCarloPlan,
    pub in_degrees: Vec<usize>,
    pub specs: Vec<DisruptorSpec>,
    /// Disruptor count MSR is told to expect.
    pub msr_known: usize,
}

impl ConnectivitySweep {
    /// In-degrees 3, 5, ..., 15 with MSR told about 5 disruptors.
    pub fn standard(specs: Vec<DisruptorSpec>, master_seed: u64) -> Self {
        Self {
            plan: MonteCarloPlan { master_seed, ..MonteCarloPlan::default() },
            in_degrees: (3..=15).step_by(2).collect(),
            msr_known: 5,
            specs,
        }
    }
}

/// Behaviors are computed from the very first run and replayed everywhere.
pub fn run_experiment2(sweep: &ConnectivitySweep) -> Result<Vec<BatchResult>, ExperimentError> {
    let bank = sweep.plan.bank(&sweep.specs, |_| 0)?;
    let policies = [Policy::Oddic, Policy::Msr { known_disruptors: sweep.msr_known }];
    let mut out = Vec::new();
    for (batch, &k) in sweep.in_degrees.iter().enumerate() {
        out.extend(sweep.plan.run_batch(batch, k, k, &bank, sweep.specs.len(), &policies)?);
    }
    Ok(out)
}

/// Fixed in-degree, disruptor count growing from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DisruptorSweep {
    pub plan: MonteCarloPlan,
    pub in_degree: usize,
    /// Batch `d` uses the first `d` behaviors, for `d` in `0..=specs.len()`.
    pub specs: Vec<DisruptorSpec>,
}

impl DisruptorSweep {
    pub fn standard(specs: Vec<DisruptorSpec>, master_seed: u64) -> Self {
        Self {
            plan: MonteCarloPlan { master_seed, ..MonteCarloPlan::default() },
            in_degree: 6,
            specs,
        }
    }
}

/// Behavior `k` (0-based) is computed in the first run of the batch with
/// `k + 1` disruptors and replayed in every later batch. MSR is told the
/// true disruptor count of each batch.
pub fn run_experiment3(sweep: &DisruptorSweep) -> Result<Vec<BatchResult>, ExperimentError> {
    let bank = sweep.plan.bank(&sweep.specs, |k| k + 1)?;
    let mut out = Vec::new();
    for d in 0..=sweep.specs.len() {
        let policies = [Policy::Oddic, Policy::Msr { known_disruptors: d }];
        out.extend(sweep.plan.run_batch(d, d, sweep.in_degree, &bank, d, &policies)?);
    }
    Ok(out)
}

/// Behavior bank a sweep would use, for inspection and replay checks.
pub fn experiment2_bank(sweep: &ConnectivitySweep) -> Result<TrajectoryBank, ExperimentError> {
    sweep.plan.bank(&sweep.specs, |_| 0)
}

pub fn experiment3_bank(sweep: &DisruptorSweep) -> Result<TrajectoryBank, ExperimentError> {
    sweep.plan.bank(&sweep.specs, |k| k + 1)
}
