//! Simulation engine for disruption-tolerant consensus on static digraphs.
//!
//! Compliant nodes exchange scalar states synchronously and update them with
//! one of three policies (see [`consensus`]); disruptive nodes broadcast
//! exogenous trajectories (see [`disruptors`]). [`experiments`] assembles
//! single runs and Monte Carlo sweeps; [`metrics`] scores convergence.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod consensus;
pub mod disruptors;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod seed;
mod stats;

pub use consensus::{OpinionVector, Policy, UpdateDirection, UpdateRule};
pub use disruptors::{Baseline, DisruptorSpec, DisruptorTrajectory};
pub use experiments::{RunConfig, RunRecord, SimSettings};
pub use graph::Digraph;
