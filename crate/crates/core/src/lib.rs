//! Deterministic swarm simulator comparing Q-learning particles (M-QL)
//! with a standard particle swarm optimiser.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: positions, distances and the world rectangle.
//! * [`qlearning`]: tabular Q-learning.
//! * [`pso`]: the baseline swarm.
//! * [`mql`]: the learning swarm, its state encoding and connectivity reward.
//! * [`metrics`]: connectivity, dispersion and decision-quality measures.
//! * [`config`], [`experiment`], [`presets`], [`output`]: the run harness.

pub mod config;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod mql;
pub mod output;
pub mod presets;
pub mod pso;
pub mod qlearning;

pub use config::{load_config, Algorithm, SwarmConfig};
pub use error::{Error, Result};
pub use experiment::{run_experiment, RunOutput, RunSummary, Snapshot};
pub use geometry::{clamp_to_world, euclidean_distance, ParticleId, Vec2, WorldBounds};
pub use metrics::{Decision, TickRecord};
pub use mql::{MqlParams, MqlSwarm, StateId};
pub use pso::{Objective, PsoParams, PsoSwarm};
pub use qlearning::{ActionId, LearningParams, QTable};
