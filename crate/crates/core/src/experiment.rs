//! Seeded execution of one configured run and its summary.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, SwarmConfig};
use crate::error::Result;
use crate::geometry::{ParticleId, Vec2};
use crate::metrics::{
    classify_decisions, connected_fraction, connectivity_components, cumulative_reward, dispersion,
    drift_onset, overlap_fraction, Decision, TickRecord,
};
use crate::mql::MqlSwarm;
use crate::pso::PsoSwarm;
use crate::qlearning::QTable;

/// The random stream used by every run. One stream per run, seeded from
/// the configuration.
pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    /// Number of ticks executed when the snapshot was taken.
    pub tick: u64,
    pub positions: Vec<Vec2>,
}

/// Swarm-level measurements after one tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickMetrics {
    pub tick: u64,
    pub connected_fraction: f64,
    pub dispersion: f64,
    pub largest_component: usize,
    pub overlap_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotComponents {
    pub tick: u64,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionSeries {
    pub particle: ParticleId,
    pub decisions: Vec<Decision>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Effective configuration; re-running it reproduces the trace.
    pub config: SwarmConfig,
    pub notes: Vec<String>,
    pub initial_connected_fraction: f64,
    pub initial_dispersion: f64,
    pub final_connected_fraction: f64,
    pub final_dispersion: f64,
    pub final_overlap_fraction: f64,
    pub final_components: Vec<usize>,
    pub snapshot_components: Vec<SnapshotComponents>,
    /// Per particle; absent for baseline runs.
    pub cumulative_rewards: Option<Vec<f64>>,
    pub drift_onsets: Vec<Option<u64>>,
    pub decision_series: Vec<DecisionSeries>,
    pub q_tables: Option<Vec<QTable>>,
    pub global_best_fitness: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: Vec<TickRecord>,
    pub snapshots: Vec<Snapshot>,
    pub metrics: Vec<TickMetrics>,
    pub summary: RunSummary,
}

pub const DEFAULTS_NOTE: &str = "world size, connection radius, step set, swarm size, \
learning rates and PSO coefficients are defaults of this simulator, not published values";

enum Engine {
    Mql(MqlSwarm),
    Pso(PsoSwarm),
}

impl Engine {
    fn positions(&self) -> Vec<Vec2> {
        match self {
            Engine::Mql(s) => s.positions(),
            Engine::Pso(s) => s.positions(),
        }
    }

    fn tick(&mut self, tick: u64, rng: &mut RunRng) -> Vec<TickRecord> {
        match self {
            Engine::Mql(s) => s.tick(tick, rng),
            Engine::Pso(s) => s.tick(tick, rng),
        }
    }
}

fn tick_metrics(tick: u64, positions: &[Vec2], cfg: &SwarmConfig) -> TickMetrics {
    TickMetrics {
        tick,
        connected_fraction: connected_fraction(positions, cfg.mql.epsilon),
        dispersion: dispersion(positions),
        largest_component: connectivity_components(positions, cfg.mql.epsilon)[0],
        overlap_fraction: overlap_fraction(positions, cfg.mql.d_min),
    }
}

/// Initialises the configured engine from the seed and runs every tick.
///
/// Random draws happen in a fixed order: initial positions (and baseline
/// velocities) first, then per tick in particle-index order.
pub fn run_experiment(cfg: &SwarmConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let mut rng = run_rng(cfg.seed);
    let mut engine = match cfg.algorithm {
        Algorithm::Mql => Engine::Mql(MqlSwarm::spawn(
            cfg.swarm_size,
            cfg.mql,
            cfg.world,
            &cfg.spawn,
            &mut rng,
        )?),
        Algorithm::Pso => Engine::Pso(PsoSwarm::spawn(
            cfg.swarm_size,
            cfg.pso,
            cfg.objective,
            cfg.world,
            &cfg.spawn,
            cfg.mql.epsilon,
            &mut rng,
        )?),
    };

    let initial = engine.positions();
    let mut snapshots = Vec::new();
    if cfg.snapshot_ticks.contains(&0) {
        snapshots.push(Snapshot {
            tick: 0,
            positions: initial.clone(),
        });
    }

    let m = cfg.swarm_size;
    let mut trace = Vec::with_capacity(m * cfg.iterations as usize);
    let mut metrics = Vec::with_capacity(cfg.iterations as usize);
    for t in 0..cfg.iterations {
        trace.extend(engine.tick(t, &mut rng));
        let positions = engine.positions();
        metrics.push(tick_metrics(t, &positions, cfg));
        if cfg.snapshot_ticks.contains(&(t + 1)) {
            snapshots.push(Snapshot {
                tick: t + 1,
                positions,
            });
        }
    }

    let summary = summarize(cfg, &engine, &initial, &trace, &snapshots)?;
    Ok(RunOutput {
        trace,
        snapshots,
        metrics,
        summary,
    })
}

fn summarize(
    cfg: &SwarmConfig,
    engine: &Engine,
    initial: &[Vec2],
    trace: &[TickRecord],
    snapshots: &[Snapshot],
) -> Result<RunSummary> {
    let eps = cfg.mql.epsilon;
    let last = engine.positions();
    let ids = (0..cfg.swarm_size).map(ParticleId);

    let (cumulative_rewards, q_tables, decision_series, global_best_fitness) = match engine {
        Engine::Mql(s) => {
            let rewards = ids
                .clone()
                .map(|i| cumulative_reward(trace, i))
                .collect::<Result<Vec<_>>>()?;
            let tables = s.particles().iter().map(|p| p.qtable.clone()).collect();
            let series = cfg
                .observed_particles
                .iter()
                .map(|&p| DecisionSeries {
                    particle: ParticleId(p),
                    decisions: classify_decisions(trace, ParticleId(p)),
                })
                .collect();
            (Some(rewards), Some(tables), series, None)
        }
        Engine::Pso(s) => (None, None, Vec::new(), Some(s.global_best_fitness())),
    };

    Ok(RunSummary {
        config: cfg.clone(),
        notes: vec![DEFAULTS_NOTE.to_string()],
        initial_connected_fraction: connected_fraction(initial, eps),
        initial_dispersion: dispersion(initial),
        final_connected_fraction: connected_fraction(&last, eps),
        final_dispersion: dispersion(&last),
        final_overlap_fraction: overlap_fraction(&last, cfg.mql.d_min),
        final_components: connectivity_components(&last, eps),
        snapshot_components: snapshots
            .iter()
            .map(|s| SnapshotComponents {
                tick: s.tick,
                sizes: connectivity_components(&s.positions, eps),
            })
            .collect(),
        cumulative_rewards,
        drift_onsets: ids.map(|i| drift_onset(trace, i)).collect(),
        decision_series,
        q_tables,
        global_best_fitness,
    })
}
