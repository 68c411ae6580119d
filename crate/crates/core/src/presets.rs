//! Named experiment presets.
//!
//! * `fig3-compare`: a learning swarm and a baseline swarm from the same
//!   seed, 20 particles, 500 ticks, snapshots after 10, 50 and 500 ticks.
//! * `fig4-individuals`: a learning swarm run for 100 ticks with the
//!   decision series of particles 0, 1 and 2 reported.

use crate::config::{Algorithm, SwarmConfig};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 2] = ["fig3-compare", "fig4-individuals"];

pub const DEFAULT_PRESET_SEED: u64 = 1;

/// A labelled configuration belonging to a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    pub label: &'static str,
    pub config: SwarmConfig,
}

pub fn preset(name: &str, seed: u64) -> Result<Vec<PresetRun>> {
    match name {
        "fig3-compare" => {
            let mql = SwarmConfig {
                algorithm: Algorithm::Mql,
                swarm_size: 20,
                iterations: 500,
                seed,
                snapshot_ticks: vec![0, 10, 50, 500],
                ..SwarmConfig::default()
            };
            let pso = SwarmConfig {
                algorithm: Algorithm::Pso,
                ..mql.clone()
            };
            Ok(vec![
                PresetRun {
                    label: "mql",
                    config: mql,
                },
                PresetRun {
                    label: "pso",
                    config: pso,
                },
            ])
        }
        "fig4-individuals" => Ok(vec![PresetRun {
            label: "mql",
            config: SwarmConfig {
                algorithm: Algorithm::Mql,
                iterations: 100,
                seed,
                observed_particles: vec![0, 1, 2],
                snapshot_ticks: vec![0, 100],
                ..SwarmConfig::default()
            },
        }]),
        other => Err(Error::UnknownPreset {
            name: other.to_string(),
            valid: PRESET_NAMES.join(", "),
        }),
    }
}
