//! Run configuration and its TOML file format.
//!
//! Every key is optional; omitted keys take the defaults of
//! [`SwarmConfig::default`]. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::WorldBounds;
use crate::mql::MqlParams;
use crate::pso::{Objective, PsoParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Mql,
    Pso,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Mql => "mql",
            Algorithm::Pso => "pso",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mql" => Ok(Algorithm::Mql),
            "pso" => Ok(Algorithm::Pso),
            other => Err(format!("unknown algorithm `{other}` (expected mql or pso)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmConfig {
    pub algorithm: Algorithm,
    pub swarm_size: usize,
    pub iterations: u64,
    pub seed: u64,
    /// Tick counts after which full position snapshots are kept (0 = initial).
    pub snapshot_ticks: Vec<u64>,
    /// Particles whose per-tick decision series is reported.
    pub observed_particles: Vec<usize>,
    pub output_dir: PathBuf,
    pub world: WorldBounds,
    /// Region the initial positions are drawn from. Must lie inside `world`.
    pub spawn: WorldBounds,
    pub mql: MqlParams,
    pub pso: PsoParams,
    pub objective: Objective,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Mql,
            swarm_size: 20,
            iterations: 500,
            seed: 0,
            snapshot_ticks: Vec::new(),
            observed_particles: vec![0, 1, 2],
            output_dir: PathBuf::from("out"),
            world: WorldBounds::default(),
            spawn: WorldBounds::square(35.0, 65.0),
            mql: MqlParams::default(),
            pso: PsoParams::default(),
            objective: Objective::default(),
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size == 0 {
            return Err(Error::config("swarm_size", "must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations", "must be at least 1"));
        }
        // TOML integers are signed 64-bit
        if self.seed > i64::MAX as u64 {
            return Err(Error::config(
                "seed",
                format!("must not exceed {}", i64::MAX),
            ));
        }
        if let Some(&t) = self.snapshot_ticks.iter().find(|&&t| t > self.iterations) {
            return Err(Error::config(
                "snapshot_ticks",
                format!("tick {t} is beyond iterations ({})", self.iterations),
            ));
        }
        if let Some(&p) = self
            .observed_particles
            .iter()
            .find(|&&p| p >= self.swarm_size)
        {
            return Err(Error::config(
                "observed_particles",
                format!(
                    "particle {p} does not exist in a swarm of {}",
                    self.swarm_size
                ),
            ));
        }
        self.world.validate("world")?;
        self.spawn.validate("spawn")?;
        if !self.world.encloses(&self.spawn) {
            return Err(Error::config(
                "spawn",
                "spawn region must lie inside the world",
            ));
        }
        self.mql.validate()?;
        self.pso.validate()?;
        self.objective.validate()?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SwarmConfig = toml::from_str(text).map_err(|e| Error::ConfigParse {
            path: PathBuf::from("<config>"),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }
}

/// Reads, defaults and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<SwarmConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SwarmConfig::from_toml_str(&text).map_err(|e| match e {
        Error::ConfigParse { message, .. } => Error::ConfigParse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}
