//! Standard continuous particle swarm optimisation, used as the baseline swarm.
//!
//! The velocity rule follows the constricted, inertia-scaled form
//!
//! ```text
//! dv     = c1*r1*(pbest - x) + c2*r2*(gbest - x)
//! v(t+1) = constriction * w_t * dv                      (default)
//! v(t+1) = constriction * (w_t * v(t) + dv)             (canonical_velocity)
//! x(t+1) = x(t) + v(t+1)
//! w(t+1) = w_t * inertia_decrement
//! ```
//!
//! Each velocity component is clamped to `[v_min, v_max]` and positions are
//! clamped to the world. `r1` and `r2` are scalars drawn per particle per tick.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{clamp_to_world, euclidean_distance, ParticleId, Vec2, WorldBounds};
use crate::metrics::TickRecord;
use crate::mql::neighborhood;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    /// Cognitive coefficient.
    pub c1: f64,
    /// Social coefficient.
    pub c2: f64,
    pub inertia_w0: f64,
    /// Multiplicative inertia decay applied after every tick.
    pub inertia_decrement: f64,
    pub constriction: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Use `w*v(t) + dv` instead of `w*dv`.
    pub canonical_velocity: bool,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            c1: 2.0,
            c2: 2.0,
            inertia_w0: 0.9,
            inertia_decrement: 0.99,
            constriction: 1.0,
            v_min: -2.0,
            v_max: 2.0,
            canonical_velocity: false,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("pso.c1", self.c1), ("pso.c2", self.c2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(
                    key,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        for (key, v) in [
            ("pso.inertia_w0", self.inertia_w0),
            ("pso.inertia_decrement", self.inertia_decrement),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::config(key, format!("must lie in (0, 1], got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.constriction) {
            return Err(Error::config(
                "pso.constriction",
                format!("must lie in [0, 1], got {}", self.constriction),
            ));
        }
        if !self.v_min.is_finite() || !self.v_max.is_finite() || self.v_min >= self.v_max {
            return Err(Error::config(
                "pso.v_min",
                format!(
                    "v_min ({}) must be below v_max ({})",
                    self.v_min, self.v_max
                ),
            ));
        }
        Ok(())
    }

    fn clamp_velocity(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            v.x.clamp(self.v_min, self.v_max),
            v.y.clamp(self.v_min, self.v_max),
        )
    }
}

/// Cost function minimised by the baseline swarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Objective {
    /// Euclidean distance to a fixed point.
    Target { target: Vec2 },
    /// Squared distance to `center`.
    Sphere { center: Vec2 },
    /// Rastrigin function shifted so its global minimum sits at `center`.
    Rastrigin { center: Vec2 },
}

impl Default for Objective {
    fn default() -> Self {
        Objective::Target {
            target: WorldBounds::default().center(),
        }
    }
}

impl Objective {
    pub fn optimum(&self) -> Vec2 {
        match *self {
            Objective::Target { target } => target,
            Objective::Sphere { center } | Objective::Rastrigin { center } => center,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.optimum().is_finite() {
            return Err(Error::config("pso.objective", "optimum must be finite"));
        }
        Ok(())
    }
}

pub fn evaluate_fitness(x: Vec2, obj: &Objective) -> f64 {
    match *obj {
        Objective::Target { target } => euclidean_distance(x, target),
        Objective::Sphere { center } => {
            let d = x - center;
            d.x * d.x + d.y * d.y
        }
        Objective::Rastrigin { center } => {
            let d = x - center;
            let tau = std::f64::consts::TAU;
            20.0 + d.x * d.x - 10.0 * (tau * d.x).cos() + d.y * d.y - 10.0 * (tau * d.y).cos()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoParticle {
    pub position: Vec2,
    pub velocity: Vec2,
    pub personal_best: Vec2,
    pub personal_best_fitness: f64,
}

/// `min + (max - min) * u`.
pub fn init_component(min: f64, max: f64, u: f64) -> f64 {
    min + (max - min) * u
}

/// Draws `m` particles: positions uniform over `spawn`, velocities uniform
/// over `[v_min, v_max]`. Per particle the draws are taken in the order
/// x, y, vx, vy. Personal bests start at the initial positions.
pub fn pso_init<R: Rng + ?Sized>(
    m: usize,
    params: &PsoParams,
    spawn: &WorldBounds,
    objective: &Objective,
    rng: &mut R,
) -> Result<Vec<PsoParticle>> {
    if m == 0 {
        return Err(Error::EmptySwarm);
    }
    let swarm = (0..m)
        .map(|_| {
            let position = Vec2::new(
                init_component(spawn.x_min, spawn.x_max, rng.gen()),
                init_component(spawn.y_min, spawn.y_max, rng.gen()),
            );
            let velocity = Vec2::new(
                init_component(params.v_min, params.v_max, rng.gen()),
                init_component(params.v_min, params.v_max, rng.gen()),
            );
            PsoParticle {
                position,
                velocity,
                personal_best: position,
                personal_best_fitness: evaluate_fitness(position, objective),
            }
        })
        .collect();
    Ok(swarm)
}

/// Replaces the personal best on strict improvement. Returns whether it changed.
pub fn update_personal_best(p: &mut PsoParticle, obj: &Objective) -> bool {
    let fitness = evaluate_fitness(p.position, obj);
    if fitness < p.personal_best_fitness {
        p.personal_best = p.position;
        p.personal_best_fitness = fitness;
        true
    } else {
        false
    }
}

/// Particle with the lowest personal-best fitness; ties go to the lowest id.
pub fn select_global_best(swarm: &[PsoParticle]) -> Result<(ParticleId, Vec2)> {
    let mut best: Option<(usize, &PsoParticle)> = None;
    for (i, p) in swarm.iter().enumerate() {
        match best {
            Some((_, b)) if p.personal_best_fitness >= b.personal_best_fitness => {}
            _ => best = Some((i, p)),
        }
    }
    best.map(|(i, p)| (ParticleId(i), p.personal_best))
        .ok_or(Error::EmptySwarm)
}

/// Velocity rule with the two random coefficients supplied explicitly.
pub fn velocity_with_coefficients(
    p: &PsoParticle,
    global_best: Vec2,
    inertia: f64,
    params: &PsoParams,
    r1: f64,
    r2: f64,
) -> Vec2 {
    let cognitive = (p.personal_best - p.position).scale(params.c1 * r1);
    let social = (global_best - p.position).scale(params.c2 * r2);
    let dv = cognitive + social;
    let raw = if params.canonical_velocity {
        (p.velocity.scale(inertia) + dv).scale(params.constriction)
    } else {
        dv.scale(params.constriction * inertia)
    };
    params.clamp_velocity(raw)
}

/// Draws `r1` then `r2` and applies [`velocity_with_coefficients`].
pub fn velocity_update<R: Rng + ?Sized>(
    p: &PsoParticle,
    global_best: Vec2,
    inertia: f64,
    params: &PsoParams,
    rng: &mut R,
) -> Vec2 {
    let r1: f64 = rng.gen();
    let r2: f64 = rng.gen();
    velocity_with_coefficients(p, global_best, inertia, params, r1, r2)
}

/// The baseline swarm together with its evolving inertia and global best.
#[derive(Debug, Clone)]
pub struct PsoSwarm {
    particles: Vec<PsoParticle>,
    params: PsoParams,
    objective: Objective,
    world: WorldBounds,
    sensing_radius: f64,
    inertia: f64,
    global_best: (ParticleId, Vec2),
}

impl PsoSwarm {
    /// Builds a swarm from already-initialised particles. `sensing_radius`
    /// is only used to fill `neighbor_count` in the emitted records.
    pub fn from_particles(
        particles: Vec<PsoParticle>,
        params: PsoParams,
        objective: Objective,
        world: WorldBounds,
        sensing_radius: f64,
    ) -> Result<Self> {
        params.validate()?;
        let global_best = select_global_best(&particles)?;
        Ok(Self {
            particles,
            inertia: params.inertia_w0,
            params,
            objective,
            world,
            sensing_radius,
            global_best,
        })
    }

    pub fn spawn<R: Rng + ?Sized>(
        m: usize,
        params: PsoParams,
        objective: Objective,
        world: WorldBounds,
        spawn: &WorldBounds,
        sensing_radius: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let particles = pso_init(m, &params, spawn, &objective, rng)?;
        Self::from_particles(particles, params, objective, world, sensing_radius)
    }

    pub fn particles(&self) -> &[PsoParticle] {
        &self.particles
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.particles.iter().map(|p| p.position).collect()
    }

    /// Inertia weight that the next step will use.
    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub fn global_best(&self) -> (ParticleId, Vec2) {
        self.global_best
    }

    pub fn global_best_fitness(&self) -> f64 {
        self.particles[self.global_best.0.index()].personal_best_fitness
    }

    /// Advances every particle once against the global best from the start
    /// of the tick, then refreshes the global best and decays the inertia.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let g = self.global_best.1;
        let w = self.inertia;
        for p in &mut self.particles {
            let v = velocity_update(p, g, w, &self.params, rng);
            p.velocity = v;
            p.position = clamp_to_world(p.position + v, &self.world);
            update_personal_best(p, &self.objective);
        }
        // non-empty by construction
        self.global_best = select_global_best(&self.particles).expect("swarm is non-empty");
        self.inertia = w * self.params.inertia_decrement;
    }

    /// [`step`](Self::step) followed by one trace record per particle.
    pub fn tick<R: Rng + ?Sized>(&mut self, tick: u64, rng: &mut R) -> Vec<TickRecord> {
        self.step(rng);
        let positions = self.positions();
        (0..positions.len())
            .map(|i| TickRecord {
                tick,
                particle: ParticleId(i),
                position: positions[i],
                state: None,
                action: None,
                reward: None,
                neighbor_count: neighborhood(ParticleId(i), &positions, self.sensing_radius).len(),
            })
            .collect()
    }
}
