//! Swarm of Q-learning particles (M-QL).
//!
//! Each particle senses the peers strictly inside the connection radius
//! `epsilon`, summarises them into a discrete [`StateId`], picks a greedy
//! action from its own Q-table and moves `pi * step` along one axis. The
//! reward afterwards depends on the summed distance to the post-move
//! neighbours compared with `n * epsilon`:
//!
//! ```text
//! n == 0                          -> -reward_max   (lost connection)
//! some neighbour closer than d_min -> -reward_max   (overlap)
//! |D| <= tau_r * n * epsilon      -> +reward_max   (ideal spacing)
//! otherwise                       -> -min(|D|, reward_max)
//! where D = sum_k d(x_i, x_k) - n * epsilon
//! ```

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{clamp_to_world, euclidean_distance, ParticleId, Vec2, WorldBounds};
use crate::metrics::TickRecord;
use crate::qlearning::{ActionId, LearningParams, QTable};

/// Number of discrete states a particle can observe.
pub const NUM_STATES: usize = 5;
/// Two axes x two directions x three step magnitudes.
pub const NUM_ACTIONS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StateId {
    /// No peer inside the connection radius.
    Disconnected,
    /// At least one peer closer than `d_min`.
    TooClose,
    /// Neighbours are, on aggregate, closer than ideal.
    Near,
    /// Summed neighbour distance within `tau_s` of `n * epsilon`.
    Ideal,
    /// Summed neighbour distance above ideal.
    Far,
}

impl StateId {
    pub const ALL: [StateId; NUM_STATES] = [
        StateId::Disconnected,
        StateId::TooClose,
        StateId::Near,
        StateId::Ideal,
        StateId::Far,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            StateId::Disconnected => "DISCONNECTED",
            StateId::TooClose => "TOO_CLOSE",
            StateId::Near => "NEAR",
            StateId::Ideal => "IDEAL",
            StateId::Far => "FAR",
        }
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        StateId::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown state `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub axis: Axis,
    /// `+1.0` or `-1.0`.
    pub direction: f64,
    pub magnitude: f64,
}

/// Short, mid and long step lengths, strictly increasing and positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StepSet(pub [f64; 3]);

impl Default for StepSet {
    fn default() -> Self {
        StepSet([0.5, 1.0, 2.0])
    }
}

impl StepSet {
    pub fn longest(&self) -> f64 {
        self.0[2]
    }

    fn validate(&self) -> Result<()> {
        let [short, mid, long] = self.0;
        if !(short > 0.0 && short < mid && mid < long && long.is_finite()) {
            return Err(Error::config(
                "mql.step_set",
                format!("need 0 < short < mid < long, got {:?}", self.0),
            ));
        }
        Ok(())
    }
}

/// The twelve actions in table-column order:
/// `index = axis * 6 + direction * 3 + magnitude`, with horizontal before
/// vertical, forward before backward, short before long.
pub fn action_space(steps: &StepSet) -> Vec<ActionSpec> {
    let mut actions = Vec::with_capacity(NUM_ACTIONS);
    for axis in [Axis::Horizontal, Axis::Vertical] {
        for direction in [1.0, -1.0] {
            for &magnitude in &steps.0 {
                actions.push(ActionSpec {
                    axis,
                    direction,
                    magnitude,
                });
            }
        }
    }
    actions
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Every particle decides from the same tick-start snapshot, then all move.
    Simultaneous,
    /// Only particle `tick mod M` moves on each tick.
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MqlParams {
    /// Connection / sensing radius, also the ideal per-neighbour distance.
    pub epsilon: f64,
    /// Pairs closer than this overlap.
    pub d_min: f64,
    /// Relative tolerance for the full reward.
    pub tau_r: f64,
    /// Relative tolerance for the IDEAL state.
    pub tau_s: f64,
    pub reward_max: f64,
    pub step_set: StepSet,
    pub learning_rate: f64,
    pub discount: f64,
    /// Probability of a uniformly random action. 0 keeps selection purely greedy.
    pub exploration_rate: f64,
    pub schedule: Schedule,
    /// Steer disconnected particles towards their nearest peer.
    pub homing: bool,
}

impl Default for MqlParams {
    fn default() -> Self {
        let learning = LearningParams::default();
        Self {
            epsilon: 10.0,
            d_min: 2.0,
            tau_r: 0.02,
            tau_s: 0.05,
            reward_max: 100.0,
            step_set: StepSet::default(),
            learning_rate: learning.learning_rate,
            discount: learning.discount,
            exploration_rate: 0.0,
            schedule: Schedule::Simultaneous,
            homing: false,
        }
    }
}

impl MqlParams {
    pub fn learning(&self) -> LearningParams {
        LearningParams {
            learning_rate: self.learning_rate,
            discount: self.discount,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::config(
                "mql.epsilon",
                format!("must be positive, got {}", self.epsilon),
            ));
        }
        if !(self.d_min > 0.0 && self.d_min < self.epsilon) {
            return Err(Error::config(
                "mql.d_min",
                format!(
                    "must satisfy 0 < d_min < epsilon ({}), got {}",
                    self.epsilon, self.d_min
                ),
            ));
        }
        for (key, v) in [("mql.tau_r", self.tau_r), ("mql.tau_s", self.tau_s)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::config(key, format!("must lie in (0, 1), got {v}")));
            }
        }
        if !(self.reward_max.is_finite() && self.reward_max > 0.0) {
            return Err(Error::config(
                "mql.reward_max",
                format!("must be positive, got {}", self.reward_max),
            ));
        }
        self.step_set.validate()?;
        self.learning().validate("mql.")?;
        if !(0.0..=1.0).contains(&self.exploration_rate) {
            return Err(Error::config(
                "mql.exploration_rate",
                format!("must lie in [0, 1], got {}", self.exploration_rate),
            ));
        }
        Ok(())
    }
}

/// Peers `k != i` with `d(x_i, x_k) < epsilon`, in index order.
pub fn neighborhood(i: ParticleId, positions: &[Vec2], epsilon: f64) -> Vec<ParticleId> {
    let me = positions[i.index()];
    positions
        .iter()
        .enumerate()
        .filter(|&(k, &p)| k != i.index() && euclidean_distance(me, p) < epsilon)
        .map(|(k, _)| ParticleId(k))
        .collect()
}

fn neighbor_distances(i: ParticleId, positions: &[Vec2], epsilon: f64) -> Vec<f64> {
    let me = positions[i.index()];
    positions
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i.index())
        .map(|(_, &p)| euclidean_distance(me, p))
        .filter(|&d| d < epsilon)
        .collect()
}

/// Summed distance to the neighbours minus `n * epsilon`, with `n`.
/// The deviation is `None` when the particle has no neighbour.
pub fn distance_deviation(i: ParticleId, positions: &[Vec2], epsilon: f64) -> (Option<f64>, usize) {
    let distances = neighbor_distances(i, positions, epsilon);
    let n = distances.len();
    if n == 0 {
        return (None, 0);
    }
    let total: f64 = distances.iter().sum();
    (Some(total - n as f64 * epsilon), n)
}

pub fn encode_state(i: ParticleId, positions: &[Vec2], params: &MqlParams) -> StateId {
    let distances = neighbor_distances(i, positions, params.epsilon);
    if distances.is_empty() {
        return StateId::Disconnected;
    }
    if distances.iter().any(|&d| d < params.d_min) {
        return StateId::TooClose;
    }
    let n = distances.len() as f64;
    let deviation = distances.iter().sum::<f64>() - n * params.epsilon;
    let rho = deviation / (n * params.epsilon);
    if rho.abs() <= params.tau_s {
        StateId::Ideal
    } else if rho < 0.0 {
        StateId::Near
    } else {
        StateId::Far
    }
}

/// Step scale in `[0, 1]`: 1 when disconnected, otherwise the normalised
/// deviation `min(1, |D| / (n * epsilon))`.
pub fn step_scale_pi(i: ParticleId, positions: &[Vec2], params: &MqlParams) -> f64 {
    match distance_deviation(i, positions, params.epsilon) {
        (None, _) => 1.0,
        (Some(d), n) => (d.abs() / (n as f64 * params.epsilon)).min(1.0),
    }
}

/// Moves `pi * magnitude` along the action's axis, then clamps to the world.
pub fn apply_action(pos: Vec2, action: &ActionSpec, pi: f64, world: &WorldBounds) -> Vec2 {
    let delta = pi * action.magnitude * action.direction;
    let moved = match action.axis {
        Axis::Horizontal => Vec2::new(pos.x + delta, pos.y),
        Axis::Vertical => Vec2::new(pos.x, pos.y + delta),
    };
    clamp_to_world(moved, world)
}

/// Connectivity reward for particle `i` at (post-move) `positions`.
/// Always within `[-reward_max, reward_max]`.
pub fn reward(i: ParticleId, positions: &[Vec2], params: &MqlParams) -> f64 {
    let distances = neighbor_distances(i, positions, params.epsilon);
    if distances.is_empty() {
        return -params.reward_max;
    }
    if distances.iter().any(|&d| d < params.d_min) {
        return -params.reward_max;
    }
    let n = distances.len() as f64;
    let deviation = (distances.iter().sum::<f64>() - n * params.epsilon).abs();
    if deviation <= params.tau_r * n * params.epsilon {
        params.reward_max
    } else {
        -deviation.min(params.reward_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MqlParticle {
    pub position: Vec2,
    pub qtable: QTable,
    pub last_state: StateId,
    pub last_action: Option<ActionId>,
    /// Sum of every reward received so far.
    pub cumulative_reward: f64,
}

struct Decision {
    state: StateId,
    action: ActionId,
    target: Vec2,
}

/// A swarm of Q-learning particles inside a bounded world.
#[derive(Debug, Clone)]
pub struct MqlSwarm {
    particles: Vec<MqlParticle>,
    params: MqlParams,
    world: WorldBounds,
    actions: Vec<ActionSpec>,
}

impl MqlSwarm {
    /// Places particles at the given positions with fresh all-zero tables.
    pub fn from_positions(
        positions: Vec<Vec2>,
        params: MqlParams,
        world: WorldBounds,
    ) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptySwarm);
        }
        params.validate()?;
        let positions: Vec<Vec2> = positions
            .into_iter()
            .map(|p| clamp_to_world(p, &world))
            .collect();
        let particles = (0..positions.len())
            .map(|i| {
                Ok(MqlParticle {
                    position: positions[i],
                    qtable: QTable::new(NUM_STATES, NUM_ACTIONS)?,
                    last_state: encode_state(ParticleId(i), &positions, &params),
                    last_action: None,
                    cumulative_reward: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            particles,
            actions: action_space(&params.step_set),
            params,
            world,
        })
    }

    /// Uniform placement over `spawn`, drawing x then y per particle.
    pub fn spawn<R: Rng + ?Sized>(
        m: usize,
        params: MqlParams,
        world: WorldBounds,
        spawn: &WorldBounds,
        rng: &mut R,
    ) -> Result<Self> {
        let positions = (0..m)
            .map(|_| {
                Vec2::new(
                    spawn.x_min + spawn.width() * rng.gen::<f64>(),
                    spawn.y_min + spawn.height() * rng.gen::<f64>(),
                )
            })
            .collect();
        Self::from_positions(positions, params, world)
    }

    pub fn particles(&self) -> &[MqlParticle] {
        &self.particles
    }

    pub fn params(&self) -> &MqlParams {
        &self.params
    }

    pub fn actions(&self) -> &[ActionSpec] {
        &self.actions
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.particles.iter().map(|p| p.position).collect()
    }

    /// Runs one tick and returns one record per particle, in index order.
    ///
    /// Randomness is consumed in particle-index order: an exploration draw
    /// (only when `exploration_rate > 0`), then a tie-break draw when the
    /// greedy maximum is shared.
    pub fn tick<R: Rng + ?Sized>(&mut self, tick: u64, rng: &mut R) -> Vec<TickRecord> {
        let snapshot = self.positions();
        let m = snapshot.len();
        let movers: Vec<usize> = match self.params.schedule {
            Schedule::Simultaneous => (0..m).collect(),
            Schedule::RoundRobin => vec![(tick % m as u64) as usize],
        };

        let decisions: Vec<(usize, Decision)> = movers
            .iter()
            .map(|&i| (i, self.decide(i, &snapshot, rng)))
            .collect();

        let mut after = snapshot.clone();
        for (i, d) in &decisions {
            after[*i] = d.target;
        }

        let learning = self.params.learning();
        let mut records: Vec<TickRecord> = (0..m)
            .map(|i| TickRecord {
                tick,
                particle: ParticleId(i),
                position: after[i],
                state: Some(encode_state(ParticleId(i), &snapshot, &self.params)),
                action: None,
                reward: None,
                neighbor_count: neighborhood(ParticleId(i), &after, self.params.epsilon).len(),
            })
            .collect();

        for (i, d) in decisions {
            let id = ParticleId(i);
            let r = reward(id, &after, &self.params);
            let next = encode_state(id, &after, &self.params);
            let p = &mut self.particles[i];
            p.qtable
                .update(d.state.index(), d.action, r, next.index(), learning)
                .expect("indices come from the fixed state/action spaces");
            p.cumulative_reward += r;
            p.last_state = next;
            p.last_action = Some(d.action);
            records[i].state = Some(d.state);
            records[i].action = Some(d.action);
            records[i].reward = Some(r);
        }
        for (p, pos) in self.particles.iter_mut().zip(&after) {
            p.position = *pos;
        }
        records
    }

    fn decide<R: Rng + ?Sized>(&self, i: usize, snapshot: &[Vec2], rng: &mut R) -> Decision {
        let id = ParticleId(i);
        let state = encode_state(id, snapshot, &self.params);
        let action = self.choose_action(i, state, snapshot, rng);
        let pi = step_scale_pi(id, snapshot, &self.params);
        let target = apply_action(snapshot[i], &self.actions[action.index()], pi, &self.world);
        Decision {
            state,
            action,
            target,
        }
    }

    fn choose_action<R: Rng + ?Sized>(
        &self,
        i: usize,
        state: StateId,
        snapshot: &[Vec2],
        rng: &mut R,
    ) -> ActionId {
        if self.params.exploration_rate > 0.0 && rng.gen::<f64>() < self.params.exploration_rate {
            return ActionId(rng.gen_range(0..NUM_ACTIONS));
        }
        if self.params.homing && state == StateId::Disconnected {
            if let Some(a) = self.homing_action(i, snapshot) {
                return a;
            }
        }
        self.particles[i]
            .qtable
            .greedy_action(state.index(), rng)
            .expect("state index is within the table")
    }

    /// Action that brings particle `i` closest to its nearest peer at full
    /// step scale; lowest index wins ties.
    fn homing_action(&self, i: usize, snapshot: &[Vec2]) -> Option<ActionId> {
        let me = snapshot[i];
        let nearest = snapshot
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &p)| p)
            .min_by(|a, b| euclidean_distance(me, *a).total_cmp(&euclidean_distance(me, *b)))?;
        let mut best: Option<(usize, f64)> = None;
        for (a, spec) in self.actions.iter().enumerate() {
            let d = euclidean_distance(apply_action(me, spec, 1.0, &self.world), nearest);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((a, d));
            }
        }
        best.map(|(a, _)| ActionId(a))
    }
}
