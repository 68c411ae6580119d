//! Swarm-level and per-particle measurements over positions and traces.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{euclidean_distance, ParticleId, Vec2};
use crate::mql::StateId;
use crate::qlearning::ActionId;

/// One particle's log row for one tick. `position` and `neighbor_count`
/// are observed after the tick's move; `state` is the state the particle
/// acted from. `state`, `action` and `reward` are empty for baseline runs,
/// and `action`/`reward` are empty for particles idle under round-robin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    pub particle: ParticleId,
    pub position: Vec2,
    pub state: Option<StateId>,
    pub action: Option<ActionId>,
    pub reward: Option<f64>,
    pub neighbor_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// Strictly positive reward.
    Good,
    Bad,
    /// The particle did not act on this tick.
    Idle,
}

/// Sizes of the connected components of the proximity graph (edge iff
/// `d < epsilon`), largest first.
pub fn connectivity_components(positions: &[Vec2], epsilon: f64) -> Vec<usize> {
    let m = positions.len();
    let mut uf = UnionFind::<usize>::new(m);
    for i in 0..m {
        for k in (i + 1)..m {
            if euclidean_distance(positions[i], positions[k]) < epsilon {
                uf.union(i, k);
            }
        }
    }
    let mut sizes = vec![0usize; m];
    for i in 0..m {
        sizes[uf.find(i)] += 1;
    }
    let mut sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Fraction of particles with at least one peer closer than `epsilon`.
pub fn connected_fraction(positions: &[Vec2], epsilon: f64) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    let connected = positions
        .iter()
        .enumerate()
        .filter(|&(i, &p)| {
            positions
                .iter()
                .enumerate()
                .any(|(k, &q)| k != i && euclidean_distance(p, q) < epsilon)
        })
        .count();
    connected as f64 / positions.len() as f64
}

/// Fraction of unordered pairs closer than `d_min`. Zero for fewer than two particles.
pub fn overlap_fraction(positions: &[Vec2], d_min: f64) -> f64 {
    let m = positions.len();
    if m < 2 {
        return 0.0;
    }
    let mut close = 0usize;
    for i in 0..m {
        for k in (i + 1)..m {
            if euclidean_distance(positions[i], positions[k]) < d_min {
                close += 1;
            }
        }
    }
    close as f64 / (m * (m - 1) / 2) as f64
}

pub fn centroid(positions: &[Vec2]) -> Vec2 {
    let n = positions.len().max(1) as f64;
    let sum = positions.iter().fold(Vec2::ZERO, |acc, &p| acc + p);
    sum.scale(1.0 / n)
}

/// Mean distance from each particle to the swarm centroid.
pub fn dispersion(positions: &[Vec2]) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    let c = centroid(positions);
    positions
        .iter()
        .map(|&p| euclidean_distance(p, c))
        .sum::<f64>()
        / positions.len() as f64
}

fn records_for(trace: &[TickRecord], i: ParticleId) -> impl Iterator<Item = &TickRecord> {
    trace.iter().filter(move |r| r.particle == i)
}

/// Sum of the reward fields of particle `i`.
pub fn cumulative_reward(trace: &[TickRecord], i: ParticleId) -> Result<f64> {
    let mut seen = false;
    let mut total = 0.0;
    for r in records_for(trace, i) {
        seen = true;
        total += r.reward.unwrap_or(0.0);
    }
    if !seen {
        return Err(Error::UnknownParticle(i.index()));
    }
    Ok(total)
}

/// One judgement per record of particle `i`: good iff the reward is positive.
pub fn classify_decisions(trace: &[TickRecord], i: ParticleId) -> Vec<Decision> {
    records_for(trace, i)
        .map(|r| match r.reward {
            None => Decision::Idle,
            Some(v) if v > 0.0 => Decision::Good,
            Some(_) => Decision::Bad,
        })
        .collect()
}

/// First tick from which particle `i` never has a neighbour again, or
/// `None` when it ends the trace connected.
pub fn drift_onset(trace: &[TickRecord], i: ParticleId) -> Option<u64> {
    let mut onset = None;
    for r in records_for(trace, i) {
        if r.neighbor_count == 0 {
            onset.get_or_insert(r.tick);
        } else {
            onset = None;
        }
    }
    onset
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(tick: u64, particle: usize, reward: Option<f64>, neighbor_count: usize) -> TickRecord {
        TickRecord {
            tick,
            particle: ParticleId(particle),
            position: Vec2::ZERO,
            state: None,
            action: None,
            reward,
            neighbor_count,
        }
    }

    fn rewards(values: &[f64]) -> Vec<TickRecord> {
        values
            .iter()
            .enumerate()
            .map(|(t, &v)| rec(t as u64, 0, Some(v), 1))
            .collect()
    }

    fn counts(values: &[usize]) -> Vec<TickRecord> {
        values
            .iter()
            .enumerate()
            .map(|(t, &n)| rec(t as u64, 0, None, n))
            .collect()
    }

    #[test]
    fn components_examples() {
        let far = [
            Vec2::new(0.0, 0.0),
            Vec2::new(20.0, 0.0),
            Vec2::new(0.0, 20.0),
        ];
        assert_eq!(connectivity_components(&far, 10.0), vec![1, 1, 1]);

        let chain = [
            Vec2::new(0.0, 0.0),
            Vec2::new(5.0, 0.0),
            Vec2::new(10.0, 0.0),
        ];
        assert_eq!(connectivity_components(&chain, 10.0), vec![3]);

        assert_eq!(connectivity_components(&[Vec2::ZERO], 10.0), vec![1]);

        let mixed = [
            Vec2::new(0.0, 0.0),
            Vec2::new(50.0, 50.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(51.0, 50.0),
            Vec2::new(52.0, 50.0),
        ];
        assert_eq!(connectivity_components(&mixed, 10.0), vec![3, 2]);
    }

    #[test]
    fn connected_fraction_examples() {
        let cluster = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        assert_eq!(connected_fraction(&cluster, 10.0), 1.0);
        let apart = [Vec2::new(0.0, 0.0), Vec2::new(50.0, 0.0)];
        assert_eq!(connected_fraction(&apart, 10.0), 0.0);
        let one_out = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(90.0, 0.0),
        ];
        assert!((connected_fraction(&one_out, 10.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dispersion_examples() {
        let same = [Vec2::new(3.0, 3.0); 4];
        assert_eq!(dispersion(&same), 0.0);
        assert_eq!(dispersion(&[Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)]), 1.0);
    }

    #[test]
    fn overlap_fraction_counts_pairs() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(10.0, 0.0),
        ];
        assert!((overlap_fraction(&pts, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(overlap_fraction(&pts[..1], 1.0), 0.0);
    }

    #[test]
    fn cumulative_reward_examples() {
        assert_eq!(
            cumulative_reward(&rewards(&[100.0, -3.0, -100.0]), ParticleId(0)).unwrap(),
            -3.0
        );
        assert_eq!(
            cumulative_reward(&counts(&[1, 1]), ParticleId(0)).unwrap(),
            0.0
        );
        assert_eq!(
            cumulative_reward(&rewards(&[100.0; 7]), ParticleId(0)).unwrap(),
            700.0
        );
        assert!(matches!(
            cumulative_reward(&rewards(&[1.0]), ParticleId(3)),
            Err(Error::UnknownParticle(3))
        ));
    }

    #[test]
    fn classify_examples() {
        use Decision::*;
        assert_eq!(
            classify_decisions(&rewards(&[100.0, -3.0]), ParticleId(0)),
            vec![Good, Bad]
        );
        assert_eq!(
            classify_decisions(&rewards(&[0.0]), ParticleId(0)),
            vec![Bad]
        );
        assert_eq!(
            classify_decisions(&rewards(&[-100.0; 4]), ParticleId(0)),
            vec![Bad; 4]
        );
        assert_eq!(classify_decisions(&counts(&[1]), ParticleId(0)), vec![Idle]);
    }

    #[test]
    fn drift_onset_examples() {
        assert_eq!(
            drift_onset(&counts(&[2, 1, 0, 0, 0]), ParticleId(0)),
            Some(2)
        );
        assert_eq!(drift_onset(&counts(&[2, 1, 1]), ParticleId(0)), None);
        assert_eq!(
            drift_onset(&counts(&[1, 1, 1, 0, 0, 1, 1]), ParticleId(0)),
            None
        );
        assert_eq!(drift_onset(&counts(&[0, 0]), ParticleId(0)), Some(0));
    }

    fn cloud() -> impl Strategy<Value = Vec<Vec2>> {
        prop::collection::vec(
            (0.0f64..100.0, 0.0f64..100.0).prop_map(|(x, y)| Vec2::new(x, y)),
            1..30,
        )
    }

    proptest! {
        #[test]
        fn components_partition_swarm(pts in cloud(), eps in 1.0f64..40.0) {
            let sizes = connectivity_components(&pts, eps);
            prop_assert_eq!(sizes.iter().sum::<usize>(), pts.len());
            prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn connected_fraction_matches_singletons(pts in cloud(), eps in 1.0f64..40.0) {
            let singletons = connectivity_components(&pts, eps).iter().filter(|&&s| s == 1).count();
            let expected = 1.0 - singletons as f64 / pts.len() as f64;
            prop_assert!((connected_fraction(&pts, eps) - expected).abs() < 1e-12);
        }

        #[test]
        fn dispersion_translation_invariant(pts in cloud(), dx in -50.0f64..50.0, dy in -50.0f64..50.0) {
            let shifted: Vec<Vec2> = pts.iter().map(|&p| p + Vec2::new(dx, dy)).collect();
            prop_assert!((dispersion(&pts) - dispersion(&shifted)).abs() < 1e-9);
        }

        #[test]
        fn dispersion_scales_linearly(pts in cloud(), k in 0.1f64..10.0) {
            let c = centroid(&pts);
            let scaled: Vec<Vec2> = pts.iter().map(|&p| c + (p - c).scale(k)).collect();
            prop_assert!((dispersion(&scaled) - k * dispersion(&pts)).abs() < 1e-9 * (1.0 + k * dispersion(&pts)));
        }

        #[test]
        fn classification_length_matches_ticks(rs in prop::collection::vec(-100.0f64..100.0, 0..50)) {
            prop_assert_eq!(classify_decisions(&rewards(&rs), ParticleId(0)).len(), rs.len());
        }
    }
}
