//! Tabular Q-learning: the utility table, greedy selection and the
//! one-step temporal-difference update.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column index into a [`QTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Learning rate and discount, both within `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningParams {
    pub learning_rate: f64,
    pub discount: f64,
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            discount: 0.9,
        }
    }
}

impl LearningParams {
    pub fn new(learning_rate: f64, discount: f64) -> Result<Self> {
        let p = Self {
            learning_rate,
            discount,
        };
        p.validate("")?;
        Ok(p)
    }

    pub(crate) fn validate(&self, prefix: &str) -> Result<()> {
        for (name, v) in [
            ("learning_rate", self.learning_rate),
            ("discount", self.discount),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(
                    format!("{prefix}{name}"),
                    format!("must lie in [0, 1], got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// State x action utility matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    num_states: usize,
    num_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    /// All-zero table of the given shape.
    pub fn new(num_states: usize, num_actions: usize) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::ZeroDimension {
                states: num_states,
                actions: num_actions,
            });
        }
        Ok(Self {
            num_states,
            num_actions,
            values: vec![0.0; num_states * num_actions],
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, state: usize) -> Result<&[f64]> {
        self.check_state(state)?;
        let start = state * self.num_actions;
        Ok(&self.values[start..start + self.num_actions])
    }

    pub fn get(&self, state: usize, action: ActionId) -> Result<f64> {
        self.check_action(action)?;
        Ok(self.row(state)?[action.0])
    }

    /// Overwrites one cell. Non-finite values are rejected.
    pub fn set(&mut self, state: usize, action: ActionId, value: f64) -> Result<()> {
        self.check_state(state)?;
        self.check_action(action)?;
        if !value.is_finite() {
            return Err(Error::NonFiniteReward(value));
        }
        self.values[state * self.num_actions + action.0] = value;
        Ok(())
    }

    pub fn max_q(&self, state: usize) -> Result<f64> {
        Ok(self
            .row(state)?
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Every action attaining the row maximum, in ascending order.
    pub fn greedy_actions(&self, state: usize) -> Result<Vec<ActionId>> {
        let row = self.row(state)?;
        let best = self.max_q(state)?;
        Ok(row
            .iter()
            .enumerate()
            .filter(|(_, &q)| q == best)
            .map(|(a, _)| ActionId(a))
            .collect())
    }

    /// Greedy choice; ties are broken uniformly with one draw from `rng`.
    /// No draw is taken when the maximum is unique.
    pub fn greedy_action<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> Result<ActionId> {
        let tied = self.greedy_actions(state)?;
        Ok(match tied.len() {
            1 => tied[0],
            n => tied[rng.gen_range(0..n)],
        })
    }

    /// `Q(s,a) += lr * (r + discount * max_a' Q(s',a') - Q(s,a))`.
    /// Returns the new value of the updated cell.
    pub fn update(
        &mut self,
        state: usize,
        action: ActionId,
        reward: f64,
        next_state: usize,
        params: LearningParams,
    ) -> Result<f64> {
        if !reward.is_finite() {
            return Err(Error::NonFiniteReward(reward));
        }
        let old = self.get(state, action)?;
        let target = reward + params.discount * self.max_q(next_state)?;
        let new = old + params.learning_rate * (target - old);
        self.set(state, action, new)?;
        Ok(new)
    }

    fn check_state(&self, state: usize) -> Result<()> {
        if state >= self.num_states {
            return Err(Error::StateOutOfRange {
                state,
                num_states: self.num_states,
            });
        }
        Ok(())
    }

    fn check_action(&self, action: ActionId) -> Result<()> {
        if action.0 >= self.num_actions {
            return Err(Error::ActionOutOfRange {
                action: action.0,
                num_actions: self.num_actions,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table_with_row(row: &[f64]) -> QTable {
        let mut t = QTable::new(1, row.len()).unwrap();
        for (a, &v) in row.iter().enumerate() {
            t.set(0, ActionId(a), v).unwrap();
        }
        t
    }

    #[test]
    fn init_is_all_zero() {
        let t = QTable::new(5, 12).unwrap();
        assert_eq!(t.values().len(), 60);
        assert!(t.values().iter().all(|&v| v == 0.0));
        let t = QTable::new(1, 1).unwrap();
        assert_eq!(t.values(), &[0.0]);
    }

    #[test]
    fn init_rejects_empty_dims() {
        assert!(matches!(
            QTable::new(0, 3),
            Err(Error::ZeroDimension { .. })
        ));
        assert!(QTable::new(3, 0).is_err());
    }

    #[test]
    fn max_q_examples() {
        assert_eq!(table_with_row(&[1.0, 5.0, 2.0]).max_q(0).unwrap(), 5.0);
        assert_eq!(table_with_row(&[0.0, 0.0, 0.0]).max_q(0).unwrap(), 0.0);
        assert_eq!(table_with_row(&[-3.0, -1.0, -7.0]).max_q(0).unwrap(), -1.0);
        assert!(matches!(
            table_with_row(&[1.0]).max_q(1),
            Err(Error::StateOutOfRange { .. })
        ));
    }

    #[test]
    fn greedy_unique_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = table_with_row(&[1.0, 5.0, 2.0]);
        for _ in 0..20 {
            assert_eq!(t.greedy_action(0, &mut rng).unwrap(), ActionId(1));
        }
    }

    fn tie_histogram(row: &[f64], draws: usize) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = table_with_row(row);
        let mut counts = vec![0; row.len()];
        for _ in 0..draws {
            counts[t.greedy_action(0, &mut rng).unwrap().0] += 1;
        }
        counts
    }

    #[test]
    fn greedy_full_tie_is_uniform() {
        let counts = tie_histogram(&[0.0, 0.0, 0.0], 30_000);
        for c in counts {
            assert!((9_000..11_000).contains(&c), "count {c}");
        }
    }

    #[test]
    fn greedy_partial_tie_excludes_losers() {
        let counts = tie_histogram(&[7.0, 7.0, 1.0], 20_000);
        assert_eq!(counts[2], 0);
        assert!((9_000..11_000).contains(&counts[0]));
        assert!((9_000..11_000).contains(&counts[1]));
    }

    #[test]
    fn update_examples() {
        let p = LearningParams::new(0.1, 0.9).unwrap();
        let mut t = QTable::new(2, 2).unwrap();
        assert_eq!(t.update(0, ActionId(0), 100.0, 1, p).unwrap(), 10.0);

        let frozen = LearningParams::new(0.0, 0.9).unwrap();
        let mut t = QTable::new(1, 1).unwrap();
        t.set(0, ActionId(0), 3.5).unwrap();
        assert_eq!(t.update(0, ActionId(0), 1e6, 0, frozen).unwrap(), 3.5);

        // Q=10, r=-100, max_next=10, lr=0.5, discount=0.9 -> -40.5
        let p = LearningParams::new(0.5, 0.9).unwrap();
        let mut t = QTable::new(2, 1).unwrap();
        t.set(0, ActionId(0), 10.0).unwrap();
        t.set(1, ActionId(0), 10.0).unwrap();
        assert_eq!(t.update(0, ActionId(0), -100.0, 1, p).unwrap(), -40.5);
    }

    #[test]
    fn update_rejects_bad_input() {
        let p = LearningParams::default();
        let mut t = QTable::new(2, 2).unwrap();
        assert!(matches!(
            t.update(0, ActionId(0), f64::NAN, 1, p),
            Err(Error::NonFiniteReward(_))
        ));
        assert!(t.update(0, ActionId(2), 1.0, 1, p).is_err());
        assert!(t.update(0, ActionId(0), 1.0, 2, p).is_err());
        assert!(t.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn learning_params_range() {
        assert!(LearningParams::new(1.1, 0.5).is_err());
        assert!(LearningParams::new(0.5, -0.1).is_err());
        assert!(LearningParams::new(0.0, 1.0).is_ok());
    }

    proptest! {
        #[test]
        fn argmax_invariant_under_positive_scaling(
            row in prop::collection::vec(-100.0f64..100.0, 1..12),
            k in 1e-3f64..1e3,
        ) {
            let before = table_with_row(&row).greedy_actions(0).unwrap();
            let scaled: Vec<f64> = row.iter().map(|v| v * k).collect();
            let after = table_with_row(&scaled).greedy_actions(0).unwrap();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn fixed_point_for_any_rate(
            q_next in -50.0f64..50.0,
            r in -50.0f64..50.0,
            lr in 0.0f64..=1.0,
            discount in 0.0f64..=1.0,
        ) {
            let mut t = QTable::new(2, 1).unwrap();
            t.set(1, ActionId(0), q_next).unwrap();
            // choose Q(s,a) equal to the TD target so the error is zero
            let target = r + discount * q_next;
            t.set(0, ActionId(0), target).unwrap();
            let new = t.update(0, ActionId(0), r, 1, LearningParams { learning_rate: lr, discount }).unwrap();
            prop_assert_eq!(new, target);
        }

        #[test]
        fn update_touches_one_cell(
            init in prop::collection::vec(-10.0f64..10.0, 12),
            s in 0usize..3, a in 0usize..4, s_next in 0usize..3,
            r in -100.0f64..100.0,
        ) {
            let mut t = QTable::new(3, 4).unwrap();
            for (i, v) in init.iter().enumerate() {
                t.set(i / 4, ActionId(i % 4), *v).unwrap();
            }
            let before = t.values().to_vec();
            t.update(s, ActionId(a), r, s_next, LearningParams::default()).unwrap();
            let changed: Vec<usize> = before
                .iter()
                .zip(t.values())
                .enumerate()
                .filter(|(_, (x, y))| x != y)
                .map(|(i, _)| i)
                .collect();
            prop_assert!(changed.iter().all(|&i| i == s * 4 + a));
        }

        #[test]
        fn bounded_under_bounded_rewards(
            steps in prop::collection::vec((0usize..3, 0usize..4, 0usize..3, -100.0f64..=100.0), 1..400),
            lr in 0.0f64..=1.0,
            discount in 0.0f64..0.99,
        ) {
            let mut t = QTable::new(3, 4).unwrap();
            let p = LearningParams { learning_rate: lr, discount };
            let bound = 100.0 / (1.0 - discount) + 1e-9;
            for (s, a, s2, r) in steps {
                t.update(s, ActionId(a), r, s2, p).unwrap();
                prop_assert!(t.values().iter().all(|v| v.abs() <= bound));
            }
        }
    }
}
