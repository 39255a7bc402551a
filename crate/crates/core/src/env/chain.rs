//! Linear chain: move left or right, episode ends at the right end.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, EnvError, GridView, Tile};
use crate::mdp::{ActionId, Environment, SimRng, StateId, Transition, DEFAULT_MAX_STEPS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub length: u32,
    #[serde(default)]
    pub start: u32,
    pub goal_reward: f64,
    #[serde(default)]
    pub step_reward: f64,
    /// Probability that the chosen move is reversed.
    #[serde(default)]
    pub slip: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            length: 4,
            start: 0,
            goal_reward: 1.0,
            step_reward: 0.0,
            slip: 0.0,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChainWorld {
    pub position: u32,
}

pub const LEFT: ActionId = ActionId(0);
pub const RIGHT: ActionId = ActionId(1);

impl ChainConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.length < 2 {
            return Err(invalid("chain", "length must be at least 2"));
        }
        if self.start >= self.length - 1 {
            return Err(invalid("chain", "start must precede the goal cell"));
        }
        if !(0.0..=1.0).contains(&self.slip) {
            return Err(invalid("chain", "slip must lie in [0, 1]"));
        }
        if self.max_steps == 0 {
            return Err(invalid("chain", "max_steps must be positive"));
        }
        Ok(())
    }

    pub fn render_grid(&self, state: StateId) -> GridView {
        let mut g = GridView::filled(self.length as usize, 1, Tile::Grass);
        g.set(self.length as usize - 1, 0, Tile::Goal);
        g.agent = (state.index().min(self.length as usize - 1), 0);
        g
    }
}

impl Environment for ChainConfig {
    type World = ChainWorld;

    fn name(&self) -> &'static str {
        "chain"
    }

    fn config_id(&self) -> String {
        format!("chain:{}", self.length)
    }

    fn action_count(&self) -> usize {
        2
    }

    fn state_count(&self) -> Option<usize> {
        Some(self.length as usize)
    }

    fn max_steps(&self) -> usize {
        self.max_steps
    }

    fn initial_world(&self, _rng: &mut SimRng) -> ChainWorld {
        ChainWorld {
            position: self.start,
        }
    }

    fn transition(&self, w: &ChainWorld, action: ActionId, rng: &mut SimRng) -> Transition<ChainWorld> {
        let slipped = rng.random::<f64>() < self.slip;
        let right = (action == RIGHT) != slipped;
        let position = if right {
            (w.position + 1).min(self.length - 1)
        } else {
            w.position.saturating_sub(1)
        };
        let terminal = position == self.length - 1;
        Transition {
            world: ChainWorld { position },
            reward: self.step_reward + if terminal { self.goal_reward } else { 0.0 },
            terminal,
        }
    }

    fn state_id(&self, w: &ChainWorld) -> StateId {
        StateId(w.position)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::Simulation;
    use std::sync::Arc;

    #[test]
    fn right_from_two_reaches_three() {
        let c = ChainConfig {
            length: 5,
            goal_reward: 10.0,
            step_reward: -1.0,
            ..ChainConfig::default()
        };
        let mut rng = <SimRng as rand::SeedableRng>::seed_from_u64(0);
        let t = c.transition(&ChainWorld { position: 2 }, RIGHT, &mut rng);
        assert_eq!(t.world.position, 3);
        assert_eq!(t.reward, -1.0);
        assert!(!t.terminal);
        let t = c.transition(&ChainWorld { position: 3 }, RIGHT, &mut rng);
        assert!(t.terminal);
        assert_eq!(t.reward, 9.0);
    }

    #[test]
    fn slippery_chain_replays_from_snapshot() {
        let env = Arc::new(ChainConfig {
            length: 30,
            slip: 0.4,
            ..ChainConfig::default()
        });
        let mut sim = Simulation::new(env, 5);
        for _ in 0..3 {
            sim.step(RIGHT).unwrap();
        }
        let snap = sim.snapshot();
        let mut a = snap.restore().unwrap();
        let mut b = snap.restore().unwrap();
        for i in 0..20 {
            let act = if i % 3 == 0 { LEFT } else { RIGHT };
            assert_eq!(a.step(act).unwrap(), b.step(act).unwrap());
        }
    }
}
