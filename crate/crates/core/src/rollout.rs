//! Greedy policy rollouts.

use std::sync::Arc;

use crate::agents::QTable;
use crate::env::EnvConfig;
use crate::mdp::{ActionId, SimError, Simulation, StateId};
use crate::seed::derive_seed;

/// One greedy episode: `states` has one more entry than `actions`.
#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    pub states: Vec<StateId>,
    pub actions: Vec<ActionId>,
    pub rewards: Vec<f64>,
}

impl Episode {
    pub fn total_return(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

/// Seed of episode `index` in a run seeded with `base`.
pub fn episode_seed(base: u64, index: usize) -> u64 {
    derive_seed(base, index as u64)
}

/// Run `agent` greedily for one episode.
pub fn run_greedy(agent: &QTable, env: &Arc<EnvConfig>, seed: u64) -> Result<Episode, SimError> {
    let mut sim = Simulation::new(env.clone(), seed);
    let mut ep = Episode {
        states: vec![sim.state()],
        actions: vec![],
        rewards: vec![],
    };
    while !sim.is_terminal() {
        let action = agent.act(env, sim.state());
        let out = sim.step(action)?;
        ep.actions.push(action);
        ep.rewards.push(out.reward);
        ep.states.push(out.next_state);
    }
    Ok(ep)
}

/// `episodes` greedy episodes with seeds derived from `seed`.
pub fn run_greedy_episodes(
    agent: &QTable,
    env: &EnvConfig,
    episodes: usize,
    seed: u64,
) -> Result<Vec<Episode>, SimError> {
    use rayon::prelude::*;
    let env = Arc::new(env.clone());
    (0..episodes)
        .into_par_iter()
        .map(|i| run_greedy(agent, &env, episode_seed(seed, i)))
        .collect()
}
