#![allow(dead_code)]

use pcx_core::agents::AgentMetadata;
use pcx_core::env::{ChainConfig, RiverCrossConfig};
use pcx_core::{Agent, EnvConfig, Environment, QTable, StateId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A 5x5 RiverCross with one road and one river row.
pub fn small_river() -> EnvConfig {
    let d = RiverCrossConfig::default();
    EnvConfig::RiverCross(RiverCrossConfig {
        grid_width: 5,
        grid_height: 5,
        road_rows: vec![3],
        car_pattern: vec![d.car_pattern[0]],
        river_rows: vec![1],
        log_pattern: vec![d.log_pattern[0]],
        max_steps: 60,
        ..d
    })
}

pub fn chain(length: u32, slip: f64) -> EnvConfig {
    EnvConfig::Chain(ChainConfig {
        length,
        slip,
        max_steps: 30,
        ..ChainConfig::default()
    })
}

/// A table with random small-integer values on a random subset of states,
/// so ties and unvisited states both occur.
pub fn random_table(env: &EnvConfig, seed: u64) -> QTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = env.state_count().expect("finite state space");
    let a = env.action_count();
    let mut rows = Vec::new();
    for s in 0..n {
        if rng.random_bool(0.8) {
            let row: Vec<f64> = (0..a).map(|_| f64::from(rng.random_range(-4i32..=4))).collect();
            rows.push((StateId(s as u32), row));
        }
    }
    QTable::from_rows(AgentMetadata::for_env(env), a, rows)
}

pub fn random_agent(id: &str, env: &EnvConfig, seed: u64) -> Agent {
    Agent::new(id, random_table(env, seed))
}

/// Greedy action straight from a row: first index of the maximum.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = i;
        }
    }
    best
}
