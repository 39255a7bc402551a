//! Contrastive policy summaries for tabular reinforcement-learning agents.
//!
//! Two Q-learning agents are run in the same seeded simulator. Wherever
//! their greedy actions differ, both are rolled forward from a restored
//! snapshot. The resulting trajectory pairs are scored and the best diverse
//! ones form a summary. A single-agent HIGHLIGHTS baseline shares the same
//! summary type, which can be rendered and evaluated.

pub mod agents;
pub mod disagreements;
pub mod env;
pub mod eval;
pub mod highlights;
pub mod importance;
pub mod mdp;
pub mod presets;
pub mod render;
pub mod rollout;
pub mod seed;
pub mod selection;
pub mod summary;

use std::sync::Arc;

pub use agents::{normalize, train, NormalizedQTable, QTable, TrainConfig};
pub use disagreements::{compare_agents, disagreement_summary, find_disagreements, Agent, ComparisonParams};
pub use env::{EnvConfig, EnvError};
pub use highlights::{highlights_summary, HighlightsParams};
pub use importance::ImportanceMethod;
pub use mdp::{ActionId, Environment, Perception, Simulation, StateId};
pub use summary::{Summary, TrajectoryPair};

/// Validate `env` and start a seeded simulation of it.
pub fn init_simulation(env: &EnvConfig, seed: u64) -> Result<Simulation<EnvConfig>, EnvError> {
    env.validate()?;
    Ok(Simulation::new(Arc::new(env.clone()), seed))
}
