//! Tabular Q-learning agents.
//!
//! A [`QTable`] stores one row of action values per visited state; states
//! that were never updated read as all-zero rows. Policies are always the
//! greedy argmax with ties broken towards the lowest action index.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::EnvConfig;
use crate::mdp::{ActionId, Environment, Perception, SimError, Simulation, StateId};
use crate::seed::derive_seed;

/// Version of the agent file format written by [`QTable::save`].
pub const AGENT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("cannot normalize an empty Q-table")]
    EmptyTable,
    #[error("agent is incompatible with environment: {0}")]
    Incompatible(String),
    #[error("agent file schema version {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("malformed agent file: {0}")]
    Malformed(String),
    #[error("agent file I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("agent file parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Where a table came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentMetadata {
    pub env: String,
    pub env_config_id: String,
    pub env_config: EnvConfig,
    #[serde(default)]
    pub perception: Perception,
    pub training_episodes: u32,
    pub seed: u64,
}

impl AgentMetadata {
    /// Metadata for a table keyed the way agents trained on `env` see it.
    pub fn for_env(env: &EnvConfig) -> Self {
        Self {
            env: env.name().to_string(),
            env_config_id: env.config_id(),
            env_config: env.clone(),
            perception: env.perception(),
            training_episodes: 0,
            seed: 0,
        }
    }
}

/// Read access shared by raw and normalized tables.
pub trait ActionValues {
    fn action_count(&self) -> usize;

    fn row(&self, state: StateId) -> Option<&[f64]>;

    /// Argmax over actions, lowest index on ties; unvisited → action 0.
    fn greedy_action(&self, state: StateId) -> ActionId {
        let Some(row) = self.row(state) else {
            return ActionId(0);
        };
        let mut best = 0;
        for (a, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = a;
            }
        }
        ActionId(best as u32)
    }

    /// Highest action value in `state`; 0 for unvisited states.
    fn max_value(&self, state: StateId) -> f64 {
        self.row(state)
            .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    action_count: usize,
    rows: BTreeMap<StateId, Vec<f64>>,
    pub metadata: AgentMetadata,
}

impl ActionValues for QTable {
    fn action_count(&self) -> usize {
        self.action_count
    }

    fn row(&self, state: StateId) -> Option<&[f64]> {
        self.rows.get(&state).map(Vec::as_slice)
    }
}

impl QTable {
    pub fn new(action_count: usize, metadata: AgentMetadata) -> Self {
        Self {
            action_count,
            rows: BTreeMap::new(),
            metadata,
        }
    }

    /// Empty table for agents acting in `env`.
    pub fn for_env(env: &EnvConfig) -> Self {
        Self::new(env.action_count(), AgentMetadata::for_env(env))
    }

    /// Build a table from explicit rows. Panics if a row has the wrong width.
    pub fn from_rows(
        metadata: AgentMetadata,
        action_count: usize,
        rows: impl IntoIterator<Item = (StateId, Vec<f64>)>,
    ) -> Self {
        let mut q = Self::new(action_count, metadata);
        for (s, row) in rows {
            assert_eq!(row.len(), action_count, "row width for {s}");
            q.rows.insert(s, row);
        }
        q
    }

    pub fn value(&self, state: StateId, action: ActionId) -> f64 {
        self.row(state).map_or(0.0, |r| r[action.index()])
    }

    pub fn set(&mut self, state: StateId, action: ActionId, value: f64) {
        self.row_mut(state)[action.index()] = value;
    }

    fn row_mut(&mut self, state: StateId) -> &mut Vec<f64> {
        let n = self.action_count;
        self.rows.entry(state).or_insert_with(|| vec![0.0; n])
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.rows.keys().copied()
    }

    /// Stored `(state, action, value)` triples in (state, action) order.
    pub fn entries(&self) -> impl Iterator<Item = (StateId, ActionId, f64)> + '_ {
        self.rows.iter().flat_map(|(&s, row)| {
            row.iter()
                .enumerate()
                .map(move |(a, &v)| (s, ActionId(a as u32), v))
        })
    }

    /// Key under which this agent sees the full state `state`.
    pub fn perceive(&self, env: &EnvConfig, state: StateId) -> StateId {
        env.perceive(state, &self.metadata.perception)
    }

    /// Greedy action of this agent in the full state `state` of `env`.
    pub fn act(&self, env: &EnvConfig, state: StateId) -> ActionId {
        self.greedy_action(self.perceive(env, state))
    }

    /// Check that this table's encoding matches `env`.
    pub fn ensure_compatible(&self, env: &EnvConfig) -> Result<(), AgentError> {
        if self.metadata.env != env.name() {
            return Err(AgentError::Incompatible(format!(
                "trained on '{}', environment is '{}'",
                self.metadata.env,
                env.name()
            )));
        }
        if self.action_count != env.action_count() {
            return Err(AgentError::Incompatible(format!(
                "table has {} actions, environment has {}",
                self.action_count,
                env.action_count()
            )));
        }
        if self.metadata.env_config.state_count() != env.state_count() {
            return Err(AgentError::Incompatible(
                "state encodings differ (different state-space size)".into(),
            ));
        }
        if let Some(n) = env.state_count() {
            if let Some(s) = self.rows.keys().next_back().filter(|s| s.index() >= n) {
                return Err(AgentError::Incompatible(format!(
                    "state {s} outside environment state space of {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = AgentFile {
            schema_version: AGENT_SCHEMA_VERSION,
            metadata: self.metadata.clone(),
            action_count: self.action_count,
            entries: self.entries().map(|(s, a, v)| (s.0, a.0, v)).collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("agent serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, AgentError> {
        let file: AgentFile = serde_json::from_str(text)?;
        if file.schema_version != AGENT_SCHEMA_VERSION {
            return Err(AgentError::SchemaVersion {
                found: file.schema_version,
                expected: AGENT_SCHEMA_VERSION,
            });
        }
        if file.action_count == 0 {
            return Err(AgentError::Malformed("action_count must be positive".into()));
        }
        let mut rows: BTreeMap<StateId, Vec<Option<f64>>> = BTreeMap::new();
        for (s, a, v) in file.entries {
            if a as usize >= file.action_count {
                return Err(AgentError::Malformed(format!(
                    "entry for action {a} but action_count is {}",
                    file.action_count
                )));
            }
            let row = rows
                .entry(StateId(s))
                .or_insert_with(|| vec![None; file.action_count]);
            if row[a as usize].replace(v).is_some() {
                return Err(AgentError::Malformed(format!("duplicate entry ({s}, {a})")));
            }
        }
        let mut q = Self::new(file.action_count, file.metadata);
        for (s, row) in rows {
            let row: Option<Vec<f64>> = row.into_iter().collect();
            let row = row.ok_or_else(|| AgentError::Malformed(format!("incomplete row for {s}")))?;
            q.rows.insert(s, row);
        }
        Ok(q)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), AgentError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AgentError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Load and check compatibility with `env` in one go.
    pub fn load_for(path: impl AsRef<Path>, env: &EnvConfig) -> Result<Self, AgentError> {
        let q = Self::load(path)?;
        q.ensure_compatible(env)?;
        Ok(q)
    }
}

#[derive(Serialize, Deserialize)]
struct AgentFile {
    schema_version: u32,
    metadata: AgentMetadata,
    action_count: usize,
    entries: Vec<(u32, u32, f64)>,
}

/// Q-values rescaled to [0, 1] by the global min and max of stored entries.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedQTable {
    action_count: usize,
    rows: BTreeMap<StateId, Vec<f64>>,
    perception: Perception,
}

impl ActionValues for NormalizedQTable {
    fn action_count(&self) -> usize {
        self.action_count
    }

    fn row(&self, state: StateId) -> Option<&[f64]> {
        self.rows.get(&state).map(Vec::as_slice)
    }
}

impl NormalizedQTable {
    /// Agent state value: best normalized Q-value, 0 when unvisited.
    pub fn state_value(&self, state: StateId) -> f64 {
        self.max_value(state)
    }

    pub fn perception(&self) -> &Perception {
        &self.perception
    }
}

/// Min-max normalize `q` over its stored entries. A constant table maps to 0.
pub fn normalize(q: &QTable) -> Result<NormalizedQTable, AgentError> {
    if q.is_empty() {
        return Err(AgentError::EmptyTable);
    }
    let (lo, hi) = q
        .entries()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, _, v)| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    let rows = q
        .rows
        .iter()
        .map(|(&s, row)| {
            let scaled = row
                .iter()
                .map(|&v| if span > 0.0 { (v - lo) / span } else { 0.0 })
                .collect();
            (s, scaled)
        })
        .collect();
    Ok(NormalizedQTable {
        action_count: q.action_count,
        rows,
        perception: q.metadata.perception,
    })
}

/// Greedy action; free-function form of [`ActionValues::greedy_action`].
pub fn greedy_action(q: &impl ActionValues, state: StateId) -> ActionId {
    q.greedy_action(state)
}

/// Agent state value; free-function form of [`NormalizedQTable::state_value`].
pub fn state_value(nq: &NormalizedQTable, state: StateId) -> f64 {
    nq.state_value(state)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub episodes: u32,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            episodes: 2000,
            alpha: 0.2,
            gamma: 0.95,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: &str| Err(AgentError::InvalidConfig(m.into()));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0, 1]");
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must lie in (0, 1]");
        }
        if !(0.0 <= self.epsilon_end
            && self.epsilon_end <= self.epsilon_start
            && self.epsilon_start <= 1.0)
        {
            return bad("need 0 <= epsilon_end <= epsilon_start <= 1");
        }
        Ok(())
    }

    /// Exploration rate for `episode`, decaying linearly over the run.
    pub fn epsilon(&self, episode: u32) -> f64 {
        if self.episodes <= 1 {
            return self.epsilon_start;
        }
        let frac = f64::from(episode) / f64::from(self.episodes - 1);
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac
    }
}

/// Stream id for the exploration generator; episode seeds use 0..episodes.
const EXPLORATION_STREAM: u64 = u64::MAX;

/// Train a table with one-step Q-learning and epsilon-greedy exploration.
pub fn train(env: &EnvConfig, cfg: &TrainConfig) -> Result<QTable, AgentError> {
    cfg.validate()?;
    env.validate()
        .map_err(|e| AgentError::InvalidConfig(e.to_string()))?;
    let mut q = QTable::for_env(env);
    q.metadata.training_episodes = cfg.episodes;
    q.metadata.seed = cfg.seed;
    let perception = q.metadata.perception;
    let actions = env.action_count();
    let shared = Arc::new(env.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, EXPLORATION_STREAM));

    for episode in 0..cfg.episodes {
        let eps = cfg.epsilon(episode);
        let mut sim = Simulation::new(shared.clone(), derive_seed(cfg.seed, u64::from(episode)));
        let mut state = env.perceive(sim.state(), &perception);
        while !sim.is_terminal() {
            let action = if rng.random::<f64>() < eps {
                ActionId(rng.random_range(0..actions) as u32)
            } else {
                q.greedy_action(state)
            };
            let out = sim.step(action)?;
            let next = env.perceive(out.next_state, &perception);
            let bootstrap = !out.terminal || out.truncated;
            let target = out.reward + if bootstrap { cfg.gamma * q.max_value(next) } else { 0.0 };
            let old = q.value(state, action);
            q.set(state, action, old + cfg.alpha * (target - old));
            state = next;
        }
    }
    Ok(q)
}
