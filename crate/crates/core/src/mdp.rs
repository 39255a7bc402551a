//! Tabular MDP primitives and a seedable simulator with snapshot/restore.
//!
//! A [`Simulation`] owns the full dynamic state of one episode, including its
//! random stream. Snapshots are deep copies, so a restored handle replays
//! exactly what the original would have produced from the same point.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Random stream carried by every simulation handle.
pub type SimRng = ChaCha8Rng;

/// Default per-episode step cap.
pub const DEFAULT_MAX_STEPS: usize = 500;

/// Version tag stamped into snapshots by this build.
pub const SNAPSHOT_VERSION: u32 = 1;

/// Index of a fully observed world state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Index into an environment's action list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// How an agent perceives the world. Agents with reduced perception map
/// several full states onto one key of their own Q-table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "radius")]
pub enum Perception {
    #[default]
    Full,
    VisionRadius(u32),
}

/// Result of one environment transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<W> {
    pub world: W,
    pub reward: f64,
    pub terminal: bool,
}

/// Result of [`Simulation::step`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub next_state: StateId,
    pub reward: f64,
    /// The episode admits no further steps (environment end or step cap).
    pub terminal: bool,
    /// The episode ended only because the step cap was reached.
    pub truncated: bool,
}

/// Dynamics of a tabular environment.
pub trait Environment: Send + Sync {
    type World: Clone + fmt::Debug + PartialEq + Send + Sync;

    /// Registered environment name.
    fn name(&self) -> &'static str;

    /// Stable identifier of this exact configuration.
    fn config_id(&self) -> String;

    fn action_count(&self) -> usize;

    /// Size of the state space when it is enumerable.
    fn state_count(&self) -> Option<usize>;

    fn max_steps(&self) -> usize;

    fn initial_world(&self, rng: &mut SimRng) -> Self::World;

    /// Advance `world` by one step. Must draw from `rng` only, so that the
    /// transition is a pure function of (world, action, rng state).
    fn transition(&self, world: &Self::World, action: ActionId, rng: &mut SimRng)
        -> Transition<Self::World>;

    fn state_id(&self, world: &Self::World) -> StateId;

    /// Key under which an agent with `perception` sees `state`.
    fn perceive(&self, state: StateId, perception: &Perception) -> StateId {
        let _ = perception;
        state
    }

    /// Perception of agents trained on this configuration.
    fn perception(&self) -> Perception {
        Perception::Full
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("episode already terminated after {steps} steps")]
    Terminated { steps: usize },
    #[error("illegal action {action} (environment has {count} actions)")]
    IllegalAction { action: ActionId, count: usize },
    #[error("snapshot version {found} does not match simulator version {expected}")]
    SnapshotVersion { found: u32, expected: u32 },
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
}

/// A running episode of an environment.
#[derive(Debug)]
pub struct Simulation<E: Environment> {
    env: Arc<E>,
    config_id: Arc<str>,
    world: E::World,
    step_count: usize,
    terminal: bool,
    rng: SimRng,
}

impl<E: Environment> Clone for Simulation<E> {
    fn clone(&self) -> Self {
        Self {
            env: self.env.clone(),
            config_id: self.config_id.clone(),
            world: self.world.clone(),
            step_count: self.step_count,
            terminal: self.terminal,
            rng: self.rng.clone(),
        }
    }
}

impl<E: Environment> Simulation<E> {
    /// Start an episode at the environment's initial state.
    pub fn new(env: Arc<E>, seed: u64) -> Self {
        let mut rng = SimRng::seed_from_u64(seed);
        let world = env.initial_world(&mut rng);
        let config_id = Arc::from(env.config_id());
        Self {
            env,
            config_id,
            world,
            step_count: 0,
            terminal: false,
            rng,
        }
    }

    pub fn env(&self) -> &Arc<E> {
        &self.env
    }

    pub fn config_id(&self) -> &str {
        &self.config_id
    }

    pub fn state(&self) -> StateId {
        self.env.state_id(&self.world)
    }

    pub fn world(&self) -> &E::World {
        &self.world
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    pub fn step(&mut self, action: ActionId) -> Result<StepOutcome, SimError> {
        if self.terminal {
            return Err(SimError::Terminated {
                steps: self.step_count,
            });
        }
        let count = self.env.action_count();
        if action.index() >= count {
            return Err(SimError::IllegalAction { action, count });
        }
        let t = self.env.transition(&self.world, action, &mut self.rng);
        self.world = t.world;
        self.step_count += 1;
        let capped = self.step_count >= self.env.max_steps();
        self.terminal = t.terminal || capped;
        Ok(StepOutcome {
            next_state: self.env.state_id(&self.world),
            reward: t.reward,
            terminal: self.terminal,
            truncated: capped && !t.terminal,
        })
    }

    pub fn snapshot(&self) -> Snapshot<E> {
        Snapshot {
            version: SNAPSHOT_VERSION,
            inner: self.clone(),
        }
    }
}

/// Deep copy of a simulation's dynamic state, random stream included.
#[derive(Debug)]
pub struct Snapshot<E: Environment> {
    version: u32,
    inner: Simulation<E>,
}

impl<E: Environment> Clone for Snapshot<E> {
    fn clone(&self) -> Self {
        Self {
            version: self.version,
            inner: self.inner.clone(),
        }
    }
}

impl<E: Environment> Snapshot<E> {
    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn step_count(&self) -> usize {
        self.inner.step_count
    }

    /// Fresh handle that behaves exactly like the snapshotted one.
    pub fn restore(&self) -> Result<Simulation<E>, SimError> {
        if self.version != SNAPSHOT_VERSION {
            return Err(SimError::SnapshotVersion {
                found: self.version,
                expected: SNAPSHOT_VERSION,
            });
        }
        let sim = &self.inner;
        if sim.step_count > sim.env.max_steps() {
            return Err(SimError::CorruptSnapshot(format!(
                "step count {} exceeds cap {}",
                sim.step_count,
                sim.env.max_steps()
            )));
        }
        if sim.env.config_id() != *sim.config_id {
            return Err(SimError::CorruptSnapshot(
                "environment configuration changed since capture".into(),
            ));
        }
        Ok(sim.clone())
    }

    #[cfg(test)]
    pub(crate) fn with_version(mut self, version: u32) -> Self {
        self.version = version;
        self
    }
}
