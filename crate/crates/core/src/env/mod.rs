//! Built-in environments and the tagged configuration that selects them.
//!
//! Configs are JSON documents tagged by `"env"`:
//!
//! ```json
//! { "env": "river_cross", "grid_width": 8, ... }
//! ```

mod chain;
mod lane_world;
mod river_cross;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::mdp::{ActionId, Environment, Perception, SimRng, StateId, Transition};

pub use chain::{ChainConfig, ChainWorld, LEFT as CHAIN_LEFT, RIGHT as CHAIN_RIGHT};
pub use lane_world::{
    lane_world_actions, LaneAction, LaneObservation, LaneRewards, LaneWorld, LaneWorldConfig,
};
pub use river_cross::{
    river_cross_actions, FrogStatus, LanePattern, RiverAction, RiverCrossConfig, RiverRewards,
    RiverWorld,
};

/// Names accepted by [`EnvConfig::by_name`].
pub const ENVIRONMENT_NAMES: [&str; 3] = ["river_cross", "lane_world", "chain"];

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("unknown environment '{0}' (expected one of: river_cross, lane_world, chain)")]
    UnknownEnvironment(String),
    #[error("invalid {env} config: {reason}")]
    InvalidConfig { env: &'static str, reason: String },
    #[error("malformed environment config: {0}")]
    Parse(#[from] serde_json::Error),
}

pub(crate) fn invalid(env: &'static str, reason: impl Into<String>) -> EnvError {
    EnvError::InvalidConfig {
        env,
        reason: reason.into(),
    }
}

/// Configuration of one of the registered environments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "env", rename_all = "snake_case")]
pub enum EnvConfig {
    RiverCross(RiverCrossConfig),
    LaneWorld(LaneWorldConfig),
    Chain(ChainConfig),
}

/// Dynamic state of any registered environment.
#[derive(Clone, Debug, PartialEq)]
pub enum World {
    RiverCross(RiverWorld),
    LaneWorld(LaneWorld),
    Chain(ChainWorld),
}

impl EnvConfig {
    /// Default configuration of the environment registered as `name`.
    pub fn by_name(name: &str) -> Result<Self, EnvError> {
        match name {
            "river_cross" => Ok(Self::RiverCross(RiverCrossConfig::default())),
            "lane_world" => Ok(Self::LaneWorld(LaneWorldConfig::default())),
            "chain" => Ok(Self::Chain(ChainConfig::default())),
            other => Err(EnvError::UnknownEnvironment(other.to_string())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, EnvError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if let Some(name) = value.get("env").and_then(|v| v.as_str()) {
            if !ENVIRONMENT_NAMES.contains(&name) {
                return Err(EnvError::UnknownEnvironment(name.to_string()));
            }
        }
        let config: Self = serde_json::from_value(value)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        match self {
            Self::RiverCross(c) => c.validate(),
            Self::LaneWorld(c) => c.validate(),
            Self::Chain(c) => c.validate(),
        }
    }

    pub fn action_names(&self) -> Vec<&'static str> {
        match self {
            Self::RiverCross(_) => river_cross_actions().iter().map(|a| a.name()).collect(),
            Self::LaneWorld(_) => lane_world_actions().iter().map(|a| a.name()).collect(),
            Self::Chain(_) => vec!["left", "right"],
        }
    }

    pub fn action_name(&self, action: ActionId) -> &'static str {
        self.action_names()
            .get(action.index())
            .copied()
            .unwrap_or("?")
    }

    /// Schematic picture of `state`, used by the renderers.
    pub fn render_grid(&self, state: StateId) -> GridView {
        match self {
            Self::RiverCross(c) => c.render_grid(state),
            Self::LaneWorld(c) => c.render_grid(state),
            Self::Chain(c) => c.render_grid(state),
        }
    }

    pub fn grid_size(&self) -> (usize, usize) {
        let g = self.render_grid(StateId(0));
        (g.width, g.height)
    }
}

macro_rules! dispatch {
    ($self:ident, $c:ident => $e:expr) => {
        match $self {
            EnvConfig::RiverCross($c) => $e,
            EnvConfig::LaneWorld($c) => $e,
            EnvConfig::Chain($c) => $e,
        }
    };
}

impl Environment for EnvConfig {
    type World = World;

    fn name(&self) -> &'static str {
        dispatch!(self, c => c.name())
    }

    fn config_id(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        format!("{}:{}", self.name(), hex::encode(&digest[..8]))
    }

    fn action_count(&self) -> usize {
        dispatch!(self, c => c.action_count())
    }

    fn state_count(&self) -> Option<usize> {
        dispatch!(self, c => c.state_count())
    }

    fn max_steps(&self) -> usize {
        dispatch!(self, c => c.max_steps())
    }

    fn initial_world(&self, rng: &mut SimRng) -> World {
        match self {
            Self::RiverCross(c) => World::RiverCross(c.initial_world(rng)),
            Self::LaneWorld(c) => World::LaneWorld(c.initial_world(rng)),
            Self::Chain(c) => World::Chain(c.initial_world(rng)),
        }
    }

    fn transition(&self, world: &World, action: ActionId, rng: &mut SimRng) -> Transition<World> {
        fn wrap<W>(t: Transition<W>, f: fn(W) -> World) -> Transition<World> {
            Transition {
                world: f(t.world),
                reward: t.reward,
                terminal: t.terminal,
            }
        }
        match (self, world) {
            (Self::RiverCross(c), World::RiverCross(w)) => {
                wrap(c.transition(w, action, rng), World::RiverCross)
            }
            (Self::LaneWorld(c), World::LaneWorld(w)) => {
                wrap(c.transition(w, action, rng), World::LaneWorld)
            }
            (Self::Chain(c), World::Chain(w)) => wrap(c.transition(w, action, rng), World::Chain),
            _ => panic!("world does not belong to environment {}", self.name()),
        }
    }

    fn state_id(&self, world: &World) -> StateId {
        match (self, world) {
            (Self::RiverCross(c), World::RiverCross(w)) => c.state_id(w),
            (Self::LaneWorld(c), World::LaneWorld(w)) => c.state_id(w),
            (Self::Chain(c), World::Chain(w)) => c.state_id(w),
            _ => panic!("world does not belong to environment {}", self.name()),
        }
    }

    fn perceive(&self, state: StateId, perception: &Perception) -> StateId {
        dispatch!(self, c => c.perceive(state, perception))
    }

    fn perception(&self) -> Perception {
        dispatch!(self, c => c.perception())
    }
}

/// One cell of a schematic grid picture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tile {
    Grass,
    Goal,
    Road,
    Car,
    Water,
    Log,
    Lane,
    Vehicle,
}

impl Tile {
    pub fn glyph(self) -> char {
        match self {
            Tile::Grass => '.',
            Tile::Goal => '^',
            Tile::Road => '_',
            Tile::Car => 'C',
            Tile::Water => '~',
            Tile::Log => '=',
            Tile::Lane => '-',
            Tile::Vehicle => 'V',
        }
    }

    pub fn rgb(self) -> [u8; 3] {
        match self {
            Tile::Grass => [96, 160, 72],
            Tile::Goal => [40, 120, 40],
            Tile::Road => [70, 70, 70],
            Tile::Car => [230, 200, 40],
            Tile::Water => [40, 90, 200],
            Tile::Log => [130, 85, 40],
            Tile::Lane => [110, 110, 110],
            Tile::Vehicle => [60, 160, 220],
        }
    }
}

/// Row-major grid picture with the controlled agent's cell marked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridView {
    pub width: usize,
    pub height: usize,
    pub tiles: Vec<Tile>,
    pub agent: (usize, usize),
}

impl GridView {
    pub fn filled(width: usize, height: usize, tile: Tile) -> Self {
        Self {
            width,
            height,
            tiles: vec![tile; width * height],
            agent: (0, 0),
        }
    }

    pub fn tile(&self, x: usize, y: usize) -> Tile {
        self.tiles[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, tile: Tile) {
        self.tiles[y * self.width + x] = tile;
    }

    /// Text rows, with the agent drawn as `agent_glyph`.
    pub fn text_rows(&self, agent_glyph: char) -> Vec<String> {
        (0..self.height)
            .map(|y| {
                (0..self.width)
                    .map(|x| {
                        if (x, y) == self.agent {
                            agent_glyph
                        } else {
                            self.tile(x, y).glyph()
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::Simulation;
    use std::sync::Arc;

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(
            EnvConfig::by_name("frogger"),
            Err(EnvError::UnknownEnvironment(_))
        ));
        let err = EnvConfig::from_json(r#"{"env":"pacman"}"#).unwrap_err();
        assert!(matches!(err, EnvError::UnknownEnvironment(_)));
    }

    #[test]
    fn json_round_trip_preserves_config() {
        for name in ENVIRONMENT_NAMES {
            let c = EnvConfig::by_name(name).unwrap();
            let text = serde_json::to_string(&c).unwrap();
            assert_eq!(EnvConfig::from_json(&text).unwrap(), c);
        }
    }

    #[test]
    fn config_id_tracks_content() {
        let a = EnvConfig::by_name("river_cross").unwrap();
        let mut b = a.clone();
        if let EnvConfig::RiverCross(c) = &mut b {
            c.rewards.death_river = -1000.0;
        }
        assert_eq!(a.config_id(), a.clone().config_id());
        assert_ne!(a.config_id(), b.config_id());
        assert!(a.config_id().starts_with("river_cross:"));
    }

    #[test]
    fn same_config_and_seed_start_identically() {
        for name in ENVIRONMENT_NAMES {
            let env = Arc::new(EnvConfig::by_name(name).unwrap());
            let a = Simulation::new(env.clone(), 7);
            let b = Simulation::new(env, 7);
            assert_eq!(a.world(), b.world());
        }
    }
}
