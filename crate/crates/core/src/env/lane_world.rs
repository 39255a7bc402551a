//! Multi-lane highway in ego-relative coordinates.
//!
//! Traffic moves at one cell per step; the ego vehicle moves at
//! `velocity + 1`, so other vehicles drift towards it by `velocity` cells per
//! step and never approach from behind. The road never ends: episodes stop
//! on collision or at the step cap.
//!
//! The observation (and the state id) holds the ego lane and velocity level
//! plus the distance to the nearest vehicle ahead in each lane.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, EnvError, GridView, Tile};
use crate::mdp::{ActionId, Environment, SimRng, StateId, Transition, DEFAULT_MAX_STEPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LaneAction {
    Left,
    Right,
    Faster,
    Slower,
    Idle,
}

impl LaneAction {
    pub fn name(self) -> &'static str {
        match self {
            Self::Left => "left",
            Self::Right => "right",
            Self::Faster => "faster",
            Self::Slower => "slower",
            Self::Idle => "idle",
        }
    }

    pub fn id(self) -> ActionId {
        ActionId(self as u32)
    }
}

const LANE_ACTIONS: [LaneAction; 5] = [
    LaneAction::Left,
    LaneAction::Right,
    LaneAction::Faster,
    LaneAction::Slower,
    LaneAction::Idle,
];

/// Ego vehicle actions, in action-index order.
pub fn lane_world_actions() -> &'static [LaneAction] {
    &LANE_ACTIONS
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaneRewards {
    pub collision: f64,
    pub velocity_coeff: f64,
    pub front_gap_coeff: f64,
    pub k_nearest_gap_coeff: f64,
    pub right_lane_coeff: f64,
}

impl Default for LaneRewards {
    fn default() -> Self {
        Self {
            collision: -10.0,
            velocity_coeff: 0.4,
            front_gap_coeff: 1.0,
            k_nearest_gap_coeff: 0.0,
            right_lane_coeff: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaneWorldConfig {
    pub lane_count: u32,
    pub velocity_levels: u32,
    /// Cells of road visible ahead of the ego vehicle.
    pub view_length: u32,
    /// Per-lane probability of a vehicle entering at the horizon each step.
    pub traffic_density: f64,
    /// Minimum distance between an entering vehicle and the one before it.
    #[serde(default = "two")]
    pub min_spawn_gap: u32,
    #[serde(default)]
    pub rewards: LaneRewards,
    pub k_nearest: u32,
    #[serde(default)]
    pub start_lane: u32,
    #[serde(default)]
    pub start_velocity: u32,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn two() -> u32 {
    2
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

impl Default for LaneWorldConfig {
    fn default() -> Self {
        Self {
            lane_count: 3,
            velocity_levels: 3,
            view_length: 6,
            traffic_density: 0.15,
            min_spawn_gap: 2,
            rewards: LaneRewards::default(),
            k_nearest: 2,
            start_lane: 1,
            start_velocity: 1,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// A traffic vehicle `pos` cells ahead of the ego vehicle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vehicle {
    pub lane: u32,
    pub pos: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaneWorld {
    pub lane: u32,
    pub velocity: u32,
    pub vehicles: Vec<Vehicle>,
    pub crashed: bool,
}

/// Decoded state: what the ego driver sees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaneObservation {
    pub lane: u32,
    pub velocity: u32,
    /// Per lane, distance to the nearest vehicle at or ahead of the ego
    /// position; `view_length + 1` when the lane is clear.
    pub gaps: Vec<u32>,
}

impl LaneWorldConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |r: &str| Err(invalid("lane_world", r));
        if self.lane_count < 2 {
            return bad("lane_count must be at least 2");
        }
        if self.velocity_levels < 2 {
            return bad("velocity_levels must be at least 2");
        }
        if self.view_length < 2 {
            return bad("view_length must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.traffic_density) {
            return bad("traffic_density must lie in [0, 1]");
        }
        if self.k_nearest == 0 {
            return bad("k_nearest must be positive");
        }
        if self.start_lane >= self.lane_count || self.start_velocity >= self.velocity_levels {
            return bad("start lane/velocity out of range");
        }
        let states = u64::from(self.lane_count)
            * u64::from(self.velocity_levels)
            * u64::from(self.view_length + 2).pow(self.lane_count);
        if states > u64::from(u32::MAX) {
            return bad("state space too large to enumerate");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        Ok(())
    }

    fn gap_base(&self) -> u32 {
        self.view_length + 2
    }

    pub fn clear_gap(&self) -> u32 {
        self.view_length + 1
    }

    pub fn observe(&self, w: &LaneWorld) -> LaneObservation {
        let gaps = (0..self.lane_count)
            .map(|lane| {
                w.vehicles
                    .iter()
                    .filter(|v| v.lane == lane)
                    .map(|v| v.pos)
                    .min()
                    .unwrap_or(self.clear_gap())
                    .min(self.clear_gap())
            })
            .collect();
        LaneObservation {
            lane: w.lane,
            velocity: w.velocity,
            gaps,
        }
    }

    pub fn encode(&self, o: &LaneObservation) -> StateId {
        let base = self.gap_base();
        let traffic = o.gaps.iter().rev().fold(0u32, |acc, &g| acc * base + g);
        let ego = o.lane * self.velocity_levels + o.velocity;
        StateId(ego * base.pow(self.lane_count) + traffic)
    }

    pub fn decode(&self, state: StateId) -> LaneObservation {
        let base = self.gap_base();
        let span = base.pow(self.lane_count);
        let ego = state.0 / span;
        let mut traffic = state.0 % span;
        let gaps = (0..self.lane_count)
            .map(|_| {
                let g = traffic % base;
                traffic /= base;
                g
            })
            .collect();
        LaneObservation {
            lane: ego / self.velocity_levels,
            velocity: ego % self.velocity_levels,
            gaps,
        }
    }

    /// Per-step reward of a collision-free step ending in `o`.
    pub fn shaped_reward(&self, o: &LaneObservation) -> f64 {
        let r = &self.rewards;
        let norm = f64::from(self.clear_gap());
        let velocity = f64::from(o.velocity) / f64::from(self.velocity_levels - 1);
        let front = f64::from(o.gaps[o.lane as usize]) / norm;
        let mut dists: Vec<u32> = o
            .gaps
            .iter()
            .enumerate()
            .map(|(lane, &g)| (g + lane.abs_diff(o.lane as usize) as u32).min(self.clear_gap()))
            .collect();
        dists.sort_unstable();
        let k = (self.k_nearest as usize).min(dists.len());
        let nearest = dists[..k].iter().map(|&d| f64::from(d)).sum::<f64>() / (k as f64 * norm);
        let right = if o.lane == self.lane_count - 1 { 1.0 } else { 0.0 };
        r.velocity_coeff * velocity
            + r.front_gap_coeff * front
            + r.k_nearest_gap_coeff * nearest
            + r.right_lane_coeff * right
    }

    fn spawn(&self, vehicles: &mut Vec<Vehicle>, rng: &mut SimRng, pos: u32) {
        for lane in 0..self.lane_count {
            let draw: f64 = rng.random();
            let blocked = vehicles
                .iter()
                .any(|v| v.lane == lane && pos.abs_diff(v.pos) < self.min_spawn_gap);
            if draw < self.traffic_density && !blocked {
                vehicles.push(Vehicle { lane, pos });
            }
        }
    }

    pub fn render_grid(&self, state: StateId) -> GridView {
        let o = self.decode(state);
        let width = self.view_length as usize + 2;
        let mut g = GridView::filled(width, self.lane_count as usize, Tile::Lane);
        for (lane, &gap) in o.gaps.iter().enumerate() {
            if gap <= self.view_length {
                g.set(gap as usize + 1, lane, Tile::Vehicle);
            }
        }
        g.agent = (1, o.lane as usize);
        g
    }
}

impl Environment for LaneWorldConfig {
    type World = LaneWorld;

    fn name(&self) -> &'static str {
        "lane_world"
    }

    fn config_id(&self) -> String {
        format!(
            "lane_world:{}x{}x{}",
            self.lane_count, self.velocity_levels, self.view_length
        )
    }

    fn action_count(&self) -> usize {
        LANE_ACTIONS.len()
    }

    fn state_count(&self) -> Option<usize> {
        Some((self.lane_count * self.velocity_levels * self.gap_base().pow(self.lane_count)) as usize)
    }

    fn max_steps(&self) -> usize {
        self.max_steps
    }

    fn initial_world(&self, rng: &mut SimRng) -> LaneWorld {
        let mut vehicles = Vec::new();
        for pos in (2..=self.view_length).rev() {
            self.spawn(&mut vehicles, rng, pos);
        }
        vehicles.sort_unstable();
        LaneWorld {
            lane: self.start_lane,
            velocity: self.start_velocity,
            vehicles,
            crashed: false,
        }
    }

    fn transition(&self, w: &LaneWorld, action: ActionId, rng: &mut SimRng) -> Transition<LaneWorld> {
        let mut next = w.clone();
        match LANE_ACTIONS[action.index()] {
            LaneAction::Left => next.lane = next.lane.saturating_sub(1),
            LaneAction::Right => next.lane = (next.lane + 1).min(self.lane_count - 1),
            LaneAction::Faster => next.velocity = (next.velocity + 1).min(self.velocity_levels - 1),
            LaneAction::Slower => next.velocity = next.velocity.saturating_sub(1),
            LaneAction::Idle => {}
        }
        let closing = next.velocity;
        next.crashed = next
            .vehicles
            .iter()
            .any(|v| v.lane == next.lane && v.pos <= closing);
        next.vehicles = next
            .vehicles
            .iter()
            .filter(|v| v.pos >= closing)
            .map(|v| Vehicle {
                lane: v.lane,
                pos: v.pos - closing,
            })
            .collect();
        self.spawn(&mut next.vehicles, rng, self.view_length);
        next.vehicles.sort_unstable();
        let reward = if next.crashed {
            self.rewards.collision
        } else {
            self.shaped_reward(&self.observe(&next))
        };
        let terminal = next.crashed;
        Transition {
            world: next,
            reward,
            terminal,
        }
    }

    fn state_id(&self, w: &LaneWorld) -> StateId {
        self.encode(&self.observe(w))
    }
}
