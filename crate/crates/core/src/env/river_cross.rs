//! Frogger-like river crossing.
//!
//! Row 0 is the lily-pad row, the bottom row is the start. Cars and logs move
//! on fixed periodic schedules, so the whole traffic picture is a function of
//! a single global phase and a state is `(frog cell, phase)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, EnvError, GridView, Tile};
use crate::mdp::{
    ActionId, Environment, Perception, SimRng, StateId, Transition, DEFAULT_MAX_STEPS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RiverAction {
    Up,
    Down,
    Left,
    Right,
}

impl RiverAction {
    pub fn name(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
            Self::Left => "left",
            Self::Right => "right",
        }
    }

    pub fn id(self) -> ActionId {
        ActionId(self as u32)
    }
}

const RIVER_ACTIONS: [RiverAction; 4] = [
    RiverAction::Up,
    RiverAction::Down,
    RiverAction::Left,
    RiverAction::Right,
];

/// Frog actions, in action-index order.
pub fn river_cross_actions() -> &'static [RiverAction] {
    &RIVER_ACTIONS
}

/// Objects of `length` cells repeating every `spacing` cells, shifting by
/// `speed` cells per step (negative = leftwards).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanePattern {
    pub speed: i32,
    pub spacing: u32,
    #[serde(default = "one")]
    pub length: u32,
}

fn one() -> u32 {
    1
}

impl LanePattern {
    fn period(&self) -> u32 {
        let s = self.speed.unsigned_abs();
        if s == 0 {
            1
        } else {
            self.spacing / gcd(self.spacing, s)
        }
    }

    fn occupied(&self, x: i64, phase: u32) -> bool {
        let offset = (x - i64::from(self.speed) * i64::from(phase)).rem_euclid(i64::from(self.spacing));
        offset < i64::from(self.length)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiverRewards {
    pub goal: f64,
    pub death_road: f64,
    pub death_river: f64,
    pub step: f64,
}

impl Default for RiverRewards {
    fn default() -> Self {
        Self {
            goal: 100.0,
            death_road: -100.0,
            death_river: -100.0,
            step: -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiverCrossConfig {
    pub grid_width: u32,
    pub grid_height: u32,
    pub road_rows: Vec<u32>,
    pub car_pattern: Vec<LanePattern>,
    pub river_rows: Vec<u32>,
    pub log_pattern: Vec<LanePattern>,
    #[serde(default)]
    pub rewards: RiverRewards,
    /// Chebyshev radius within which cars are perceived; `None` = unlimited.
    #[serde(default)]
    pub vision_radius: Option<u32>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

impl Default for RiverCrossConfig {
    fn default() -> Self {
        let car = |speed, spacing, length| LanePattern {
            speed,
            spacing,
            length,
        };
        Self {
            grid_width: 8,
            grid_height: 8,
            road_rows: vec![4, 5, 6],
            car_pattern: vec![car(1, 4, 1), car(-1, 3, 1), car(1, 4, 2)],
            river_rows: vec![1, 2],
            log_pattern: vec![car(-1, 4, 2), car(1, 4, 2)],
            rewards: RiverRewards::default(),
            vision_radius: None,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrogStatus {
    Alive,
    Home,
    RunOver,
    Drowned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RiverWorld {
    pub x: u32,
    pub y: u32,
    pub phase: u32,
    pub status: FrogStatus,
}

enum RowKind<'a> {
    Safe,
    Road(&'a LanePattern),
    River(&'a LanePattern),
}

impl RiverCrossConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |r: String| Err(invalid("river_cross", r));
        if self.grid_width < 2 || self.grid_height < 3 {
            return bad("grid must be at least 2 wide and 3 tall".into());
        }
        if self.road_rows.len() != self.car_pattern.len() {
            return bad("road_rows and car_pattern lengths differ".into());
        }
        if self.river_rows.len() != self.log_pattern.len() {
            return bad("river_rows and log_pattern lengths differ".into());
        }
        let mut seen = vec![false; self.grid_height as usize];
        for &row in self.road_rows.iter().chain(&self.river_rows) {
            if row == 0 || row >= self.grid_height - 1 {
                return bad(format!("hazard row {row} must lie strictly between goal and start rows"));
            }
            if std::mem::replace(&mut seen[row as usize], true) {
                return bad(format!("row {row} listed twice (road and river rows must be disjoint)"));
            }
        }
        for p in self.car_pattern.iter().chain(&self.log_pattern) {
            if p.spacing == 0 || p.length == 0 {
                return bad("pattern spacing and length must be positive".into());
            }
        }
        if self.car_pattern.iter().any(|p| p.length >= p.spacing) {
            return bad("car rows must leave gaps (length < spacing)".into());
        }
        if self.log_pattern.iter().any(|p| p.length > p.spacing) {
            return bad("log length cannot exceed spacing".into());
        }
        if self.vision_radius == Some(0) {
            return bad("vision_radius must be at least 1".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }

    /// Number of steps after which the traffic picture repeats.
    pub fn period(&self) -> u32 {
        self.car_pattern
            .iter()
            .chain(&self.log_pattern)
            .map(LanePattern::period)
            .fold(1, |acc, p| acc / gcd(acc, p) * p)
    }

    pub fn start_cell(&self) -> (u32, u32) {
        (self.grid_width / 2, self.grid_height - 1)
    }

    fn row_kind(&self, y: u32) -> RowKind<'_> {
        if let Some(i) = self.road_rows.iter().position(|&r| r == y) {
            RowKind::Road(&self.car_pattern[i])
        } else if let Some(i) = self.river_rows.iter().position(|&r| r == y) {
            RowKind::River(&self.log_pattern[i])
        } else {
            RowKind::Safe
        }
    }

    pub fn car_at(&self, x: u32, y: u32, phase: u32) -> bool {
        matches!(self.row_kind(y), RowKind::Road(p) if p.occupied(i64::from(x), phase))
    }

    pub fn log_at(&self, x: u32, y: u32, phase: u32) -> bool {
        matches!(self.row_kind(y), RowKind::River(p) if p.occupied(i64::from(x), phase))
    }

    pub fn encode(&self, x: u32, y: u32, phase: u32) -> StateId {
        StateId((y * self.grid_width + x) * self.period() + phase)
    }

    /// Inverse of [`encode`](Self::encode): `(x, y, phase)`.
    pub fn decode(&self, state: StateId) -> (u32, u32, u32) {
        let p = self.period();
        let cell = state.0 / p;
        (cell % self.grid_width, cell / self.grid_width, state.0 % p)
    }

    /// Whether an agent with the given vision radius sees the same traffic
    /// around `(x, y)` at phases `a` and `b`. Logs are always visible.
    fn same_view(&self, x: u32, y: u32, a: u32, b: u32, radius: u32) -> bool {
        let w = self.grid_width;
        for (i, &row) in self.road_rows.iter().enumerate() {
            if row.abs_diff(y) > radius {
                continue;
            }
            let pat = &self.car_pattern[i];
            let lo = x.saturating_sub(radius);
            let hi = (x + radius).min(w - 1);
            for cx in lo..=hi {
                if pat.occupied(i64::from(cx), a) != pat.occupied(i64::from(cx), b) {
                    return false;
                }
            }
        }
        self.log_pattern.iter().all(|pat| {
            (0..w).all(|cx| pat.occupied(i64::from(cx), a) == pat.occupied(i64::from(cx), b))
        })
    }

    pub fn render_grid(&self, state: StateId) -> GridView {
        let (fx, fy, phase) = self.decode(state);
        let (w, h) = (self.grid_width as usize, self.grid_height as usize);
        let mut g = GridView::filled(w, h, Tile::Grass);
        for y in 0..self.grid_height {
            for x in 0..self.grid_width {
                let tile = match self.row_kind(y) {
                    _ if y == 0 => Tile::Goal,
                    RowKind::Safe => Tile::Grass,
                    RowKind::Road(_) if self.car_at(x, y, phase) => Tile::Car,
                    RowKind::Road(_) => Tile::Road,
                    RowKind::River(_) if self.log_at(x, y, phase) => Tile::Log,
                    RowKind::River(_) => Tile::Water,
                };
                g.set(x as usize, y as usize, tile);
            }
        }
        g.agent = (fx.min(self.grid_width - 1) as usize, fy as usize);
        g
    }
}

impl Environment for RiverCrossConfig {
    type World = RiverWorld;

    fn name(&self) -> &'static str {
        "river_cross"
    }

    fn config_id(&self) -> String {
        format!("river_cross:{}x{}:p{}", self.grid_width, self.grid_height, self.period())
    }

    fn action_count(&self) -> usize {
        RIVER_ACTIONS.len()
    }

    fn state_count(&self) -> Option<usize> {
        Some((self.grid_width * self.grid_height * self.period()) as usize)
    }

    fn max_steps(&self) -> usize {
        self.max_steps
    }

    fn initial_world(&self, rng: &mut SimRng) -> RiverWorld {
        let (x, y) = self.start_cell();
        RiverWorld {
            x,
            y,
            phase: rng.random_range(0..self.period()),
            status: FrogStatus::Alive,
        }
    }

    fn transition(&self, w: &RiverWorld, action: ActionId, _rng: &mut SimRng) -> Transition<RiverWorld> {
        let max_x = i64::from(self.grid_width) - 1;
        let max_y = i64::from(self.grid_height) - 1;
        let (mut x, mut y) = (i64::from(w.x), i64::from(w.y));
        match RIVER_ACTIONS[action.index()] {
            RiverAction::Up => y -= 1,
            RiverAction::Down => y += 1,
            RiverAction::Left => x -= 1,
            RiverAction::Right => x += 1,
        }
        x = x.clamp(0, max_x);
        y = y.clamp(0, max_y);
        let phase = (w.phase + 1) % self.period();
        let r = &self.rewards;
        let (status, reward) = if y == 0 {
            (FrogStatus::Home, r.step + r.goal)
        } else {
            match self.row_kind(y as u32) {
                RowKind::Safe => (FrogStatus::Alive, r.step),
                RowKind::Road(p) => {
                    if p.occupied(x, phase) {
                        (FrogStatus::RunOver, r.step + r.death_road)
                    } else {
                        (FrogStatus::Alive, r.step)
                    }
                }
                RowKind::River(p) => {
                    // The frog rides whatever is under it.
                    x += i64::from(p.speed);
                    if !(0..=max_x).contains(&x) {
                        x = x.clamp(0, max_x);
                        (FrogStatus::Drowned, r.step + r.death_river)
                    } else if p.occupied(x, phase) {
                        (FrogStatus::Alive, r.step)
                    } else {
                        (FrogStatus::Drowned, r.step + r.death_river)
                    }
                }
            }
        };
        Transition {
            world: RiverWorld {
                x: x as u32,
                y: y as u32,
                phase,
                status,
            },
            reward,
            terminal: status != FrogStatus::Alive,
        }
    }

    fn state_id(&self, w: &RiverWorld) -> StateId {
        self.encode(w.x, w.y, w.phase)
    }

    /// Limited vision maps a state onto the lowest phase that looks the same
    /// from the frog's cell.
    fn perceive(&self, state: StateId, perception: &Perception) -> StateId {
        let Perception::VisionRadius(radius) = *perception else {
            return state;
        };
        let (x, y, phase) = self.decode(state);
        let canonical = (0..phase)
            .find(|&p| self.same_view(x, y, p, phase, radius))
            .unwrap_or(phase);
        self.encode(x, y, canonical)
    }

    fn perception(&self) -> Perception {
        self.vision_radius
            .map_or(Perception::Full, Perception::VisionRadius)
    }
}
