//! State and trajectory importance scores.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{ActionValues, QTable};
use crate::mdp::StateId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImportanceError {
    #[error("state importance needs at least two actions")]
    SingleAction,
    #[error("trajectories must be non-empty")]
    Empty,
    #[error("trajectory lengths differ ({leader} vs {disagreer})")]
    LengthMismatch { leader: usize, disagreer: usize },
    #[error("states and values differ in length")]
    Malformed,
    #[error("unknown importance method '{0}'")]
    UnknownMethod(String),
}

/// How a pair of diverging trajectories is scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMethod {
    #[default]
    LastState,
    Sum,
    Average,
    MaxMin,
    MaxAvg,
    SumDelta,
}

impl ImportanceMethod {
    pub const ALL: [ImportanceMethod; 6] = [
        Self::LastState,
        Self::Sum,
        Self::Average,
        Self::MaxMin,
        Self::MaxAvg,
        Self::SumDelta,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::LastState => "last_state",
            Self::Sum => "sum",
            Self::Average => "average",
            Self::MaxMin => "max_min",
            Self::MaxAvg => "max_avg",
            Self::SumDelta => "sum_delta",
        }
    }
}

impl fmt::Display for ImportanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ImportanceMethod {
    type Err = ImportanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| ImportanceError::UnknownMethod(s.to_string()))
    }
}

/// Gap between the best and second-best action value in `state`.
pub fn highlights_importance(q: &QTable, state: StateId) -> Result<f64, ImportanceError> {
    if q.action_count() < 2 {
        return Err(ImportanceError::SingleAction);
    }
    let Some(row) = q.row(state) else {
        return Ok(0.0);
    };
    let (mut best, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &v in row {
        if v > best {
            second = best;
            best = v;
        } else if v > second {
            second = v;
        }
    }
    Ok(best - second)
}

/// Two-agent state value: the sum of both normalized valuations.
pub fn combined_value(leader_value: f64, disagreer_value: f64) -> f64 {
    leader_value + disagreer_value
}

/// A state sequence with its combined two-agent values.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuedTrajectory {
    pub states: Vec<StateId>,
    pub values: Vec<f64>,
}

impl ValuedTrajectory {
    pub fn new(states: Vec<StateId>, values: Vec<f64>) -> Result<Self, ImportanceError> {
        if states.len() != values.len() {
            return Err(ImportanceError::Malformed);
        }
        Ok(Self { states, values })
    }

    /// Value `states` with `value_of`.
    pub fn from_states(states: Vec<StateId>, value_of: impl Fn(StateId) -> f64) -> Self {
        let values = states.iter().map(|&s| value_of(s)).collect();
        Self { states, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Aggregate trajectory value under `method`. `last_state` uses the final
/// state's value directly.
pub fn trajectory_value(method: ImportanceMethod, values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let sum = || values.iter().sum::<f64>();
    let max = || values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match method {
        ImportanceMethod::LastState => values[values.len() - 1],
        ImportanceMethod::Sum => sum(),
        ImportanceMethod::Average => sum() / n,
        ImportanceMethod::MaxMin => max() - values.iter().copied().fold(f64::INFINITY, f64::min),
        ImportanceMethod::MaxAvg => max() - sum() / n,
        ImportanceMethod::SumDelta => values.windows(2).map(|w| w[0] - w[1]).sum(),
    }
}

/// Importance of a disagreement from the two agents' continuations.
pub fn trajectory_importance(
    method: ImportanceMethod,
    leader: &ValuedTrajectory,
    disagreer: &ValuedTrajectory,
) -> Result<f64, ImportanceError> {
    if leader.is_empty() || disagreer.is_empty() {
        return Err(ImportanceError::Empty);
    }
    if leader.len() != disagreer.len() {
        return Err(ImportanceError::LengthMismatch {
            leader: leader.len(),
            disagreer: disagreer.len(),
        });
    }
    if leader.states.len() != leader.values.len() || disagreer.states.len() != disagreer.values.len() {
        return Err(ImportanceError::Malformed);
    }
    let l = trajectory_value(method, &leader.values);
    let d = trajectory_value(method, &disagreer.values);
    Ok((l - d).abs())
}
