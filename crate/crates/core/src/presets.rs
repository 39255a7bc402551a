//! Named agent configurations.
//!
//! A preset names a base environment and a training budget, optionally
//! overriding environment fields and rewards. The built-in presets live
//! as JSON under `presets/` and are compiled in; user files with the same
//! shape can be loaded with [`Preset::from_json`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::agents::TrainConfig;
use crate::env::{EnvConfig, EnvError};

const BUILTIN: [(&str, &str); 8] = [
    ("expert", include_str!("../presets/expert.json")),
    ("mid", include_str!("../presets/mid.json")),
    ("limited_vision", include_str!("../presets/limited_vision.json")),
    ("novice", include_str!("../presets/novice.json")),
    ("fear_water", include_str!("../presets/fear_water.json")),
    ("clear_lane", include_str!("../presets/clear_lane.json")),
    ("social_distance", include_str!("../presets/social_distance.json")),
    ("fast_right", include_str!("../presets/fast_right.json")),
];

/// Names of the built-in presets.
pub fn preset_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("unknown preset '{0}'")]
    Unknown(String),
    #[error("malformed preset: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("preset override '{0}' does not name a config field")]
    UnknownOverride(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Learning hyper-parameters a preset may pin; unset fields keep the
/// [`TrainConfig`] defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningOverrides {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon_start: Option<f64>,
    pub epsilon_end: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Registered environment name.
    pub env: String,
    pub episodes: u32,
    #[serde(default)]
    pub env_overrides: Map<String, Value>,
    #[serde(default)]
    pub reward_overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub learning: LearningOverrides,
}

/// A preset resolved into concrete configs.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedPreset {
    pub name: String,
    pub env: EnvConfig,
    pub train: TrainConfig,
    pub reward_overrides: BTreeMap<String, f64>,
}

fn merge(target: &mut Map<String, Value>, overrides: impl IntoIterator<Item = (String, Value)>) -> Result<(), PresetError> {
    for (key, value) in overrides {
        match target.get_mut(&key) {
            Some(slot) => *slot = value,
            // Optional fields serialize as null and are present; anything
            // absent is a typo.
            None => return Err(PresetError::UnknownOverride(key)),
        }
    }
    Ok(())
}

impl Preset {
    pub fn builtin(name: &str) -> Result<Self, PresetError> {
        let (_, text) = BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| PresetError::Unknown(name.to_string()))?;
        Self::from_json(text)
    }

    pub fn from_json(text: &str) -> Result<Self, PresetError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Build the environment config with all overrides applied.
    pub fn env_config(&self) -> Result<EnvConfig, PresetError> {
        let base = EnvConfig::by_name(&self.env)?;
        let Value::Object(mut doc) = serde_json::to_value(&base)? else {
            unreachable!("environment configs serialize to objects");
        };
        merge(&mut doc, self.env_overrides.clone())?;
        if !self.reward_overrides.is_empty() {
            let rewards = doc
                .get_mut("rewards")
                .and_then(Value::as_object_mut)
                .ok_or_else(|| PresetError::UnknownOverride("rewards".into()))?;
            merge(
                rewards,
                self.reward_overrides
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::from(*v))),
            )?;
        }
        let env: EnvConfig = serde_json::from_value(Value::Object(doc))?;
        env.validate()?;
        Ok(env)
    }

    /// Resolve into concrete configs, seeding training with `seed`.
    pub fn resolve(&self, seed: u64) -> Result<ResolvedPreset, PresetError> {
        let d = TrainConfig::default();
        let l = &self.learning;
        Ok(ResolvedPreset {
            name: self.name.clone(),
            env: self.env_config()?,
            train: TrainConfig {
                episodes: self.episodes,
                alpha: l.alpha.unwrap_or(d.alpha),
                gamma: l.gamma.unwrap_or(d.gamma),
                epsilon_start: l.epsilon_start.unwrap_or(d.epsilon_start),
                epsilon_end: l.epsilon_end.unwrap_or(d.epsilon_end),
                seed,
            },
            reward_overrides: self.reward_overrides.clone(),
        })
    }
}

/// Resolve a built-in preset by name.
pub fn preset(name: &str, seed: u64) -> Result<ResolvedPreset, PresetError> {
    Preset::builtin(name)?.resolve(seed)
}
