//! Computational experiments on agents and their summaries.
//!
//! Every report carries the raw per-episode or per-summary data its
//! statistics are computed from, and can be written as JSON or CSV.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{train, AgentError};
use crate::disagreements::{compare_agents, Agent, ComparisonParams, DisagreementError};
use crate::env::EnvConfig;
use crate::mdp::{Environment, SimError, StateId};
use crate::presets::{preset, PresetError};
use crate::rollout::run_greedy_episodes;
use crate::seed::derive_seed;
use crate::summary::Summary;

/// Episodes per score, matching the ten-execution protocol.
pub const DEFAULT_EVAL_EPISODES: usize = 10;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid evaluation request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Disagreement(#[from] DisagreementError),
    #[error(transparent)]
    Preset(#[from] PresetError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

fn csv_string<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub agent_id: String,
    pub episodes: usize,
    pub mean_return: f64,
    /// Sample standard deviation of `returns`.
    pub std_return: f64,
    pub returns: Vec<f64>,
}

impl ScoreReport {
    pub fn from_returns(agent_id: impl Into<String>, returns: Vec<f64>) -> Self {
        let (mean_return, std_return) = mean_std(&returns);
        Self {
            agent_id: agent_id.into(),
            episodes: returns.len(),
            mean_return,
            std_return,
            returns,
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.episodes == 0 {
            return 0.0;
        }
        self.std_return / (self.episodes as f64).sqrt()
    }

    pub fn to_json(&self) -> String {
        json_string(self)
    }

    /// One `agent_id,episode,return` row per episode.
    pub fn to_csv(&self) -> Result<String, EvalError> {
        csv_string(
            self.returns
                .iter()
                .enumerate()
                .map(|(i, r)| (&self.agent_id, i, r)),
        )
        .map(|body| format!("agent_id,episode,return\n{body}"))
    }
}

/// Greedy returns of `agent` over `episodes` seeded episodes.
pub fn score_agent(agent: &Agent, env: &EnvConfig, episodes: usize, seed: u64) -> Result<ScoreReport, EvalError> {
    if episodes == 0 {
        return Err(EvalError::Invalid("episodes must be at least 1".into()));
    }
    agent.table.ensure_compatible(env)?;
    let eps = run_greedy_episodes(&agent.table, env, episodes, seed)?;
    Ok(ScoreReport::from_returns(
        agent.id.clone(),
        eps.iter().map(|e| e.total_return()).collect(),
    ))
}

/// Fraction of trajectories two summaries share, with trajectories
/// matched by identical state sequences. Two empty summaries agree fully.
pub fn summary_overlap(a: &Summary, b: &Summary) -> f64 {
    let key = |p: &crate::summary::TrajectoryPair| (p.leader_states(), p.disagreer_states());
    let denom = a.pairs.len().max(b.pairs.len());
    if denom == 0 {
        return 1.0;
    }
    let mut pool: Vec<_> = b.pairs.iter().map(key).collect();
    let mut shared = 0;
    for p in &a.pairs {
        let k = key(p);
        if let Some(i) = pool.iter().position(|q| *q == k) {
            pool.swap_remove(i);
            shared += 1;
        }
    }
    shared as f64 / denom as f64
}

/// Fraction of selected disagreement states the two summaries share,
/// counted as a multiset intersection over the larger summary.
pub fn shared_state_fraction(a: &[StateId], b: &[StateId]) -> f64 {
    let denom = a.len().max(b.len());
    if denom == 0 {
        return 1.0;
    }
    let mut counts: BTreeMap<StateId, usize> = BTreeMap::new();
    for s in b {
        *counts.entry(*s).or_default() += 1;
    }
    let shared = a
        .iter()
        .filter(|s| match counts.get_mut(s) {
            Some(c) if *c > 0 => {
                *c -= 1;
                true
            }
            _ => false,
        })
        .count();
    shared as f64 / denom as f64
}

fn pivots(s: &Summary) -> Vec<StateId> {
    s.pairs.iter().map(|p| p.disagreement_state).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityEntry {
    pub h: usize,
    pub l: usize,
    /// Selected disagreement states with agent A leading.
    pub a_leads_states: Vec<StateId>,
    pub b_leads_states: Vec<StateId>,
    pub a_leads_shared: f64,
    pub b_leads_shared: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub base_h: usize,
    pub base_l: usize,
    pub entries: Vec<SensitivityEntry>,
}

#[derive(Serialize)]
struct SensitivityRow {
    h: usize,
    l: usize,
    a_leads_shared: f64,
    b_leads_shared: f64,
    a_leads_selected: usize,
    b_leads_selected: usize,
}

impl SensitivityReport {
    pub fn to_json(&self) -> String {
        json_string(self)
    }

    pub fn to_csv(&self) -> Result<String, EvalError> {
        csv_string(self.entries.iter().map(|e| SensitivityRow {
            h: e.h,
            l: e.l,
            a_leads_shared: e.a_leads_shared,
            b_leads_shared: e.b_leads_shared,
            a_leads_selected: e.a_leads_states.len(),
            b_leads_selected: e.b_leads_states.len(),
        }))
    }
}

/// Trajectory length paired with horizon `h`, scaled from the base ratio.
pub fn scaled_l(base: &ComparisonParams, h: usize) -> usize {
    ((base.l * h) as f64 / base.h as f64).round() as usize
}

/// Compare the agents at every `h` in `h_list` (with `l` scaled in
/// proportion) and report how many selected disagreement states each run
/// shares with the run at `base.h`.
pub fn h_sensitivity(
    agent_a: &Agent,
    agent_b: &Agent,
    env: &EnvConfig,
    base: &ComparisonParams,
    h_list: &[usize],
) -> Result<SensitivityReport, EvalError> {
    base.validate()?;
    let run = |h: usize| -> Result<(Vec<StateId>, Vec<StateId>, usize), EvalError> {
        let l = if h == base.h { base.l } else { scaled_l(base, h) };
        let params = ComparisonParams { h, l, ..base.clone() };
        params.validate()?;
        let (a, b) = compare_agents(agent_a, agent_b, env, &params)?;
        Ok((pivots(&a), pivots(&b), l))
    };
    let (ref_a, ref_b, _) = run(base.h)?;
    let results: Vec<_> = h_list.par_iter().map(|&h| run(h).map(|r| (h, r))).collect::<Result<_, _>>()?;
    let entries = results
        .into_iter()
        .map(|(h, (a, b, l))| SensitivityEntry {
            h,
            l,
            a_leads_shared: shared_state_fraction(&a, &ref_a),
            b_leads_shared: shared_state_fraction(&b, &ref_b),
            a_leads_states: a,
            b_leads_states: b,
        })
        .collect();
    Ok(SensitivityReport {
        base_h: base.h,
        base_l: base.l,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyEntry {
    pub preset: String,
    pub training_episodes: u32,
    pub score: ScoreReport,
}

/// One ordered pair of adjacent presets in the ranking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyComparison {
    pub higher: String,
    pub lower: String,
    pub mean_difference: f64,
    /// `sqrt(se_higher^2 + se_lower^2)`.
    pub pooled_std_error: f64,
    /// Whether the difference exceeds one pooled standard error.
    pub separated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyReport {
    pub entries: Vec<HierarchyEntry>,
    /// Preset names by descending mean return; ties keep input order.
    pub ordering: Vec<String>,
    pub comparisons: Vec<HierarchyComparison>,
}

/// Difference of means and its pooled standard error.
pub fn compare_scores(higher: &ScoreReport, lower: &ScoreReport) -> (f64, f64) {
    let diff = higher.mean_return - lower.mean_return;
    let se = (higher.std_error().powi(2) + lower.std_error().powi(2)).sqrt();
    (diff, se)
}

impl HierarchyReport {
    /// Rank entries by mean return and compare neighbours.
    pub fn from_entries(entries: Vec<HierarchyEntry>) -> Self {
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&i, &j| entries[j].score.mean_return.total_cmp(&entries[i].score.mean_return));
        let comparisons = order
            .windows(2)
            .map(|w| {
                let (hi, lo) = (&entries[w[0]], &entries[w[1]]);
                let (mean_difference, pooled_std_error) = compare_scores(&hi.score, &lo.score);
                HierarchyComparison {
                    higher: hi.preset.clone(),
                    lower: lo.preset.clone(),
                    mean_difference,
                    pooled_std_error,
                    separated: mean_difference > pooled_std_error,
                }
            })
            .collect();
        Self {
            ordering: order.iter().map(|&i| entries[i].preset.clone()).collect(),
            comparisons,
            entries,
        }
    }

    pub fn entry(&self, preset: &str) -> Option<&HierarchyEntry> {
        self.entries.iter().find(|e| e.preset == preset)
    }

    pub fn to_json(&self) -> String {
        json_string(self)
    }

    /// One `preset,episode,return` row per evaluation episode.
    pub fn to_csv(&self) -> Result<String, EvalError> {
        let rows = self.entries.iter().flat_map(|e| {
            e.score
                .returns
                .iter()
                .enumerate()
                .map(move |(i, r)| (&e.preset, i, r))
        });
        csv_string(rows).map(|body| format!("preset,episode,return\n{body}"))
    }
}

/// Train every preset with `seed` and score it greedily on `env` (each
/// preset's own environment when `None`) over the same evaluation seeds.
pub fn skill_hierarchy_check(
    presets: &[&str],
    env: Option<&EnvConfig>,
    eval_episodes: usize,
    seed: u64,
) -> Result<HierarchyReport, EvalError> {
    if presets.is_empty() {
        return Err(EvalError::Invalid("at least one preset is required".into()));
    }
    let resolved = presets
        .iter()
        .map(|name| preset(name, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let eval_seed = derive_seed(seed, 1);
    let entries = resolved
        .par_iter()
        .map(|p| {
            let table = train(&p.env, &p.train)?;
            let score_env = env.cloned().unwrap_or_else(|| {
                EnvConfig::by_name(p.env.name()).expect("preset environments are registered")
            });
            let agent = Agent::new(p.name.clone(), table);
            let score = score_agent(&agent, &score_env, eval_episodes, eval_seed)?;
            Ok(HierarchyEntry {
                preset: p.name.clone(),
                training_episodes: p.train.episodes,
                score,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(HierarchyReport::from_entries(entries))
}
