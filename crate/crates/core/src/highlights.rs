//! HIGHLIGHTS baseline: single-agent summaries of the states where the
//! agent's preference between its best and second-best action is largest.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::AgentError;
use crate::disagreements::Agent;
use crate::env::EnvConfig;
use crate::importance::{highlights_importance, ImportanceError};
use crate::mdp::{Environment, SimError};
use crate::rollout::run_greedy_episodes;
use crate::selection::{select_top, SelectionRules};
use crate::summary::{tool_version, Provenance, Summary, SummaryParams, TrajectoryPair};

#[derive(Debug, Error)]
pub enum HighlightsError {
    #[error("invalid highlights parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Importance(#[from] ImportanceError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightsParams {
    pub k: usize,
    pub l: usize,
    pub num_sim: usize,
    pub overlap_lim: usize,
    pub seed: u64,
}

impl Default for HighlightsParams {
    fn default() -> Self {
        Self {
            k: 5,
            l: 10,
            num_sim: 10,
            overlap_lim: 3,
            seed: 0,
        }
    }
}

impl HighlightsParams {
    pub fn validate(&self) -> Result<(), HighlightsError> {
        let bad = |m: &str| Err(HighlightsError::InvalidParams(m.into()));
        if self.k < 1 {
            return bad("k must be at least 1");
        }
        if self.l < 1 {
            return bad("l must be at least 1");
        }
        if self.num_sim < 1 {
            return bad("num_sim must be at least 1");
        }
        Ok(())
    }

    /// States shown before and after the important state.
    pub fn split(&self) -> (usize, usize) {
        let before = (self.l - 1) / 2;
        (before, self.l - 1 - before)
    }
}

/// Summarize `agent` by its most important states.
pub fn highlights_summary(
    agent: &Agent,
    env: &EnvConfig,
    params: &HighlightsParams,
) -> Result<Summary, HighlightsError> {
    params.validate()?;
    agent.table.ensure_compatible(env)?;
    if env.action_count() < 2 {
        return Err(ImportanceError::SingleAction.into());
    }
    let (before, after) = params.split();
    let episodes = run_greedy_episodes(&agent.table, env, params.num_sim, params.seed)?;
    let mut candidates = Vec::new();
    for (e, ep) in episodes.iter().enumerate() {
        let last = ep.states.len() - 1;
        for (p, &state) in ep.states[..last].iter().enumerate() {
            let importance = highlights_importance(&agent.table, agent.table.perceive(env, state))?;
            candidates.push(TrajectoryPair {
                episode: e,
                prefix: ep.states[p.saturating_sub(before)..p].to_vec(),
                disagreement_state: state,
                leader_cont: ep.states[p + 1..=(p + after).min(last)].to_vec(),
                disagreer_cont: Vec::new(),
                importance,
                leader_id: agent.id.clone(),
                disagreer_id: None,
                leader_action: ep.actions[p],
                disagreer_action: None,
            });
        }
    }
    let pairs = select_top(candidates, &SelectionRules::overlap_only(params.k, params.overlap_lim));
    Ok(Summary {
        pairs,
        params: SummaryParams::Highlights(params.clone()),
        provenance: Provenance {
            leader_id: agent.id.clone(),
            disagreer_id: None,
            agent_files: agent.source.iter().cloned().collect(),
            env: env.clone(),
            env_config_id: env.config_id(),
            seed: params.seed,
            tool_version: tool_version(),
        },
    })
}
