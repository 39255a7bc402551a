//! Disagreement-based comparison of two agents.
//!
//! The Leader drives the simulator while the Disagreer is asked at every
//! state what it would do. Where the two greedy actions differ, the
//! simulation is snapshotted. Each agent then runs alone for up to `h` steps
//! from its own restored copy, and the Leader resumes on the untouched
//! original handle. The resulting trajectory pairs are scored, and the most
//! important mutually diverse ones form the summary. [`compare_agents`] does
//! this twice, once with each agent leading.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{normalize, AgentError, NormalizedQTable, QTable};
use crate::env::EnvConfig;
use crate::importance::{
    combined_value, trajectory_importance, ImportanceError, ImportanceMethod, ValuedTrajectory,
};
use crate::mdp::{ActionId, Environment, SimError, Simulation, StateId};
use crate::rollout::episode_seed;
use crate::selection::{select_top, SelectionRules};
use crate::seed::derive_seed;
use crate::summary::{tool_version, Provenance, Summary, SummaryParams, TrajectoryPair};

#[derive(Debug, Error)]
pub enum DisagreementError {
    #[error("invalid comparison parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Importance(#[from] ImportanceError),
}

/// Parameters of a comparison run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonParams {
    /// Summary budget: maximum number of trajectories.
    pub k: usize,
    /// Length of each trajectory in states.
    pub l: usize,
    /// States followed after the disagreement state.
    pub h: usize,
    pub num_sim: usize,
    /// Maximum number of states two selected trajectories may share.
    pub overlap_lim: usize,
    pub imp_meth: ImportanceMethod,
    pub seed: u64,
}

impl ComparisonParams {
    /// Grid-world defaults: k=5, l=10, h=5, 10 episodes, overlap 3.
    pub fn river_defaults() -> Self {
        Self {
            k: 5,
            l: 10,
            h: 5,
            num_sim: 10,
            overlap_lim: 3,
            imp_meth: ImportanceMethod::LastState,
            seed: 0,
        }
    }

    /// Highway defaults: k=5, l=20, h=10, 10 episodes, overlap 5.
    pub fn highway_defaults() -> Self {
        Self {
            l: 20,
            h: 10,
            overlap_lim: 5,
            ..Self::river_defaults()
        }
    }

    pub fn defaults_for(env: &EnvConfig) -> Self {
        match env {
            EnvConfig::LaneWorld(_) => Self::highway_defaults(),
            EnvConfig::RiverCross(_) | EnvConfig::Chain(_) => Self::river_defaults(),
        }
    }

    pub fn validate(&self) -> Result<(), DisagreementError> {
        let bad = |m: String| Err(DisagreementError::InvalidParams(m));
        if self.k < 1 {
            return bad("k must be at least 1".into());
        }
        if self.h < 1 {
            return bad("h must be at least 1".into());
        }
        if self.l < self.h + 1 {
            return bad(format!("l ({}) must be at least h + 1 ({})", self.l, self.h + 1));
        }
        if self.num_sim < 1 {
            return bad("num_sim must be at least 1".into());
        }
        Ok(())
    }

    /// Prefix states shown before the disagreement state.
    pub fn prefix_len(&self) -> usize {
        self.l - self.h - 1
    }
}

/// One disagreement and both agents' futures from it.
#[derive(Clone, Debug, PartialEq)]
pub struct DisagreementRecord {
    pub episode: usize,
    /// Position of the disagreement state in the Leader's trace.
    pub leader_trace_index: usize,
    pub disagreement_state: StateId,
    pub leader_action: ActionId,
    pub disagreer_action: ActionId,
    /// States reached by the Disagreer acting alone, first post-disagreement
    /// state first.
    pub disagreer_branch: Vec<StateId>,
    /// States the Leader reaches over the same window.
    pub leader_continuation: Vec<StateId>,
}

/// Output of the parallel execution phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Exploration {
    /// Every state the Leader visited, one trace per episode.
    pub leader_traces: Vec<Vec<StateId>>,
    /// Disagreements in (episode, trace position) order.
    pub records: Vec<DisagreementRecord>,
}

/// An agent with a display identifier.
#[derive(Clone, Debug, PartialEq)]
pub struct Agent {
    pub id: String,
    pub table: QTable,
    /// File the table was loaded from, if any.
    pub source: Option<String>,
}

impl Agent {
    pub fn new(id: impl Into<String>, table: QTable) -> Self {
        Self {
            id: id.into(),
            table,
            source: None,
        }
    }
}

fn follow(
    sim: &mut Simulation<EnvConfig>,
    agent: &QTable,
    env: &EnvConfig,
    steps: usize,
) -> Result<Vec<StateId>, SimError> {
    let mut states = Vec::with_capacity(steps);
    while states.len() < steps && !sim.is_terminal() {
        let out = sim.step(agent.act(env, sim.state()))?;
        states.push(out.next_state);
    }
    Ok(states)
}

fn explore_episode(
    leader: &QTable,
    disagreer: &QTable,
    env: &Arc<EnvConfig>,
    h: usize,
    episode: usize,
    seed: u64,
) -> Result<(Vec<StateId>, Vec<DisagreementRecord>), SimError> {
    let mut sim = Simulation::new(env.clone(), seed);
    let mut trace = vec![sim.state()];
    let mut records = Vec::new();
    while !sim.is_terminal() {
        let state = sim.state();
        let leader_action = leader.act(env, state);
        let disagreer_action = disagreer.act(env, state);
        if leader_action != disagreer_action {
            let snap = sim.snapshot();
            let mut branch = snap.restore()?;
            let disagreer_branch = follow(&mut branch, disagreer, env, h)?;
            let mut ahead = snap.restore()?;
            let leader_continuation = follow(&mut ahead, leader, env, h)?;
            records.push(DisagreementRecord {
                episode,
                leader_trace_index: trace.len() - 1,
                disagreement_state: state,
                leader_action,
                disagreer_action,
                disagreer_branch,
                leader_continuation,
            });
        }
        let out = sim.step(leader_action)?;
        trace.push(out.next_state);
    }
    Ok((trace, records))
}

fn check_agents(leader: &QTable, disagreer: &QTable, env: &EnvConfig) -> Result<(), AgentError> {
    leader.ensure_compatible(env)?;
    disagreer.ensure_compatible(env)
}

/// Run `params.num_sim` episodes led by `leader`, recording every state
/// where `disagreer` would act differently.
pub fn find_disagreements(
    leader: &QTable,
    disagreer: &QTable,
    env: &EnvConfig,
    params: &ComparisonParams,
) -> Result<Exploration, DisagreementError> {
    params.validate()?;
    check_agents(leader, disagreer, env)?;
    let env = Arc::new(env.clone());
    let episodes = (0..params.num_sim)
        .into_par_iter()
        .map(|e| explore_episode(leader, disagreer, &env, params.h, e, episode_seed(params.seed, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Exploration {
        leader_traces: Vec::with_capacity(episodes.len()),
        records: Vec::new(),
    };
    for (trace, records) in episodes {
        out.leader_traces.push(trace);
        out.records.extend(records);
    }
    Ok(out)
}

/// What pair construction needs besides the exploration itself.
pub struct PairContext<'a> {
    pub env: &'a EnvConfig,
    pub leader: &'a NormalizedQTable,
    pub disagreer: &'a NormalizedQTable,
    pub leader_id: &'a str,
    pub disagreer_id: &'a str,
    pub method: ImportanceMethod,
}

impl PairContext<'_> {
    /// Combined two-agent value of a full state.
    pub fn value(&self, state: StateId) -> f64 {
        let vl = self
            .leader
            .state_value(self.env.perceive(state, self.leader.perception()));
        let vd = self
            .disagreer
            .state_value(self.env.perceive(state, self.disagreer.perception()));
        combined_value(vl, vd)
    }
}

/// Turn each record into a scored trajectory pair.
pub fn build_trajectory_pairs(
    exploration: &Exploration,
    l: usize,
    h: usize,
    ctx: &PairContext<'_>,
) -> Result<Vec<TrajectoryPair>, DisagreementError> {
    if h < 1 || l < h + 1 {
        return Err(DisagreementError::InvalidParams(format!(
            "need h >= 1 and l >= h + 1 (l={l}, h={h})"
        )));
    }
    let prefix_len = l - h - 1;
    exploration
        .records
        .iter()
        .map(|r| {
            let trace = exploration.leader_traces.get(r.episode).ok_or_else(|| {
                DisagreementError::InvalidParams(format!("record refers to missing episode {}", r.episode))
            })?;
            let at = r.leader_trace_index;
            if trace.get(at) != Some(&r.disagreement_state) {
                return Err(DisagreementError::InvalidParams(format!(
                    "record position {at} does not match episode {} trace",
                    r.episode
                )));
            }
            let n = r
                .leader_continuation
                .len()
                .min(r.disagreer_branch.len())
                .min(h);
            let leader_cont = r.leader_continuation[..n].to_vec();
            let disagreer_cont = r.disagreer_branch[..n].to_vec();
            let lt = ValuedTrajectory::from_states(leader_cont, |s| ctx.value(s));
            let dt = ValuedTrajectory::from_states(disagreer_cont, |s| ctx.value(s));
            let importance = trajectory_importance(ctx.method, &lt, &dt)?;
            Ok(TrajectoryPair {
                episode: r.episode,
                prefix: trace[at.saturating_sub(prefix_len)..at].to_vec(),
                disagreement_state: r.disagreement_state,
                leader_cont: lt.states,
                disagreer_cont: dt.states,
                importance,
                leader_id: ctx.leader_id.to_string(),
                disagreer_id: Some(ctx.disagreer_id.to_string()),
                leader_action: r.leader_action,
                disagreer_action: Some(r.disagreer_action),
            })
        })
        .collect()
}

/// Full pipeline with `leader` driving, episodes derived from `seed`.
pub fn disagreement_summary(
    leader: &Agent,
    disagreer: &Agent,
    env: &EnvConfig,
    params: &ComparisonParams,
    seed: u64,
) -> Result<Summary, DisagreementError> {
    let run = ComparisonParams {
        seed,
        ..params.clone()
    };
    let exploration = find_disagreements(&leader.table, &disagreer.table, env, &run)?;
    let pairs = if exploration.records.is_empty() {
        Vec::new()
    } else {
        let ln = normalize(&leader.table)?;
        let dn = normalize(&disagreer.table)?;
        let ctx = PairContext {
            env,
            leader: &ln,
            disagreer: &dn,
            leader_id: &leader.id,
            disagreer_id: &disagreer.id,
            method: params.imp_meth,
        };
        build_trajectory_pairs(&exploration, params.l, params.h, &ctx)?
    };
    let selected = select_top(pairs, &SelectionRules::contrastive(params.k, params.overlap_lim));
    Ok(Summary {
        pairs: selected,
        params: SummaryParams::Disagreements(params.clone()),
        provenance: Provenance {
            leader_id: leader.id.clone(),
            disagreer_id: Some(disagreer.id.clone()),
            agent_files: [&leader.source, &disagreer.source]
                .into_iter()
                .flatten()
                .cloned()
                .collect(),
            env: env.clone(),
            env_config_id: env.config_id(),
            seed,
            tool_version: tool_version(),
        },
    })
}

/// Seed stream of each role; agent A leading uses stream 0.
pub fn role_seed(seed: u64, b_leads: bool) -> u64 {
    derive_seed(seed, u64::from(b_leads))
}

/// Compare two agents with each in turn as the Leader.
pub fn compare_agents(
    agent_a: &Agent,
    agent_b: &Agent,
    env: &EnvConfig,
    params: &ComparisonParams,
) -> Result<(Summary, Summary), DisagreementError> {
    params.validate()?;
    let a_leads = disagreement_summary(agent_a, agent_b, env, params, role_seed(params.seed, false))?;
    let b_leads = disagreement_summary(agent_b, agent_a, env, params, role_seed(params.seed, true))?;
    Ok((a_leads, b_leads))
}
