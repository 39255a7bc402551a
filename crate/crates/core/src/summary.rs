//! Trajectory pairs and summaries, shared by both summarizers.

use serde::{Deserialize, Serialize};

use crate::disagreements::ComparisonParams;
use crate::env::EnvConfig;
use crate::highlights::HighlightsParams;
use crate::mdp::{ActionId, StateId};

/// A pivotal state with the shared states before it and what follows it.
///
/// For contrastive summaries both continuations are filled and have equal
/// length. HIGHLIGHTS clips leave `disagreer_cont` empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPair {
    pub episode: usize,
    pub prefix: Vec<StateId>,
    pub disagreement_state: StateId,
    pub leader_cont: Vec<StateId>,
    pub disagreer_cont: Vec<StateId>,
    pub importance: f64,
    pub leader_id: String,
    pub disagreer_id: Option<String>,
    pub leader_action: ActionId,
    pub disagreer_action: Option<ActionId>,
}

impl TrajectoryPair {
    pub fn is_contrastive(&self) -> bool {
        self.disagreer_id.is_some()
    }

    /// First state shown: the first prefix state, or the pivot if there is
    /// no prefix.
    pub fn begin(&self) -> StateId {
        self.prefix.first().copied().unwrap_or(self.disagreement_state)
    }

    /// Final state of each agent's trajectory.
    pub fn ends(&self) -> Vec<StateId> {
        let mut ends = vec![self.leader_cont.last().copied().unwrap_or(self.disagreement_state)];
        if self.is_contrastive() {
            ends.push(self.disagreer_cont.last().copied().unwrap_or(self.disagreement_state));
        }
        ends
    }

    /// Number of time steps shown: prefix, pivot and continuation.
    pub fn len(&self) -> usize {
        self.prefix.len() + 1 + self.leader_cont.len().max(self.disagreer_cont.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The Leader's trajectory as one state sequence.
    pub fn leader_states(&self) -> Vec<StateId> {
        let mut v = self.prefix.clone();
        v.push(self.disagreement_state);
        v.extend(&self.leader_cont);
        v
    }

    /// The Disagreer's trajectory (shared prefix and pivot included).
    pub fn disagreer_states(&self) -> Vec<StateId> {
        let mut v = self.prefix.clone();
        v.push(self.disagreement_state);
        v.extend(&self.disagreer_cont);
        v
    }

    /// Every state of the pair, as a multiset.
    pub fn all_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.prefix
            .iter()
            .chain(std::iter::once(&self.disagreement_state))
            .chain(&self.leader_cont)
            .chain(&self.disagreer_cont)
            .copied()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SummaryParams {
    Disagreements(ComparisonParams),
    Highlights(HighlightsParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub leader_id: String,
    pub disagreer_id: Option<String>,
    #[serde(default)]
    pub agent_files: Vec<String>,
    pub env: EnvConfig,
    pub env_config_id: String,
    /// Seed the episodes of this summary were derived from.
    pub seed: u64,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pairs: Vec<TrajectoryPair>,
    pub params: SummaryParams,
    pub provenance: Provenance,
}

impl Summary {
    pub fn is_contrastive(&self) -> bool {
        matches!(self.params, SummaryParams::Disagreements(_))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn budget(&self) -> usize {
        match &self.params {
            SummaryParams::Disagreements(p) => p.k,
            SummaryParams::Highlights(p) => p.k,
        }
    }

    pub fn overlap_lim(&self) -> usize {
        match &self.params {
            SummaryParams::Disagreements(p) => p.overlap_lim,
            SummaryParams::Highlights(p) => p.overlap_lim,
        }
    }
}

pub(crate) fn tool_version() -> String {
    format!("pcx {}", env!("CARGO_PKG_VERSION"))
}
