use serde::{Deserialize, Serialize};

use super::RenderError;
use crate::env::EnvConfig;
use crate::mdp::{ActionId, StateId};
use crate::summary::{Provenance, Summary, SummaryParams, TrajectoryPair};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifestKind {
    Disagreements,
    Highlights,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestMetadata {
    pub leader_id: String,
    pub disagreer_id: Option<String>,
    pub agent_files: Vec<String>,
    pub env: EnvConfig,
    pub env_config_id: String,
    pub params: SummaryParams,
    pub seed: u64,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestTrajectory {
    pub index: usize,
    pub episode: usize,
    pub importance: f64,
    pub prefix: Vec<StateId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disagreement_state: Option<StateId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub important_state: Option<StateId>,
    pub leader_cont: Vec<StateId>,
    pub disagreer_cont: Vec<StateId>,
    pub leader_action: ActionId,
    pub disagreer_action: Option<ActionId>,
    /// A fade separates this trajectory from the previous one.
    pub fade_before: bool,
}

/// On-disk form of a [`Summary`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryManifest {
    pub schema_version: u32,
    pub kind: ManifestKind,
    pub metadata: ManifestMetadata,
    pub trajectories: Vec<ManifestTrajectory>,
}

impl SummaryManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, RenderError> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn to_manifest(s: &Summary) -> SummaryManifest {
    let contrastive = s.is_contrastive();
    let p = &s.provenance;
    SummaryManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        kind: if contrastive {
            ManifestKind::Disagreements
        } else {
            ManifestKind::Highlights
        },
        metadata: ManifestMetadata {
            leader_id: p.leader_id.clone(),
            disagreer_id: p.disagreer_id.clone(),
            agent_files: p.agent_files.clone(),
            env: p.env.clone(),
            env_config_id: p.env_config_id.clone(),
            params: s.params.clone(),
            seed: p.seed,
            tool_version: p.tool_version.clone(),
        },
        trajectories: s
            .pairs
            .iter()
            .enumerate()
            .map(|(index, t)| ManifestTrajectory {
                index,
                episode: t.episode,
                importance: t.importance,
                prefix: t.prefix.clone(),
                disagreement_state: contrastive.then_some(t.disagreement_state),
                important_state: (!contrastive).then_some(t.disagreement_state),
                leader_cont: t.leader_cont.clone(),
                disagreer_cont: t.disagreer_cont.clone(),
                leader_action: t.leader_action,
                disagreer_action: t.disagreer_action,
                fade_before: index > 0,
            })
            .collect(),
    }
}

pub fn from_manifest(m: &SummaryManifest) -> Result<Summary, RenderError> {
    if m.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(RenderError::SchemaVersion {
            found: m.schema_version,
            expected: MANIFEST_SCHEMA_VERSION,
        });
    }
    let bad = |msg: String| Err(RenderError::Manifest(msg));
    let meta = &m.metadata;
    let contrastive = match (&m.kind, &meta.params) {
        (ManifestKind::Disagreements, SummaryParams::Disagreements(_)) => true,
        (ManifestKind::Highlights, SummaryParams::Highlights(_)) => false,
        _ => return bad("kind does not match params".into()),
    };
    if contrastive != meta.disagreer_id.is_some() {
        return bad("disagreer_id must be present exactly for contrastive summaries".into());
    }
    let mut pairs = Vec::with_capacity(m.trajectories.len());
    for (i, t) in m.trajectories.iter().enumerate() {
        if t.index != i {
            return bad(format!("trajectory {i} has index {}", t.index));
        }
        let pivot = match (contrastive, t.disagreement_state, t.important_state) {
            (true, Some(s), None) | (false, None, Some(s)) => s,
            _ => return bad(format!("trajectory {i} must name exactly one pivot state of the right kind")),
        };
        if contrastive != t.disagreer_action.is_some() {
            return bad(format!("trajectory {i} disagreer action does not match summary kind"));
        }
        pairs.push(TrajectoryPair {
            episode: t.episode,
            prefix: t.prefix.clone(),
            disagreement_state: pivot,
            leader_cont: t.leader_cont.clone(),
            disagreer_cont: t.disagreer_cont.clone(),
            importance: t.importance,
            leader_id: meta.leader_id.clone(),
            disagreer_id: meta.disagreer_id.clone(),
            leader_action: t.leader_action,
            disagreer_action: t.disagreer_action,
        });
    }
    Ok(Summary {
        pairs,
        params: meta.params.clone(),
        provenance: Provenance {
            leader_id: meta.leader_id.clone(),
            disagreer_id: meta.disagreer_id.clone(),
            agent_files: meta.agent_files.clone(),
            env: meta.env.clone(),
            env_config_id: meta.env_config_id.clone(),
            seed: meta.seed,
            tool_version: meta.tool_version.clone(),
        },
    })
}
