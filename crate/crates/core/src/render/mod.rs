//! Summary output as JSON manifests, text storyboards or raster frames.

mod frames;
mod manifest;
mod storyboard;

use thiserror::Error;

use crate::mdp::{Environment, StateId};
use crate::summary::Summary;

pub use frames::{paint_frames, render_frames, FrameOptions, FramePlan, Image, Panel, PanelRole, PlannedFrame};
pub use manifest::{
    from_manifest, to_manifest, ManifestKind, ManifestMetadata, ManifestTrajectory,
    SummaryManifest, MANIFEST_SCHEMA_VERSION,
};
pub use storyboard::render_storyboard;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("manifest schema version {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("inconsistent manifest: {0}")]
    Manifest(String),
    #[error("state {state} is outside the {env} state space")]
    StateOutOfRange { state: StateId, env: &'static str },
    #[error("animated output requires the `gif` feature")]
    GifUnavailable,
    #[error("image too large for animated output")]
    ImageTooLarge,
    #[error("render I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[cfg(feature = "gif")]
    #[error("gif encoding: {0}")]
    Gif(#[from] gif::EncodingError),
}

/// Reject summaries whose states the environment cannot draw.
fn check_states(s: &Summary) -> Result<(), RenderError> {
    let env = &s.provenance.env;
    let Some(n) = env.state_count() else {
        return Ok(());
    };
    for p in &s.pairs {
        if let Some(state) = p.all_states().find(|st| st.index() >= n) {
            return Err(RenderError::StateOutOfRange {
                state,
                env: env.name(),
            });
        }
    }
    Ok(())
}
