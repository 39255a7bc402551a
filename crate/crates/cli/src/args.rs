use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pcx_core::ImportanceMethod;

#[derive(Debug, Parser)]
#[command(name = "pcx", version, about = "Contrastive summaries of reinforcement-learning policies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a Q-learning agent from a preset and save it.
    Train(TrainArgs),
    /// Compare two agents and write both role-ordered summaries.
    Disagreements(DisagreementsArgs),
    /// Summarize one agent by its most important states.
    Highlights(HighlightsArgs),
    /// Scoring and analysis experiments.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Render a summary manifest as a storyboard and frames.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Built-in preset name or path to a preset JSON file.
    #[arg(long, env = "PCX_PRESET")]
    pub preset: String,
    /// Agent file to write.
    #[arg(long, env = "PCX_OUT")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0, env = "PCX_SEED")]
    pub seed: u64,
    /// Override the preset's training budget.
    #[arg(long, env = "PCX_EPISODES")]
    pub episodes: Option<u32>,
}

/// Environment selection shared by commands that run agents.
#[derive(Debug, Args)]
pub struct EnvArgs {
    /// Environment config JSON; defaults to the (first) agent's training
    /// environment.
    #[arg(long, env = "PCX_ENV_CONFIG")]
    pub env_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    /// Also write storyboards and PPM frames.
    #[arg(long, env = "PCX_RENDER")]
    pub render: bool,
    #[arg(long, default_value_t = 12, env = "PCX_CELL_PX")]
    pub cell_px: usize,
    #[arg(long, default_value_t = 4, env = "PCX_FADE_FRAMES")]
    pub fade_frames: usize,
    /// Assemble an animated GIF (needs the `gif` feature).
    #[arg(long, env = "PCX_GIF")]
    pub gif: bool,
}

/// Overrides of the per-environment comparison defaults.
#[derive(Debug, Args)]
pub struct ComparisonArgs {
    #[arg(long, env = "PCX_K")]
    pub k: Option<usize>,
    #[arg(long, env = "PCX_L")]
    pub l: Option<usize>,
    #[arg(long, env = "PCX_H")]
    pub h: Option<usize>,
    #[arg(long, env = "PCX_NUM_SIM")]
    pub num_sim: Option<usize>,
    #[arg(long, env = "PCX_OVERLAP_LIM")]
    pub overlap_lim: Option<usize>,
    #[arg(long, env = "PCX_IMP_METH")]
    pub imp_meth: Option<ImportanceMethod>,
    #[arg(long, default_value_t = 0, env = "PCX_SEED")]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DisagreementsArgs {
    #[arg(long, env = "PCX_AGENT_A")]
    pub agent_a: PathBuf,
    #[arg(long, env = "PCX_AGENT_B")]
    pub agent_b: PathBuf,
    #[arg(long, env = "PCX_OUT_DIR")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub env: EnvArgs,
    #[command(flatten)]
    pub params: ComparisonArgs,
    #[command(flatten)]
    pub frames: FrameArgs,
}

#[derive(Debug, Args)]
pub struct HighlightsArgs {
    #[arg(long, env = "PCX_AGENT")]
    pub agent: PathBuf,
    #[arg(long, env = "PCX_OUT_DIR")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub env: EnvArgs,
    #[arg(long, default_value_t = 5, env = "PCX_K")]
    pub k: usize,
    #[arg(long, default_value_t = 10, env = "PCX_L")]
    pub l: usize,
    #[arg(long, default_value_t = 10, env = "PCX_NUM_SIM")]
    pub num_sim: usize,
    #[arg(long, default_value_t = 3, env = "PCX_OVERLAP_LIM")]
    pub overlap_lim: usize,
    #[arg(long, default_value_t = 0, env = "PCX_SEED")]
    pub seed: u64,
    #[command(flatten)]
    pub frames: FrameArgs,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Mean greedy return of an agent.
    Score(ScoreArgs),
    /// Stability of selected disagreements as the horizon changes.
    HSensitivity(HSensitivityArgs),
    /// Train presets and rank them by greedy return.
    Hierarchy(HierarchyArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, env = "PCX_AGENT")]
    pub agent: PathBuf,
    #[command(flatten)]
    pub env: EnvArgs,
    #[arg(long, default_value_t = 10, env = "PCX_EPISODES")]
    pub episodes: usize,
    #[arg(long, default_value_t = 0, env = "PCX_SEED")]
    pub seed: u64,
    /// Write the report files here instead of printing JSON.
    #[arg(long, env = "PCX_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HSensitivityArgs {
    #[arg(long, env = "PCX_AGENT_A")]
    pub agent_a: PathBuf,
    #[arg(long, env = "PCX_AGENT_B")]
    pub agent_b: PathBuf,
    #[command(flatten)]
    pub env: EnvArgs,
    /// Horizons to test; the first is the reference.
    #[arg(long = "h", value_delimiter = ',', default_value = "5,10", env = "PCX_H_LIST")]
    pub h_list: Vec<usize>,
    #[arg(long, env = "PCX_K")]
    pub k: Option<usize>,
    #[arg(long, env = "PCX_L")]
    pub l: Option<usize>,
    #[arg(long, env = "PCX_NUM_SIM")]
    pub num_sim: Option<usize>,
    #[arg(long, env = "PCX_OVERLAP_LIM")]
    pub overlap_lim: Option<usize>,
    #[arg(long, env = "PCX_IMP_METH")]
    pub imp_meth: Option<ImportanceMethod>,
    #[arg(long, default_value_t = 0, env = "PCX_SEED")]
    pub seed: u64,
    #[arg(long, env = "PCX_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HierarchyArgs {
    #[arg(long, value_delimiter = ',', default_value = "expert,mid,novice", env = "PCX_PRESETS")]
    pub presets: Vec<String>,
    /// Score on this environment instead of each preset's base environment.
    #[arg(long, env = "PCX_ENV_CONFIG")]
    pub env_config: Option<PathBuf>,
    #[arg(long, default_value_t = 10, env = "PCX_EPISODES")]
    pub episodes: usize,
    #[arg(long, default_value_t = 0, env = "PCX_SEED")]
    pub seed: u64,
    #[arg(long, env = "PCX_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, env = "PCX_MANIFEST")]
    pub manifest: PathBuf,
    #[arg(long, env = "PCX_OUT_DIR")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 12, env = "PCX_CELL_PX")]
    pub cell_px: usize,
    #[arg(long, default_value_t = 4, env = "PCX_FADE_FRAMES")]
    pub fade_frames: usize,
    #[arg(long, env = "PCX_GIF")]
    pub gif: bool,
}
