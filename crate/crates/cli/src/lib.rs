//! The `pcx` command line. Each run writes its resolved configuration next
//! to its outputs.

pub mod args;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use args::*;
use pcx_core::eval::{h_sensitivity, score_agent, skill_hierarchy_check};
use pcx_core::presets::{Preset, PresetError};
use pcx_core::render::{render_frames, render_storyboard, to_manifest, from_manifest, FrameOptions, SummaryManifest};
use pcx_core::{
    compare_agents, highlights_summary, train, Agent, ComparisonParams, EnvConfig,
    HighlightsParams, QTable, Summary,
};

/// Invalid input detected before any work started; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl fmt::Display) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

/// Process exit status for a failed run.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        2
    } else {
        1
    }
}

/// Resolved parameters of one run, written as `run_config.json`.
#[derive(Debug, Serialize)]
pub struct RunConfig<P: Serialize> {
    pub command: &'static str,
    pub tool_version: String,
    pub seed: u64,
    pub env: Option<EnvConfig>,
    pub inputs: Vec<String>,
    pub params: P,
}

fn tool_version() -> String {
    format!("pcx {}", env!("CARGO_PKG_VERSION"))
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn load_agent(path: &Path) -> Result<Agent> {
    let table = QTable::load(path).map_err(usage)?;
    let id = path
        .file_stem()
        .map_or_else(|| display(path), |s| s.to_string_lossy().into_owned());
    Ok(Agent {
        id,
        table,
        source: Some(display(path)),
    })
}

/// The environment named by `--env-config`, else the agent's own.
fn resolve_env(arg: &EnvArgs, agent: &Agent) -> Result<EnvConfig> {
    let env = match &arg.env_config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            EnvConfig::from_json(&text).map_err(usage)?
        }
        None => agent.table.metadata.env_config.clone(),
    };
    env.validate().map_err(usage)?;
    Ok(env)
}

fn load_preset(name: &str) -> Result<Preset> {
    let path = Path::new(name);
    if path.extension().is_some_and(|e| e == "json") {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("reading preset {name}: {e}")))?;
        return Preset::from_json(&text).map_err(usage);
    }
    Preset::builtin(name).map_err(|e| match e {
        PresetError::Unknown(_) => usage(format!(
            "{e}; built-in presets: {}",
            pcx_core::presets::preset_names().join(", ")
        )),
        other => usage(other),
    })
}

fn frame_options(cell_px: usize, fade_frames: usize, gif: bool) -> FrameOptions {
    FrameOptions {
        cell_px,
        fade_frames,
        gif,
    }
}

/// Manifest, plus storyboard and frames when `frames` is set.
fn write_summary(dir: &Path, stem: &str, s: &Summary, frames: Option<&FrameOptions>) -> Result<()> {
    write_text(&dir.join(format!("{stem}.json")), &to_manifest(s).to_json())?;
    if let Some(opts) = frames {
        write_text(&dir.join(format!("{stem}.storyboard.txt")), &render_storyboard(s)?)?;
        render_frames(s, &dir.join(format!("frames_{stem}")), opts)?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Disagreements(a) => cmd_disagreements(a),
        Command::Highlights(a) => cmd_highlights(a),
        Command::Eval(EvalCommand::Score(a)) => cmd_score(a),
        Command::Eval(EvalCommand::HSensitivity(a)) => cmd_h_sensitivity(a),
        Command::Eval(EvalCommand::Hierarchy(a)) => cmd_hierarchy(a),
        Command::Render(a) => cmd_render(a),
    }
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let preset = load_preset(&a.preset)?;
    let mut resolved = preset.resolve(a.seed).map_err(usage)?;
    if let Some(n) = a.episodes {
        resolved.train.episodes = n;
    }
    resolved.train.validate().map_err(usage)?;
    let table = train(&resolved.env, &resolved.train)?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    table.save(&a.out)?;
    #[derive(Serialize)]
    struct Params<'a> {
        preset: &'a str,
        train: &'a pcx_core::TrainConfig,
        out: String,
    }
    write_json(
        &a.out.with_extension("run_config.json"),
        &RunConfig {
            command: "train",
            tool_version: tool_version(),
            seed: a.seed,
            env: Some(resolved.env.clone()),
            inputs: vec![a.preset.clone()],
            params: Params {
                preset: &resolved.name,
                train: &resolved.train,
                out: display(&a.out),
            },
        },
    )
}

fn comparison_params(env: &EnvConfig, a: &ComparisonArgs) -> Result<ComparisonParams> {
    let d = ComparisonParams::defaults_for(env);
    let p = ComparisonParams {
        k: a.k.unwrap_or(d.k),
        l: a.l.unwrap_or(d.l),
        h: a.h.unwrap_or(d.h),
        num_sim: a.num_sim.unwrap_or(d.num_sim),
        overlap_lim: a.overlap_lim.unwrap_or(d.overlap_lim),
        imp_meth: a.imp_meth.unwrap_or(d.imp_meth),
        seed: a.seed,
    };
    p.validate().map_err(usage)?;
    Ok(p)
}

fn check_pair(a: &Agent, b: &Agent, env: &EnvConfig) -> Result<()> {
    a.table.ensure_compatible(env).map_err(usage)?;
    b.table.ensure_compatible(env).map_err(usage)?;
    Ok(())
}

fn cmd_disagreements(a: DisagreementsArgs) -> Result<()> {
    let agent_a = load_agent(&a.agent_a)?;
    let agent_b = load_agent(&a.agent_b)?;
    let env = resolve_env(&a.env, &agent_a)?;
    check_pair(&agent_a, &agent_b, &env)?;
    let params = comparison_params(&env, &a.params)?;
    let f = &a.frames;
    let frames = f.render.then(|| frame_options(f.cell_px, f.fade_frames, f.gif));
    let (a_leads, b_leads) = compare_agents(&agent_a, &agent_b, &env, &params)?;
    create_dir(&a.out_dir)?;
    write_summary(&a.out_dir, "a_leads", &a_leads, frames.as_ref())?;
    write_summary(&a.out_dir, "b_leads", &b_leads, frames.as_ref())?;
    #[derive(Serialize)]
    struct Params {
        comparison: ComparisonParams,
        frames: Option<FrameRecord>,
    }
    write_json(
        &a.out_dir.join("run_config.json"),
        &RunConfig {
            command: "disagreements",
            tool_version: tool_version(),
            seed: params.seed,
            env: Some(env),
            inputs: vec![display(&a.agent_a), display(&a.agent_b)],
            params: Params {
                comparison: params,
                frames: frames.as_ref().map(FrameRecord::from),
            },
        },
    )
}

#[derive(Serialize)]
struct FrameRecord {
    cell_px: usize,
    fade_frames: usize,
    gif: bool,
}

impl From<&FrameOptions> for FrameRecord {
    fn from(o: &FrameOptions) -> Self {
        Self {
            cell_px: o.cell_px,
            fade_frames: o.fade_frames,
            gif: o.gif,
        }
    }
}

fn cmd_highlights(a: HighlightsArgs) -> Result<()> {
    let agent = load_agent(&a.agent)?;
    let env = resolve_env(&a.env, &agent)?;
    agent.table.ensure_compatible(&env).map_err(usage)?;
    let params = HighlightsParams {
        k: a.k,
        l: a.l,
        num_sim: a.num_sim,
        overlap_lim: a.overlap_lim,
        seed: a.seed,
    };
    params.validate().map_err(usage)?;
    let f = &a.frames;
    let frames = f.render.then(|| frame_options(f.cell_px, f.fade_frames, f.gif));
    let summary = highlights_summary(&agent, &env, &params)?;
    create_dir(&a.out_dir)?;
    write_summary(&a.out_dir, "summary", &summary, frames.as_ref())?;
    #[derive(Serialize)]
    struct Params {
        highlights: HighlightsParams,
        frames: Option<FrameRecord>,
    }
    write_json(
        &a.out_dir.join("run_config.json"),
        &RunConfig {
            command: "highlights",
            tool_version: tool_version(),
            seed: params.seed,
            env: Some(env),
            inputs: vec![display(&a.agent)],
            params: Params {
                highlights: params,
                frames: frames.as_ref().map(FrameRecord::from),
            },
        },
    )
}

/// Print `json` or write it, the CSV and the run config into `out_dir`.
fn emit_report<P: Serialize>(out_dir: Option<&PathBuf>, json: String, csv: String, config: RunConfig<P>) -> Result<()> {
    match out_dir {
        None => {
            print!("{json}");
            Ok(())
        }
        Some(dir) => {
            create_dir(dir)?;
            write_text(&dir.join("report.json"), &json)?;
            write_text(&dir.join("report.csv"), &csv)?;
            write_json(&dir.join("run_config.json"), &config)
        }
    }
}

fn cmd_score(a: ScoreArgs) -> Result<()> {
    if a.episodes == 0 {
        return Err(usage("--episodes must be at least 1"));
    }
    let agent = load_agent(&a.agent)?;
    let env = resolve_env(&a.env, &agent)?;
    agent.table.ensure_compatible(&env).map_err(usage)?;
    let report = score_agent(&agent, &env, a.episodes, a.seed)?;
    #[derive(Serialize)]
    struct Params {
        episodes: usize,
    }
    emit_report(
        a.out_dir.as_ref(),
        report.to_json(),
        report.to_csv()?,
        RunConfig {
            command: "eval score",
            tool_version: tool_version(),
            seed: a.seed,
            env: Some(env),
            inputs: vec![display(&a.agent)],
            params: Params { episodes: a.episodes },
        },
    )
}

fn cmd_h_sensitivity(a: HSensitivityArgs) -> Result<()> {
    let agent_a = load_agent(&a.agent_a)?;
    let agent_b = load_agent(&a.agent_b)?;
    let env = resolve_env(&a.env, &agent_a)?;
    check_pair(&agent_a, &agent_b, &env)?;
    let Some(&base_h) = a.h_list.first() else {
        return Err(usage("--h needs at least one horizon"));
    };
    let defaults = ComparisonParams::defaults_for(&env);
    // The default l keeps its default ratio to h.
    let base_l = a.l.unwrap_or_else(|| pcx_core::eval::scaled_l(&defaults, base_h));
    let base = comparison_params(
        &env,
        &ComparisonArgs {
            k: a.k,
            l: Some(base_l),
            h: Some(base_h),
            num_sim: a.num_sim,
            overlap_lim: a.overlap_lim,
            imp_meth: a.imp_meth,
            seed: a.seed,
        },
    )?;
    for &h in &a.h_list {
        let l = pcx_core::eval::scaled_l(&base, h);
        ComparisonParams { h, l, ..base.clone() }.validate().map_err(usage)?;
    }
    let report = h_sensitivity(&agent_a, &agent_b, &env, &base, &a.h_list)?;
    #[derive(Serialize)]
    struct Params {
        base: ComparisonParams,
        h_list: Vec<usize>,
    }
    emit_report(
        a.out_dir.as_ref(),
        report.to_json(),
        report.to_csv()?,
        RunConfig {
            command: "eval h-sensitivity",
            tool_version: tool_version(),
            seed: a.seed,
            env: Some(env),
            inputs: vec![display(&a.agent_a), display(&a.agent_b)],
            params: Params { base, h_list: a.h_list.clone() },
        },
    )
}

fn cmd_hierarchy(a: HierarchyArgs) -> Result<()> {
    if a.episodes == 0 {
        return Err(usage("--episodes must be at least 1"));
    }
    for name in &a.presets {
        Preset::builtin(name).map_err(usage)?;
    }
    let env = match &a.env_config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let env = EnvConfig::from_json(&text).map_err(usage)?;
            env.validate().map_err(usage)?;
            Some(env)
        }
        None => None,
    };
    let names: Vec<&str> = a.presets.iter().map(String::as_str).collect();
    let report = skill_hierarchy_check(&names, env.as_ref(), a.episodes, a.seed)?;
    #[derive(Serialize)]
    struct Params {
        presets: Vec<String>,
        episodes: usize,
    }
    emit_report(
        a.out_dir.as_ref(),
        report.to_json(),
        report.to_csv()?,
        RunConfig {
            command: "eval hierarchy",
            tool_version: tool_version(),
            seed: a.seed,
            env,
            inputs: a.presets.clone(),
            params: Params {
                presets: a.presets.clone(),
                episodes: a.episodes,
            },
        },
    )
}

fn cmd_render(a: RenderArgs) -> Result<()> {
    let text = fs::read_to_string(&a.manifest).with_context(|| format!("reading {}", a.manifest.display()))?;
    let manifest = SummaryManifest::from_json(&text).map_err(usage)?;
    let summary = from_manifest(&manifest).map_err(usage)?;
    let opts = frame_options(a.cell_px, a.fade_frames, a.gif);
    if opts.gif && !cfg!(feature = "gif") {
        return Err(usage("--gif requires building with the `gif` feature"));
    }
    create_dir(&a.out_dir)?;
    write_text(&a.out_dir.join("storyboard.txt"), &render_storyboard(&summary)?)?;
    let frames = render_frames(&summary, &a.out_dir.join("frames"), &opts)?;
    #[derive(Serialize)]
    struct Params {
        frames: FrameRecord,
        frame_count: usize,
    }
    write_json(
        &a.out_dir.join("run_config.json"),
        &RunConfig {
            command: "render",
            tool_version: tool_version(),
            seed: summary.provenance.seed,
            env: Some(summary.provenance.env.clone()),
            inputs: vec![display(&a.manifest)],
            params: Params {
                frames: FrameRecord::from(&opts),
                frame_count: frames.len(),
            },
        },
    )
}
