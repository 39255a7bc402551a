use std::fmt::Write;

use super::{check_states, RenderError};
use crate::summary::{Summary, SummaryParams, TrajectoryPair};

const SEPARATOR: &str = "================================================================";

fn header(s: &Summary) -> String {
    let p = &s.provenance;
    let mut out = String::new();
    match &s.params {
        SummaryParams::Disagreements(c) => {
            let _ = writeln!(
                out,
                "# disagreements summary: leader={} disagreer={}",
                p.leader_id,
                p.disagreer_id.as_deref().unwrap_or("?")
            );
            let _ = writeln!(
                out,
                "# k={} l={} h={} num_sim={} overlap_lim={} imp_meth={} seed={}",
                c.k, c.l, c.h, c.num_sim, c.overlap_lim, c.imp_meth, c.seed
            );
        }
        SummaryParams::Highlights(c) => {
            let _ = writeln!(out, "# highlights summary: agent={}", p.leader_id);
            let _ = writeln!(
                out,
                "# k={} l={} num_sim={} overlap_lim={} seed={}",
                c.k, c.l, c.num_sim, c.overlap_lim, c.seed
            );
        }
    }
    let _ = writeln!(out, "# env={} trajectories={}", p.env_config_id, s.pairs.len());
    out
}

fn trajectory(s: &Summary, index: usize, t: &TrajectoryPair, out: &mut String) {
    let env = &s.provenance.env;
    let contrastive = t.is_contrastive();
    let _ = writeln!(out, "{SEPARATOR}");
    let actions = match t.disagreer_action {
        Some(d) => format!(
            "leader {} / disagreer {}",
            env.action_name(t.leader_action),
            env.action_name(d)
        ),
        None => format!("action {}", env.action_name(t.leader_action)),
    };
    let _ = writeln!(
        out,
        "trajectory {} | episode {} | importance {:.6} | {} at {}",
        index + 1,
        t.episode,
        t.importance,
        actions,
        t.disagreement_state
    );
    let total = t.len();
    let pivot = t.prefix.len();
    for step in 0..total {
        let (leader, disagreer) = if step < pivot {
            (Some(t.prefix[step]), Some(t.prefix[step]))
        } else if step == pivot {
            (Some(t.disagreement_state), Some(t.disagreement_state))
        } else {
            let j = step - pivot - 1;
            (t.leader_cont.get(j).copied(), t.disagreer_cont.get(j).copied())
        };
        let phase = match step.cmp(&pivot) {
            std::cmp::Ordering::Less => "before",
            std::cmp::Ordering::Equal => "PIVOT",
            std::cmp::Ordering::Greater => "after",
        };
        let _ = writeln!(out, "-- step {}/{} [{}]", step + 1, total, phase);
        let left = leader.map(|st| env.render_grid(st).text_rows('L'));
        if contrastive {
            let right = disagreer.map(|st| env.render_grid(st).text_rows('D'));
            let width = env.grid_size().0;
            let rows = left.as_ref().or(right.as_ref()).map_or(0, Vec::len);
            for r in 0..rows {
                let l = left.as_ref().map_or(" ".repeat(width), |v| v[r].clone());
                let d = right.as_ref().map_or(" ".repeat(width), |v| v[r].clone());
                let _ = writeln!(out, "{l}   |   {d}");
            }
        } else if let Some(rows) = left {
            for row in rows {
                let _ = writeln!(out, "{row}");
            }
        }
    }
}

/// Plain-text storyboard: a header, then one grid block per time step of
/// every trajectory. Contrastive summaries show Leader (`L`) and Disagreer
/// (`D`) side by side.
pub fn render_storyboard(s: &Summary) -> Result<String, RenderError> {
    check_states(s)?;
    let mut out = header(s);
    for (i, t) in s.pairs.iter().enumerate() {
        trajectory(s, i, t, &mut out);
    }
    Ok(out)
}
