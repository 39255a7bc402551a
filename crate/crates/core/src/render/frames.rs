use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{check_states, RenderError};
use crate::env::{EnvConfig, GridView};
use crate::mdp::StateId;
use crate::summary::{Summary, TrajectoryPair};

const LEADER_RGB: [u8; 3] = [220, 30, 30];
const DISAGREER_RGB: [u8; 3] = [15, 15, 15];
const HIGHLIGHT_RGB: [u8; 3] = [250, 210, 20];
const BACKGROUND_RGB: [u8; 3] = [255, 255, 255];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameOptions {
    /// Edge length of one grid cell in pixels.
    pub cell_px: usize,
    /// Fade-in frames inserted before every trajectory but the first.
    pub fade_frames: usize,
    /// Also write `summary.gif`.
    pub gif: bool,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self {
            cell_px: 12,
            fade_frames: 4,
            gif: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PanelRole {
    Leader,
    Disagreer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Panel {
    pub state: StateId,
    pub role: PanelRole,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlannedFrame {
    /// Fade step `step` of `of`, leading into `target`.
    Fade { target: Box<PlannedFrame>, step: usize, of: usize },
    /// One time step. Missing panels render as background.
    Step { panels: Vec<Option<Panel>>, pivot: bool },
}

/// Every frame of a summary video, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramePlan {
    pub frames: Vec<PlannedFrame>,
    pub columns: usize,
}

fn step_frames(t: &TrajectoryPair) -> Vec<PlannedFrame> {
    let pivot = t.prefix.len();
    let contrastive = t.is_contrastive();
    (0..t.len())
        .map(|i| {
            let (l, d) = if i <= pivot {
                let s = t.prefix.get(i).copied().unwrap_or(t.disagreement_state);
                (Some(s), Some(s))
            } else {
                (t.leader_cont.get(i - pivot - 1).copied(), t.disagreer_cont.get(i - pivot - 1).copied())
            };
            let mut panels = vec![l.map(|state| Panel { state, role: PanelRole::Leader })];
            if contrastive {
                panels.push(d.map(|state| Panel { state, role: PanelRole::Disagreer }));
            }
            PlannedFrame::Step { panels, pivot: i == pivot }
        })
        .collect()
}

impl FramePlan {
    pub fn new(s: &Summary, fade_frames: usize) -> Self {
        let mut frames = Vec::new();
        for (i, t) in s.pairs.iter().enumerate() {
            let steps = step_frames(t);
            if i > 0 {
                for step in 0..fade_frames {
                    frames.push(PlannedFrame::Fade {
                        target: Box::new(steps[0].clone()),
                        step,
                        of: fade_frames,
                    });
                }
            }
            frames.extend(steps);
        }
        Self {
            frames,
            columns: if s.is_contrastive() { 2 } else { 1 },
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// An 8-bit RGB raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self {
            width,
            height,
            data: rgb.repeat(width * height),
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn fill_rect(&mut self, x0: usize, y0: usize, w: usize, h: usize, rgb: [u8; 3]) {
        for y in y0..(y0 + h).min(self.height) {
            for x in x0..(x0 + w).min(self.width) {
                let i = 3 * (y * self.width + x);
                self.data[i..i + 3].copy_from_slice(&rgb);
            }
        }
    }

    /// Binary PPM (P6) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    fn scaled(&self, num: usize, den: usize) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| (v as usize * num / den) as u8).collect(),
        }
    }
}

struct Painter<'a> {
    env: &'a EnvConfig,
    cell: usize,
    border: usize,
    grid: (usize, usize),
    columns: usize,
}

impl Painter<'_> {
    fn panel_size(&self) -> (usize, usize) {
        (
            self.grid.0 * self.cell + 2 * self.border,
            self.grid.1 * self.cell + 2 * self.border,
        )
    }

    fn size(&self) -> (usize, usize) {
        let (w, h) = self.panel_size();
        (self.columns * w + (self.columns - 1) * self.cell, h)
    }

    fn draw_grid(&self, img: &mut Image, ox: usize, g: &GridView, role: PanelRole) {
        let (c, b) = (self.cell, self.border);
        for y in 0..g.height {
            for x in 0..g.width {
                img.fill_rect(ox + b + x * c, b + y * c, c, c, g.tile(x, y).rgb());
            }
        }
        let rgb = match role {
            PanelRole::Leader => LEADER_RGB,
            PanelRole::Disagreer => DISAGREER_RGB,
        };
        let inset = c / 6;
        let (ax, ay) = g.agent;
        img.fill_rect(ox + b + ax * c + inset, b + ay * c + inset, c - 2 * inset, c - 2 * inset, rgb);
    }

    fn paint(&self, frame: &PlannedFrame) -> Image {
        let (w, h) = self.size();
        match frame {
            PlannedFrame::Fade { target, step, of } => self.paint(target).scaled(step + 1, of + 1),
            PlannedFrame::Step { panels, pivot } => {
                let mut img = Image::new(w, h, BACKGROUND_RGB);
                let (pw, ph) = self.panel_size();
                for (col, panel) in panels.iter().enumerate() {
                    let ox = col * (pw + self.cell);
                    if *pivot {
                        img.fill_rect(ox, 0, pw, ph, HIGHLIGHT_RGB);
                    }
                    if let Some(p) = panel {
                        self.draw_grid(&mut img, ox, &self.env.render_grid(p.state), p.role);
                    }
                }
                img
            }
        }
    }
}

/// Rasterize every planned frame of `s`.
pub fn paint_frames(s: &Summary, opts: &FrameOptions) -> Result<Vec<Image>, RenderError> {
    check_states(s)?;
    let plan = FramePlan::new(s, opts.fade_frames);
    let painter = Painter {
        env: &s.provenance.env,
        cell: opts.cell_px.max(3),
        border: (opts.cell_px / 4).max(1),
        grid: s.provenance.env.grid_size(),
        columns: plan.columns,
    };
    Ok(plan.frames.par_iter().map(|f| painter.paint(f)).collect())
}

/// Write `frame_00000.ppm`, `frame_00001.ppm`, ... into `dir`, plus
/// `summary.gif` when requested. Returns the written paths.
pub fn render_frames(s: &Summary, dir: &Path, opts: &FrameOptions) -> Result<Vec<PathBuf>, RenderError> {
    if opts.gif && !cfg!(feature = "gif") {
        return Err(RenderError::GifUnavailable);
    }
    let images = paint_frames(s, opts)?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(images.len() + 1);
    for (i, img) in images.iter().enumerate() {
        let path = dir.join(format!("frame_{i:05}.ppm"));
        fs::write(&path, img.to_ppm())?;
        paths.push(path);
    }
    #[cfg(feature = "gif")]
    if opts.gif {
        let path = dir.join("summary.gif");
        write_gif(&images, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(feature = "gif")]
fn write_gif(images: &[Image], path: &Path) -> Result<(), RenderError> {
    let Some(first) = images.first() else {
        return Ok(());
    };
    let w = u16::try_from(first.width).map_err(|_| RenderError::ImageTooLarge)?;
    let h = u16::try_from(first.height).map_err(|_| RenderError::ImageTooLarge)?;
    let file = fs::File::create(path)?;
    let mut enc = gif::Encoder::new(file, w, h, &[])?;
    enc.set_repeat(gif::Repeat::Infinite)?;
    for img in images {
        let mut frame = gif::Frame::from_rgb(w, h, &img.data);
        frame.delay = 25;
        enc.write_frame(&frame)?;
    }
    Ok(())
}
