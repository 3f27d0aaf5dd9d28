//! Scenario execution and file output: trajectory CSV, PGM frames, verify rows.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{ScenarioConfig, Task};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, NodeId};
use crate::oracle::lattice_shortest;
use crate::planner::{path_length, Outcome, PlanResult, Planner};
use crate::wave::WaveLayer;

pub const TRAJECTORY_HEADER: &str = "t,bump_x,bump_y,delta_x,delta_y,overlap_size,exc_spikes,wavefront_hit";
pub const VERIFY_HEADER: &str = "scenario,outcome,steps,path_length,bfs_length,ratio,wavefronts";
pub const WAVE_HEADER: &str = "t,exc_spikes,inh_spikes";

const BLOCKED_GRAY: u8 = 128;

/// Overlay of one step as a binary PGM: spiking nodes are 255, the rest show
/// activity scaled to the field maximum, blocked nodes are mid-gray.
pub fn frame_bytes(m: &Manifold, spikes: &[NodeId], activity: Option<&[f64]>) -> Vec<u8> {
    let mut px = vec![0u8; m.len()];
    if let Some(a) = activity {
        let peak = a.iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            for (p, &x) in px.iter_mut().zip(a) {
                *p = (255.0 * (x / peak).clamp(0.0, 1.0)).round() as u8;
            }
        }
    }
    for s in spikes {
        px[s.0] = 255;
    }
    for (p, &b) in px.iter_mut().zip(m.blocked()) {
        if b {
            *p = BLOCKED_GRAY;
        }
    }
    let mut out = format!("P5 {} {} 255\n", m.nx(), m.ny()).into_bytes();
    out.extend_from_slice(&px);
    out
}

pub fn write_frame(path: &Path, m: &Manifold, spikes: &[NodeId], activity: Option<&[f64]>) -> Result<()> {
    fs::write(path, frame_bytes(m, spikes, activity))?;
    Ok(())
}

pub fn trajectory_csv(m: &Manifold, r: &PlanResult) -> String {
    let mut s = String::with_capacity(64 * (r.trajectory.len() + 2));
    s.push_str(TRAJECTORY_HEADER);
    s.push('\n');
    for rec in &r.trajectory {
        let (x, y) = m.coords(rec.bump_center);
        let _ = writeln!(
            s,
            "{},{},{},{:.9},{:.9},{},{},{}",
            rec.t,
            x,
            y,
            rec.delta.0,
            rec.delta.1,
            rec.overlap_size,
            rec.exc_spikes,
            u8::from(rec.wavefront_hit)
        );
    }
    let _ = writeln!(
        s,
        "# outcome={},steps={},wavefronts={},path_length={:.4}",
        r.outcome,
        r.steps(),
        r.wavefronts_used,
        path_length(m, &r.path)
    );
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub scenario: String,
    pub outcome: Outcome,
    pub steps: usize,
    pub path_length: f64,
    pub bfs_length: Option<f64>,
    pub wavefronts: usize,
}

impl VerifyRow {
    /// Planned over oracle length; only defined for reached runs.
    pub fn ratio(&self) -> Option<f64> {
        match (self.outcome, self.bfs_length) {
            (Outcome::Reached, Some(b)) if b > 0.0 => Some(self.path_length / b),
            _ => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        format!(
            "{},{},{},{:.4},{},{},{}",
            self.scenario,
            self.outcome,
            self.steps,
            self.path_length,
            opt(self.bfs_length),
            opt(self.ratio()),
            self.wavefronts
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: PlanResult,
    pub files: Vec<PathBuf>,
}

fn plan_endpoints(cfg: &ScenarioConfig) -> Result<(NodeId, NodeId)> {
    match (cfg.task, cfg.start, cfg.target) {
        (Task::Plan, Some(s), Some(t)) => Ok((s, t)),
        _ => Err(Error::param("task", "this command needs a plan task with start and target")),
    }
}

/// Run the planner, writing `trajectory.csv` and frames into the output directory if one is set.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    run_with_frames(cfg, cfg.output.frame_stride)
}

/// Like [`run_scenario`] with frames forced on (stride at least 1).
pub fn render(cfg: &ScenarioConfig) -> Result<RunOutput> {
    run_with_frames(cfg, cfg.output.frame_stride.max(1))
}

fn run_with_frames(cfg: &ScenarioConfig, stride: u32) -> Result<RunOutput> {
    if cfg.task == Task::Wave {
        return run_wave(cfg, stride);
    }
    let (start, target) = plan_endpoints(cfg)?;
    let dir = cfg.output.dir.as_deref();
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    let mut files = Vec::new();
    let mut planner = Planner::new(cfg.manifold.clone(), start, target, &cfg.setup)?;
    let mut recorded = 0;
    loop {
        let done = planner.step()?;
        let fresh = planner.trajectory().len() > recorded;
        recorded = planner.trajectory().len();
        if let (Some(d), true, true) = (dir, stride > 0, fresh) {
            let t = recorded as u64 - 1;
            if t.is_multiple_of(stride as u64) {
                let f = d.join(format!("frame_{t:05}.pgm"));
                write_frame(
                    &f,
                    planner.manifold(),
                    planner.wave().exc_spikes(),
                    Some(planner.attractor().activity()),
                )?;
                files.push(f);
            }
        }
        if done.is_some() {
            break;
        }
    }
    let result = planner.into_result();
    if let Some(d) = dir {
        let f = d.join("trajectory.csv");
        fs::write(&f, trajectory_csv(&cfg.manifold, &result))?;
        files.push(f);
    }
    Ok(RunOutput { result, files })
}

/// Spiking layer alone, driven at the configured sources for `max_steps` steps.
/// Returns the excitatory spike list of every step.
pub fn simulate_wave(cfg: &ScenarioConfig) -> Result<Vec<Vec<NodeId>>> {
    let mut wave = wave_for(cfg)?;
    let mut out = Vec::with_capacity(cfg.max_steps() as usize);
    for _ in 0..cfg.max_steps() {
        let (e, _) = wave.step()?;
        out.push(e.to_vec());
    }
    Ok(out)
}

fn wave_for(cfg: &ScenarioConfig) -> Result<WaveLayer> {
    let s = &cfg.setup;
    let mut wave = WaveLayer::new(&cfg.manifold, &s.wave, s.mode, s.seed)?;
    for &n in &cfg.sources {
        wave.set_stimulus(n, true)?;
    }
    Ok(wave)
}

fn run_wave(cfg: &ScenarioConfig, stride: u32) -> Result<RunOutput> {
    let mut wave = wave_for(cfg)?;
    let dir = cfg.output.dir.as_deref();
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    let mut files = Vec::new();
    let mut csv = String::from(WAVE_HEADER);
    csv.push('\n');
    for t in 0..cfg.max_steps() {
        let (e, i) = wave.step()?;
        let _ = writeln!(csv, "{},{},{}", t, e.len(), i.len());
        if let (Some(d), true) = (dir, stride > 0) {
            if t.is_multiple_of(stride) {
                let f = d.join(format!("frame_{t:05}.pgm"));
                write_frame(&f, &cfg.manifold, wave.exc_spikes(), None)?;
                files.push(f);
            }
        }
    }
    if let Some(d) = dir {
        let f = d.join("wave.csv");
        fs::write(&f, csv)?;
        files.push(f);
    }
    let result = PlanResult {
        outcome: Outcome::StepBudgetExhausted,
        trajectory: Vec::new(),
        path: Vec::new(),
        wavefronts_used: 0,
    };
    Ok(RunOutput { result, files })
}

/// Run the planner and compare its path against the breadth-first oracle.
pub fn verify(cfg: &ScenarioConfig) -> Result<VerifyRow> {
    let (start, target) = plan_endpoints(cfg)?;
    let out = run_scenario(cfg)?;
    let bfs = lattice_shortest(&cfg.manifold, start, target).map(|(_, len)| len);
    Ok(VerifyRow {
        scenario: cfg.name.clone(),
        outcome: out.result.outcome,
        steps: out.result.steps(),
        path_length: path_length(&cfg.manifold, &out.result.path),
        bfs_length: bfs,
        wavefronts: out.result.wavefronts_used,
    })
}

/// Verify once per seed in parallel. Each seed writes under `<dir>/seed_<n>`.
pub fn sweep(cfg: &ScenarioConfig, seeds: std::ops::RangeInclusive<u64>) -> Vec<(u64, Result<VerifyRow>)> {
    let seeds: Vec<u64> = seeds.collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let mut c = cfg.clone();
            c.setup.seed = seed;
            c.name = format!("{}_seed{}", cfg.name, seed);
            if let Some(d) = &cfg.output.dir {
                c.output.dir = Some(d.join(format!("seed_{seed}")));
            }
            (seed, verify(&c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Rect;

    #[test]
    fn frame_header_and_colors() {
        let m = Manifold::new(41, 41, &[Rect::new(0, 0, 0, 0)]).unwrap();
        let f = frame_bytes(&m, &[m.node(5, 5).unwrap()], Some(&vec![0.0; m.len()]));
        let header = b"P5 41 41 255\n";
        assert_eq!(&f[..header.len()], header);
        let px = &f[header.len()..];
        assert_eq!(px.len(), 1681);
        assert_eq!(px[0], 128);
        assert_eq!(px[5 * 41 + 5], 255);
        assert_eq!(px.iter().filter(|&&p| p == 0).count(), 1679);
    }

    #[test]
    fn activity_is_scaled_to_peak() {
        let m = Manifold::open(3, 3).unwrap();
        let mut a = vec![0.0; 9];
        a[4] = 2.0;
        a[3] = 1.0;
        let f = frame_bytes(&m, &[], Some(&a));
        let px = &f[f.len() - 9..];
        assert_eq!((px[4], px[3], px[0]), (255, 128, 0));
    }

    #[test]
    fn verify_row_blank_ratio_when_not_reached() {
        let r = VerifyRow {
            scenario: "sealed".into(),
            outcome: Outcome::StepBudgetExhausted,
            steps: 10,
            path_length: 0.0,
            bfs_length: None,
            wavefronts: 0,
        };
        assert_eq!(r.to_csv(), "sealed,step_budget_exhausted,10,0.0000,,,0");
    }
}
