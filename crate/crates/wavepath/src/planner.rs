//! Couples the two layers: spike fronts that touch the bump pull it toward
//! their origin until it sits on the stimulated target.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::attractor::{Attractor, AttractorParams};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, NodeId};
use crate::wave::{Mode, WaveLayer, WaveParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingParams {
    /// Steps after a hit during which overlap detection is disabled.
    pub recovery: u32,
    /// Steps the direction vector stays applied after a hit.
    pub hold: u32,
    /// Bump-to-target distance that counts as arrival.
    pub arrival_radius: f64,
    pub max_steps: u32,
    /// Fraction of peak activity defining the bump's active set; 0 means `A > 0`.
    pub active_threshold: f64,
}

impl Default for CouplingParams {
    fn default() -> Self {
        CouplingParams {
            recovery: 12,
            hold: 1,
            arrival_radius: 2.0,
            max_steps: 1000,
            active_threshold: 0.0,
        }
    }
}

impl CouplingParams {
    pub fn validate(&self) -> Result<()> {
        if self.recovery < 1 {
            return Err(Error::param("recovery", "must be at least 1"));
        }
        if self.hold > self.recovery {
            return Err(Error::param("hold", "must not exceed recovery"));
        }
        if !self.arrival_radius.is_finite() || self.arrival_radius < 1.0 {
            return Err(Error::param("arrival_radius", "must be a finite value >= 1"));
        }
        if !(0.0..1.0).contains(&self.active_threshold) {
            return Err(Error::param("active_threshold", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Everything needed to build the two layers besides geometry.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlannerSetup {
    pub wave: WaveParams,
    pub attractor: AttractorParams,
    pub coupling: CouplingParams,
    pub mode: Mode,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub bump_center: NodeId,
    pub delta: (f64, f64),
    pub overlap_size: usize,
    pub exc_spikes: usize,
    pub wavefront_hit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    StepBudgetExhausted,
    BumpLost,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Reached => "reached",
            Outcome::StepBudgetExhausted => "step_budget_exhausted",
            Outcome::BumpLost => "bump_lost",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub outcome: Outcome,
    pub trajectory: Vec<StepRecord>,
    /// Distinct consecutive bump centers, starting with the warmed-up one.
    pub path: Vec<NodeId>,
    pub wavefronts_used: usize,
}

impl PlanResult {
    pub fn steps(&self) -> usize {
        self.trajectory.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub mean: (f64, f64),
    pub size: usize,
}

/// Mean lattice position of `active ∩ spikes`; both slices ascending.
pub fn detect_overlap(m: &Manifold, active: &[NodeId], spikes: &[NodeId]) -> Option<Overlap> {
    let (mut i, mut j) = (0, 0);
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    while i < active.len() && j < spikes.len() {
        match active[i].cmp(&spikes[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let (x, y) = m.coords(active[i]);
                sx += x as f64;
                sy += y as f64;
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (n > 0).then(|| Overlap {
        mean: (sx / n as f64, sy / n as f64),
        size: n,
    })
}

/// Offset from the bump center to the overlap mean, in normalized units.
pub fn direction_vector(mean: (f64, f64), center: (usize, usize), nx: usize, ny: usize) -> (f64, f64) {
    (
        (mean.0 - center.0 as f64) / nx as f64,
        (mean.1 - center.1 as f64) / ny as f64,
    )
}

pub fn path_length(m: &Manifold, path: &[NodeId]) -> f64 {
    path.windows(2).fold(0.0, |acc, w| acc + m.distance(w[0], w[1]))
}

#[derive(Debug, Clone)]
pub struct Planner {
    manifold: Manifold,
    target: NodeId,
    coupling: CouplingParams,
    wave: WaveLayer,
    attractor: Attractor,
    recovery_left: u32,
    hold_left: u32,
    pending: (f64, f64),
    t: u64,
    trajectory: Vec<StepRecord>,
    path: Vec<NodeId>,
    wavefronts_used: usize,
    outcome: Option<Outcome>,
}

impl Planner {
    /// Warm up the bump at `start` and switch on the stimulus at `target`.
    pub fn new(m: Manifold, start: NodeId, target: NodeId, setup: &PlannerSetup) -> Result<Self> {
        setup.coupling.validate()?;
        for n in [start, target] {
            if m.is_blocked(n) {
                let (x, y) = m.coords(n);
                return Err(Error::BlockedNode { x, y });
            }
        }
        let attractor = Attractor::init_bump(&m, start, &setup.attractor, setup.seed)?;
        let mut wave = WaveLayer::new(&m, &setup.wave, setup.mode, setup.seed)?;
        wave.set_stimulus(target, true)?;
        let center = attractor.center();
        let outcome =
            (m.distance(center, target) <= setup.coupling.arrival_radius).then_some(Outcome::Reached);
        Ok(Planner {
            manifold: m,
            target,
            coupling: setup.coupling,
            wave,
            attractor,
            recovery_left: 0,
            hold_left: 0,
            pending: (0.0, 0.0),
            t: 0,
            trajectory: Vec::new(),
            path: vec![center],
            wavefronts_used: 0,
            outcome,
        })
    }

    /// Advance both layers by one step. Returns the outcome once the run is over.
    pub fn step(&mut self) -> Result<Option<Outcome>> {
        if self.outcome.is_some() {
            return Ok(self.outcome);
        }
        if self.t >= self.coupling.max_steps as u64 {
            self.outcome = Some(Outcome::StepBudgetExhausted);
            return Ok(self.outcome);
        }
        let m = &self.manifold;
        let (spikes, _) = self.wave.step()?;
        let exc_spikes = spikes.len();
        let active = self.attractor.above(self.coupling.active_threshold);
        let overlap = detect_overlap(m, &active, spikes);
        let overlap_size = overlap.map_or(0, |o| o.size);

        let mut hit = false;
        if self.recovery_left == 0 {
            if let Some(o) = overlap {
                let center = m.coords(self.attractor.center());
                self.pending = direction_vector(o.mean, center, m.nx(), m.ny());
                self.recovery_left = self.coupling.recovery;
                self.hold_left = self.coupling.hold;
                self.wavefronts_used += 1;
                hit = true;
            }
        }
        let applied = if self.hold_left > 0 {
            self.hold_left -= 1;
            self.pending
        } else {
            (0.0, 0.0)
        };
        self.recovery_left = self.recovery_left.saturating_sub(1);

        self.attractor.set_delta(applied);
        match self.attractor.step() {
            Ok(()) => {}
            Err(Error::BumpLost) => {
                self.outcome = Some(Outcome::BumpLost);
                return Ok(self.outcome);
            }
            Err(e) => return Err(e),
        }
        let center = self.attractor.center();
        if self.path.last() != Some(&center) {
            self.path.push(center);
        }
        self.trajectory.push(StepRecord {
            t: self.t,
            bump_center: center,
            delta: applied,
            overlap_size,
            exc_spikes,
            wavefront_hit: hit,
        });
        self.t += 1;
        if self.manifold.distance(center, self.target) <= self.coupling.arrival_radius {
            self.outcome = Some(Outcome::Reached);
        } else if self.t >= self.coupling.max_steps as u64 {
            self.outcome = Some(Outcome::StepBudgetExhausted);
        }
        Ok(self.outcome)
    }

    pub fn run(mut self) -> Result<PlanResult> {
        while self.step()?.is_none() {}
        Ok(self.into_result())
    }

    pub fn into_result(self) -> PlanResult {
        PlanResult {
            outcome: self.outcome.unwrap_or(Outcome::StepBudgetExhausted),
            trajectory: self.trajectory,
            path: self.path,
            wavefronts_used: self.wavefronts_used,
        }
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn wave(&self) -> &WaveLayer {
        &self.wave
    }

    pub fn attractor(&self) -> &Attractor {
        &self.attractor
    }

    pub fn trajectory(&self) -> &[StepRecord] {
        &self.trajectory
    }

    pub fn path(&self) -> &[NodeId] {
        &self.path
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn wavefronts_used(&self) -> usize {
        self.wavefronts_used
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }
}

pub fn run_planner(m: &Manifold, start: NodeId, target: NodeId, setup: &PlannerSetup) -> Result<PlanResult> {
    Planner::new(m.clone(), start, target, setup)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(m: &Manifold, pts: &[(i64, i64)]) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = pts.iter().map(|&(x, y)| m.node(x, y).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn overlap_examples() {
        let m = Manifold::open(20, 20).unwrap();
        let c = ids(&m, &[(10, 10), (11, 10)]);
        let p = ids(&m, &[(11, 10), (12, 10)]);
        assert_eq!(detect_overlap(&m, &c, &p).unwrap().mean, (11.0, 10.0));
        let q = ids(&m, &[(1, 1)]);
        assert!(detect_overlap(&m, &c, &q).is_none());
        let both = ids(&m, &[(3, 4), (5, 4)]);
        let o = detect_overlap(&m, &both, &both).unwrap();
        assert_eq!((o.mean, o.size), ((4.0, 4.0), 2));
    }

    #[test]
    fn direction_examples() {
        assert_eq!(direction_vector((11.0, 10.0), (14, 10), 41, 41), (-3.0 / 41.0, 0.0));
        assert_eq!(direction_vector((14.0, 10.0), (14, 10), 41, 41), (0.0, 0.0));
        assert_eq!(
            direction_vector((10.0, 10.5), (12, 10), 41, 41),
            (-2.0 / 41.0, 0.5 / 41.0)
        );
    }

    #[test]
    fn path_length_examples() {
        let m = Manifold::open(10, 10).unwrap();
        let single = path_length(&m, &ids(&m, &[(2, 2)]));
        assert!(single == 0.0 && single.is_sign_positive());
        let east: Vec<NodeId> = (0..5).map(|x| m.node(x, 3).unwrap()).collect();
        assert_eq!(path_length(&m, &east), 4.0);
    }

    #[test]
    fn start_near_target_is_reached_immediately() {
        let m = Manifold::open(41, 41).unwrap();
        let r = run_planner(
            &m,
            m.node(20, 20).unwrap(),
            m.node(21, 20).unwrap(),
            &PlannerSetup::default(),
        )
        .unwrap();
        assert_eq!(r.outcome, Outcome::Reached);
        assert!(r.trajectory.is_empty());
    }

    #[test]
    fn coupling_validation() {
        let c = CouplingParams {
            hold: 20,
            ..CouplingParams::default()
        };
        assert!(c.validate().is_err());
        let c = CouplingParams {
            arrival_radius: 0.5,
            ..CouplingParams::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn outcome_names() {
        assert_eq!(Outcome::StepBudgetExhausted.to_string(), "step_budget_exhausted");
        assert_eq!(Outcome::Reached.to_string(), "reached");
    }
}
