//! Rate-coded sheet holding a self-sustained activity bump that can be
//! nudged by a direction vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{Manifold, NodeId};

/// Half-max radius of the Gaussian used to seed the bump, in lattice units.
pub const SEED_RADIUS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AttractorParams {
    /// Gaussian width in normalized coordinates.
    pub sigma: f64,
    /// Constant subtracted from every weight.
    pub shift: f64,
    /// Peak weight.
    pub strength: f64,
    /// Weight of the normalizing term in the update.
    pub tau: f64,
    /// Relaxation steps with zero drive before planning starts.
    pub warmup: u32,
    /// Relative amplitude of seeded multiplicative weight noise, 0 disables.
    pub jitter: f64,
}

impl Default for AttractorParams {
    fn default() -> Self {
        AttractorParams {
            sigma: 0.03,
            shift: 0.05,
            strength: 12.0,
            tau: 0.8,
            warmup: 50,
            jitter: 0.0,
        }
    }
}

impl AttractorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("sigma", self.sigma),
            ("shift", self.shift),
            ("strength", self.strength),
            ("tau", self.tau),
            ("jitter", self.jitter),
        ] {
            if !x.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if self.sigma <= 0.0 {
            return Err(Error::param("sigma", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::param("tau", "must lie in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(Error::param("jitter", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// `J * exp(-|(i - j) / N + delta|^2 / sigma^2) - T` for lattice positions `i`, `j`.
pub fn attractor_weight(
    i: (usize, usize),
    j: (usize, usize),
    delta: (f64, f64),
    p: &AttractorParams,
    nx: usize,
    ny: usize,
) -> f64 {
    let ax = (i.0 as f64 - j.0 as f64) / nx as f64 + delta.0;
    let ay = (i.1 as f64 - j.1 as f64) / ny as f64 + delta.1;
    p.strength * (-(ax * ax + ay * ay) / (p.sigma * p.sigma)).exp() - p.shift
}

fn gaussian_factor(n: usize, shift: f64, sigma: f64, noise: Option<&[f64]>, out: &mut Vec<f64>) {
    out.clear();
    let s2 = sigma * sigma;
    for i in 0..n {
        for j in 0..n {
            let a = (i as f64 - j as f64) / n as f64 + shift;
            let mut g = (-(a * a) / s2).exp();
            if let Some(noise) = noise {
                g *= noise[i * n + j];
            }
            out.push(g);
        }
    }
}

#[derive(Debug, Clone)]
pub struct Attractor {
    nx: usize,
    ny: usize,
    blocked: Vec<bool>,
    params: AttractorParams,
    a: Vec<f64>,
    delta: (f64, f64),
    noise_x: Option<Vec<f64>>,
    noise_y: Option<Vec<f64>>,
    gx: Vec<f64>,
    gy: Vec<f64>,
    cached_delta: Option<(f64, f64)>,
    tmp: Vec<f64>,
    next: Vec<f64>,
}

impl Attractor {
    /// Gaussian seed at `start`, normalized to unit total activity, no relaxation.
    pub fn seeded(m: &Manifold, start: NodeId, params: &AttractorParams, seed: u64) -> Result<Self> {
        params.validate()?;
        if m.is_blocked(start) {
            let (x, y) = m.coords(start);
            return Err(Error::BlockedNode { x, y });
        }
        let (nx, ny) = (m.nx(), m.ny());
        let (sx, sy) = m.coords(start);
        let sd = SEED_RADIUS / (2.0 * std::f64::consts::LN_2).sqrt();
        let mut a: Vec<f64> = (0..m.len())
            .map(|k| {
                if m.blocked()[k] {
                    return 0.0;
                }
                let dx = (k % nx) as f64 - sx as f64;
                let dy = (k / nx) as f64 - sy as f64;
                (-(dx * dx + dy * dy) / (2.0 * sd * sd)).exp()
            })
            .collect();
        let total: f64 = a.iter().sum();
        a.iter_mut().for_each(|x| *x /= total);

        let (noise_x, noise_y) = if params.jitter > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(2);
            let eps = params.jitter;
            let mut draw = |n: usize| -> Vec<f64> {
                (0..n * n).map(|_| 1.0 + eps * rng.random_range(-1.0..=1.0)).collect()
            };
            (Some(draw(nx)), Some(draw(ny)))
        } else {
            (None, None)
        };

        Ok(Attractor {
            nx,
            ny,
            blocked: m.blocked().to_vec(),
            params: *params,
            a,
            delta: (0.0, 0.0),
            noise_x,
            noise_y,
            gx: Vec::new(),
            gy: Vec::new(),
            cached_delta: None,
            tmp: vec![0.0; nx * ny],
            next: vec![0.0; nx * ny],
        })
    }

    /// Seed at `start` and relax for `params.warmup` steps with zero drive.
    pub fn init_bump(m: &Manifold, start: NodeId, params: &AttractorParams, seed: u64) -> Result<Self> {
        let mut s = Self::seeded(m, start, params, seed)?;
        for _ in 0..params.warmup {
            s.step()?;
        }
        let components = s.footprint_components();
        if components != 1 {
            return Err(Error::BumpFragmented { components });
        }
        Ok(s)
    }

    pub fn params(&self) -> &AttractorParams {
        &self.params
    }

    pub fn activity(&self) -> &[f64] {
        &self.a
    }

    pub fn delta(&self) -> (f64, f64) {
        self.delta
    }

    pub fn set_delta(&mut self, delta: (f64, f64)) {
        self.delta = delta;
    }

    /// Replace the activity field, e.g. to test the update on a crafted state.
    pub fn set_activity(&mut self, a: Vec<f64>) {
        assert_eq!(a.len(), self.a.len(), "activity length");
        self.a = a;
    }

    fn refresh_kernel(&mut self) {
        if self.cached_delta == Some(self.delta) {
            return;
        }
        let p = self.params;
        gaussian_factor(self.nx, self.delta.0, p.sigma, self.noise_x.as_deref(), &mut self.gx);
        gaussian_factor(self.ny, self.delta.1, p.sigma, self.noise_y.as_deref(), &mut self.gy);
        self.cached_delta = Some(self.delta);
    }

    /// One update with the current direction vector. The all-pairs sum is
    /// evaluated exactly by splitting the Gaussian into its x and y factors.
    /// The result is rescaled to unit total activity; the update is
    /// positively homogeneous so only the amplitude is affected.
    pub fn step(&mut self) -> Result<()> {
        let total: f64 = self.a.iter().sum();
        if total.is_nan() || total <= 0.0 || total.is_infinite() {
            return Err(Error::BumpLost);
        }
        self.refresh_kernel();
        let (nx, ny) = (self.nx, self.ny);
        let p = self.params;

        // tmp[iy][jx] = sum_ix a[iy][ix] * gx[ix][jx]
        self.tmp.fill(0.0);
        for iy in 0..ny {
            let row = &self.a[iy * nx..(iy + 1) * nx];
            let out = &mut self.tmp[iy * nx..(iy + 1) * nx];
            for (ix, &ai) in row.iter().enumerate() {
                if ai == 0.0 {
                    continue;
                }
                let g = &self.gx[ix * nx..(ix + 1) * nx];
                for (o, &gv) in out.iter_mut().zip(g) {
                    *o += ai * gv;
                }
            }
        }
        // b[jy][jx] = J * sum_iy gy[iy][jy] * tmp[iy][jx] - T * total
        self.next.fill(0.0);
        for iy in 0..ny {
            let src = &self.tmp[iy * nx..(iy + 1) * nx];
            if src.iter().all(|&x| x == 0.0) {
                continue;
            }
            for jy in 0..ny {
                let g = self.gy[iy * ny + jy];
                if g == 0.0 {
                    continue;
                }
                let out = &mut self.next[jy * nx..(jy + 1) * nx];
                for (o, &s) in out.iter_mut().zip(src) {
                    *o += g * s;
                }
            }
        }
        let scale = (1.0 - p.tau) + p.tau / total;
        let mut new_total = 0.0;
        for (k, b) in self.next.iter_mut().enumerate() {
            let val = (p.strength * *b - p.shift * total) * scale;
            *b = if self.blocked[k] || val < 0.0 { 0.0 } else { val };
            new_total += *b;
        }
        if new_total.is_nan() || new_total <= 0.0 || new_total.is_infinite() {
            return Err(Error::BumpLost);
        }
        for b in self.next.iter_mut() {
            *b /= new_total;
        }
        std::mem::swap(&mut self.a, &mut self.next);
        Ok(())
    }

    /// Node with maximal activity, lowest index on ties.
    pub fn center(&self) -> NodeId {
        let mut best = 0;
        for (k, &x) in self.a.iter().enumerate() {
            if x > self.a[best] {
                best = k;
            }
        }
        NodeId(best)
    }

    fn max(&self) -> f64 {
        self.a.iter().cloned().fold(0.0, f64::max)
    }

    /// Nodes at or above half the peak activity.
    pub fn footprint(&self) -> Vec<NodeId> {
        self.above(0.5)
    }

    /// Nodes with `A >= frac * max(A)`; `frac <= 0` selects `A > 0`.
    pub fn above(&self, frac: f64) -> Vec<NodeId> {
        let max = self.max();
        self.a
            .iter()
            .enumerate()
            .filter(|(_, &x)| if frac <= 0.0 { x > 0.0 } else { x >= frac * max })
            .map(|(k, _)| NodeId(k))
            .collect()
    }

    fn footprint_components(&self) -> usize {
        let (nx, ny) = (self.nx, self.ny);
        let mut inside = vec![false; nx * ny];
        for n in self.footprint() {
            inside[n.0] = true;
        }
        let mut seen = vec![false; nx * ny];
        let mut count = 0;
        for start in 0..nx * ny {
            if !inside[start] || seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(k) = stack.pop() {
                let (x, y) = (k % nx, k / nx);
                let mut push = |q: usize| {
                    if inside[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                };
                if x > 0 {
                    push(k - 1);
                }
                if x + 1 < nx {
                    push(k + 1);
                }
                if y > 0 {
                    push(k - nx);
                }
                if y + 1 < ny {
                    push(k + nx);
                }
            }
        }
        count
    }
}

/// Largest axis extent (in nodes) of a node set.
pub fn set_diameter(m: &Manifold, nodes: &[NodeId]) -> usize {
    if nodes.is_empty() {
        return 0;
    }
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for &n in nodes {
        let (x, y) = m.coords(n);
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    (x1 - x0 + 1).max(y1 - y0 + 1)
}
