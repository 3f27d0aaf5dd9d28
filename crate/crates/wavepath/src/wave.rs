//! Excitatory/inhibitory Izhikevich sheet that turns a stimulated node into
//! expanding spike fronts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{offsets_within, Manifold, NodeId};

pub const SPIKE_THRESHOLD: f64 = 30.0;
/// Direct current injected into a stimulated excitatory neuron.
pub const STIMULUS_CURRENT: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Izhikevich {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Izhikevich {
    pub const REGULAR_SPIKING: Izhikevich = Izhikevich {
        a: 0.02,
        b: 0.2,
        c: -65.0,
        d: 8.0,
    };
    pub const FAST_SPIKING: Izhikevich = Izhikevich {
        a: 0.1,
        b: 0.2,
        c: -65.0,
        d: 2.0,
    };

    /// `r = 0` is regular spiking, `r = 1` chattering.
    pub fn varied_excitatory(r: f64) -> Self {
        Izhikevich {
            a: 0.02,
            b: 0.2,
            c: -65.0 + 15.0 * r * r,
            d: 8.0 - 6.0 * r * r,
        }
    }

    /// `r = 0` is low-threshold spiking, `r = 1` fast spiking.
    pub fn varied_inhibitory(r: f64) -> Self {
        Izhikevich {
            a: 0.02 + 0.08 * r,
            b: 0.25 - 0.05 * r,
            c: -65.0,
            d: 2.0,
        }
    }
}

/// Advance one neuron by a 1 ms step made of `substeps` forward-Euler
/// sub-steps (v first, then u with the new v). Once v crosses threshold the
/// state is frozen for the rest of the step. Returns whether it spiked; a
/// spiking neuron leaves already reset.
#[inline]
pub fn advance(v: &mut f64, u: &mut f64, input: f64, p: &Izhikevich, substeps: u32) -> bool {
    let h = 1.0 / substeps as f64;
    let (mut vv, mut uu) = (*v, *u);
    for _ in 0..substeps {
        if vv >= SPIKE_THRESHOLD {
            break;
        }
        vv += h * (0.04 * vv * vv + 5.0 * vv + 140.0 - uu + input);
        uu += h * p.a * (p.b * vv - uu);
    }
    let spiked = vv >= SPIKE_THRESHOLD;
    if spiked {
        vv = p.c;
        uu += p.d;
    }
    *v = vv;
    *u = uu;
    spiked
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Homogeneous,
    Heterogeneous,
}

/// Synaptic kernel and integration settings of the wave layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveParams {
    /// e->e peak strength, scaled by 1/d.
    pub s_ee: f64,
    /// e->i peak strength, scaled by 1/d.
    pub s_ei: f64,
    /// i->e strength at d = 0, scaled by 1/d beyond.
    pub s_ie: f64,
    /// Excitation range in lattice units.
    pub d_e: f64,
    /// Inhibition range in lattice units.
    pub d_i: f64,
    /// Euler sub-steps per 1 ms step.
    pub substeps: u32,
}

impl Default for WaveParams {
    fn default() -> Self {
        WaveParams {
            s_ee: 50.0,
            s_ei: 15.0,
            s_ie: -160.0,
            d_e: 2.0,
            d_i: 1.0,
            substeps: 8,
        }
    }
}

impl WaveParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.s_ee, self.s_ei, self.s_ie, self.d_e, self.d_i];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("wave", "all strengths and ranges must be finite"));
        }
        if self.s_ee <= 0.0 {
            return Err(Error::param("s_ee", "must be positive"));
        }
        if self.s_ei <= 0.0 {
            return Err(Error::param("s_ei", "must be positive"));
        }
        if self.s_ie >= 0.0 {
            return Err(Error::param("s_ie", "must be negative"));
        }
        if self.d_e <= 0.0 {
            return Err(Error::param("d_e", "must be positive"));
        }
        if self.d_i <= 0.0 {
            return Err(Error::param("d_i", "must be positive"));
        }
        if self.substeps == 0 {
            return Err(Error::param("substeps", "must be at least 1"));
        }
        Ok(())
    }
}

/// Sparse projection stored by presynaptic node, targets ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl Projection {
    fn from_kernel(m: &Manifold, range: f64, strength: impl Fn(f64) -> Option<f64>) -> Self {
        let kernel: Vec<(i64, i64, f64)> = offsets_within(range)
            .into_iter()
            .filter_map(|(dx, dy, d)| strength(d * m.grid_step()).map(|w| (dx, dy, w)))
            .collect();
        let mut offsets = Vec::with_capacity(m.len() + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for pre in 0..m.len() {
            let pre_id = NodeId(pre);
            if !m.is_blocked(pre_id) {
                let (x, y) = m.coords(pre_id);
                // kernel is in row-major offset order, so targets come out ascending
                for &(dx, dy, w) in &kernel {
                    if let Some(post) = m.node(x as i64 + dx, y as i64 + dy) {
                        if !m.is_blocked(post) {
                            targets.push(post.0 as u32);
                            weights.push(w);
                        }
                    }
                }
            }
            offsets.push(targets.len());
        }
        Projection {
            offsets,
            targets,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn row(&self, pre: NodeId) -> (&[u32], &[f64]) {
        let (a, b) = (self.offsets[pre.0], self.offsets[pre.0 + 1]);
        (&self.targets[a..b], &self.weights[a..b])
    }

    pub fn weight(&self, pre: NodeId, post: NodeId) -> Option<f64> {
        let (t, w) = self.row(pre);
        t.binary_search(&(post.0 as u32)).ok().map(|k| w[k])
    }

    /// All entries as `(pre, post, weight)` in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.offsets.len() - 1).flat_map(move |pre| {
            (self.offsets[pre]..self.offsets[pre + 1])
                .map(move |k| (NodeId(pre), NodeId(self.targets[k] as usize), self.weights[k]))
        })
    }

    fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynapseTables {
    pub ee: Projection,
    pub ei: Projection,
    pub ie: Projection,
}

pub fn build_synapses(m: &Manifold, p: &WaveParams) -> SynapseTables {
    let excit = |peak: f64, range: f64| {
        move |d: f64| (d > 0.0 && d <= range).then(|| peak / d)
    };
    let inhib = |d: f64| {
        if d == 0.0 {
            Some(p.s_ie)
        } else {
            (d <= p.d_i).then(|| p.s_ie / d)
        }
    };
    SynapseTables {
        ee: Projection::from_kernel(m, p.d_e, excit(p.s_ee, p.d_e)),
        ei: Projection::from_kernel(m, p.d_e, excit(p.s_ei, p.d_e)),
        ie: Projection::from_kernel(m, p.d_i, inhib),
    }
}

/// Multiply every strength by an independent factor drawn from [0.5, 1.5].
pub fn randomize_synapses(mut t: SynapseTables, seed: u64) -> SynapseTables {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    for proj in [&mut t.ee, &mut t.ei, &mut t.ie] {
        for w in proj.weights_mut() {
            *w *= rng.random_range(0.5..=1.5);
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub params: Vec<Izhikevich>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub dc: Vec<f64>,
}

impl Population {
    fn from_params(params: Vec<Izhikevich>) -> Self {
        let v: Vec<f64> = params.iter().map(|p| p.c).collect();
        let u = params.iter().zip(&v).map(|(p, v)| p.b * v).collect();
        let dc = vec![0.0; params.len()];
        Population { params, v, u, dc }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

/// Excitatory and inhibitory populations, one neuron of each per node.
pub fn init_neurons(m: &Manifold, mode: Mode, seed: u64) -> (Population, Population) {
    let n = m.len();
    match mode {
        Mode::Homogeneous => (
            Population::from_params(vec![Izhikevich::REGULAR_SPIKING; n]),
            Population::from_params(vec![Izhikevich::FAST_SPIKING; n]),
        ),
        Mode::Heterogeneous => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut exc = Vec::with_capacity(n);
            let mut inh = Vec::with_capacity(n);
            for _ in 0..n {
                let re: f64 = rng.random();
                let ri: f64 = rng.random();
                exc.push(Izhikevich::varied_excitatory(re));
                inh.push(Izhikevich::varied_inhibitory(ri));
            }
            (Population::from_params(exc), Population::from_params(inh))
        }
    }
}

#[derive(Debug, Clone)]
pub struct WaveLayer {
    nx: usize,
    blocked: Vec<bool>,
    exc: Population,
    inh: Population,
    tables: SynapseTables,
    substeps: u32,
    spikes_e: Vec<NodeId>,
    spikes_i: Vec<NodeId>,
    input_e: Vec<f64>,
    input_i: Vec<f64>,
    steps: u64,
}

impl WaveLayer {
    /// Build neurons and synapses; heterogeneous mode randomizes both from `seed`.
    pub fn new(m: &Manifold, p: &WaveParams, mode: Mode, seed: u64) -> Result<Self> {
        p.validate()?;
        let (exc, inh) = init_neurons(m, mode, seed);
        let mut tables = build_synapses(m, p);
        if mode == Mode::Heterogeneous {
            tables = randomize_synapses(tables, seed);
        }
        Ok(Self::from_parts(m, exc, inh, tables, p.substeps))
    }

    pub fn from_parts(
        m: &Manifold,
        exc: Population,
        inh: Population,
        tables: SynapseTables,
        substeps: u32,
    ) -> Self {
        let n = m.len();
        assert_eq!(exc.len(), n, "excitatory population size");
        assert_eq!(inh.len(), n, "inhibitory population size");
        WaveLayer {
            nx: m.nx(),
            blocked: m.blocked().to_vec(),
            exc,
            inh,
            tables,
            substeps: substeps.max(1),
            spikes_e: Vec::new(),
            spikes_i: Vec::new(),
            input_e: vec![0.0; n],
            input_i: vec![0.0; n],
            steps: 0,
        }
    }

    pub fn set_stimulus(&mut self, node: NodeId, on: bool) -> Result<()> {
        if self.blocked[node.0] {
            return Err(Error::BlockedNode {
                x: node.0 % self.nx,
                y: node.0 / self.nx,
            });
        }
        self.exc.dc[node.0] = if on { STIMULUS_CURRENT } else { 0.0 };
        Ok(())
    }

    /// One 1 ms step. Inputs come from the spikes of the previous step,
    /// summed in ascending presynaptic order (excitatory sources first).
    pub fn step(&mut self) -> Result<(&[NodeId], &[NodeId])> {
        self.input_e.copy_from_slice(&self.exc.dc);
        self.input_i.fill(0.0);
        for &pre in &self.spikes_e {
            let (t, w) = self.tables.ee.row(pre);
            for (&post, &w) in t.iter().zip(w) {
                self.input_e[post as usize] += w;
            }
            let (t, w) = self.tables.ei.row(pre);
            for (&post, &w) in t.iter().zip(w) {
                self.input_i[post as usize] += w;
            }
        }
        for &pre in &self.spikes_i {
            let (t, w) = self.tables.ie.row(pre);
            for (&post, &w) in t.iter().zip(w) {
                self.input_e[post as usize] += w;
            }
        }

        self.spikes_e.clear();
        self.spikes_i.clear();
        let step = self.steps;
        for k in 0..self.blocked.len() {
            if self.blocked[k] {
                continue;
            }
            let e = &mut self.exc;
            if advance(&mut e.v[k], &mut e.u[k], self.input_e[k], &e.params[k], self.substeps) {
                self.spikes_e.push(NodeId(k));
            }
            let i = &mut self.inh;
            if advance(&mut i.v[k], &mut i.u[k], self.input_i[k], &i.params[k], self.substeps) {
                self.spikes_i.push(NodeId(k));
            }
            for (pop, name) in [(&self.exc, "excitatory"), (&self.inh, "inhibitory")] {
                if !pop.v[k].is_finite() || !pop.u[k].is_finite() {
                    return Err(Error::NonFinite {
                        population: name,
                        x: k % self.nx,
                        y: k / self.nx,
                        step,
                    });
                }
            }
        }
        self.steps += 1;
        Ok((&self.spikes_e, &self.spikes_i))
    }

    pub fn exc_spikes(&self) -> &[NodeId] {
        &self.spikes_e
    }

    pub fn inh_spikes(&self) -> &[NodeId] {
        &self.spikes_i
    }

    pub fn excitatory(&self) -> &Population {
        &self.exc
    }

    pub fn inhibitory(&self) -> &Population {
        &self.inh
    }

    pub fn tables(&self) -> &SynapseTables {
        &self.tables
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps
    }
}
