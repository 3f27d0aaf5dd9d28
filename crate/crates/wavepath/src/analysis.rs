//! Measurements over recorded spike trains.

use crate::manifold::{Manifold, NodeId};

/// Least-squares slope and intercept of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Largest distance from `source` among the spikes of each step; steps
/// without spikes are skipped.
pub fn front_radius(m: &Manifold, source: NodeId, spikes: &[Vec<NodeId>]) -> Vec<(usize, f64)> {
    spikes
        .iter()
        .enumerate()
        .filter_map(|(t, s)| {
            s.iter()
                .map(|&n| m.distance(source, n))
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
                .map(|r| (t, r))
        })
        .collect()
}

/// Slope of front radius against step over the first `steps` steps.
pub fn front_speed(m: &Manifold, source: NodeId, spikes: &[Vec<NodeId>], steps: usize) -> Option<f64> {
    let r = front_radius(m, source, &spikes[..steps.min(spikes.len())]);
    let xs: Vec<f64> = r.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = r.iter().map(|p| p.1).collect();
    linear_fit(&xs, &ys).map(|f| f.0)
}

/// Steps at which `node` spiked.
pub fn spike_times(node: NodeId, spikes: &[Vec<NodeId>]) -> Vec<usize> {
    spikes
        .iter()
        .enumerate()
        .filter(|(_, s)| s.binary_search(&node).is_ok())
        .map(|(t, _)| t)
        .collect()
}

/// Windows `(a, b]` between consecutive spikes of `source`. Each window is
/// one emission cycle.
pub fn emission_cycles(source: NodeId, spikes: &[Vec<NodeId>]) -> Vec<(usize, usize)> {
    let t = spike_times(source, spikes);
    t.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Spike count of `node` inside each window.
pub fn spikes_per_cycle(node: NodeId, spikes: &[Vec<NodeId>], cycles: &[(usize, usize)]) -> Vec<usize> {
    let t = spike_times(node, spikes);
    cycles
        .iter()
        .map(|&(a, b)| t.iter().filter(|&&x| x > a && x <= b).count())
        .collect()
}

/// Nodes (other than `exclude`) that spike more than once within a cycle,
/// as `(cycle index, node, count)`.
pub fn repeat_spikes(
    n_nodes: usize,
    spikes: &[Vec<NodeId>],
    cycles: &[(usize, usize)],
    exclude: &[NodeId],
) -> Vec<(usize, NodeId, usize)> {
    let mut out = Vec::new();
    let mut count = vec![0usize; n_nodes];
    for (k, &(a, b)) in cycles.iter().enumerate() {
        count.fill(0);
        for s in &spikes[a + 1..=b.min(spikes.len() - 1)] {
            for n in s {
                count[n.0] += 1;
            }
        }
        for (i, &c) in count.iter().enumerate() {
            if c > 1 && !exclude.contains(&NodeId(i)) {
                out.push((k, NodeId(i), c));
            }
        }
    }
    out
}
