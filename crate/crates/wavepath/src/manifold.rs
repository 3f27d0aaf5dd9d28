//! Square lattice with rectangular obstacles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major node index: `index = y * nx + x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Inclusive axis-aligned rectangle `(x0, y0, x1, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[i64; 4]", into = "[i64; 4]")]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    fn clipped(&self, nx: usize, ny: usize) -> Option<(usize, usize, usize, usize)> {
        let (lx, hx) = (self.x0.min(self.x1), self.x0.max(self.x1));
        let (ly, hy) = (self.y0.min(self.y1), self.y0.max(self.y1));
        if hx < 0 || hy < 0 || lx >= nx as i64 || ly >= ny as i64 {
            return None;
        }
        Some((
            lx.max(0) as usize,
            ly.max(0) as usize,
            hx.min(nx as i64 - 1) as usize,
            hy.min(ny as i64 - 1) as usize,
        ))
    }
}

impl From<[i64; 4]> for Rect {
    fn from(r: [i64; 4]) -> Self {
        Rect::new(r[0], r[1], r[2], r[3])
    }
}

impl From<Rect> for [i64; 4] {
    fn from(r: Rect) -> Self {
        [r.x0, r.y0, r.x1, r.y1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    nx: usize,
    ny: usize,
    grid_step: f64,
    blocked: Vec<bool>,
}

impl Manifold {
    pub fn new(nx: usize, ny: usize, obstacles: &[Rect]) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        let mut blocked = vec![false; nx * ny];
        for r in obstacles {
            let (x0, y0, x1, y1) = r.clipped(nx, ny).ok_or(Error::ObstacleOutside {
                x0: r.x0,
                y0: r.y0,
                x1: r.x1,
                y1: r.y1,
                nx,
                ny,
            })?;
            for y in y0..=y1 {
                blocked[y * nx + x0..=y * nx + x1].fill(true);
            }
        }
        if blocked.iter().all(|&b| b) {
            return Err(Error::AllBlocked);
        }
        Ok(Manifold {
            nx,
            ny,
            grid_step: 1.0,
            blocked,
        })
    }

    pub fn open(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, &[])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn blocked(&self) -> &[bool] {
        &self.blocked
    }

    pub fn is_blocked(&self, n: NodeId) -> bool {
        self.blocked[n.0]
    }

    pub fn free_count(&self) -> usize {
        self.blocked.iter().filter(|&&b| !b).count()
    }

    /// Node at column `x`, row `y`; `None` outside the lattice.
    pub fn node(&self, x: i64, y: i64) -> Option<NodeId> {
        if x < 0 || y < 0 || x >= self.nx as i64 || y >= self.ny as i64 {
            None
        } else {
            Some(NodeId(y as usize * self.nx + x as usize))
        }
    }

    pub fn node_checked(&self, x: i64, y: i64) -> Result<NodeId> {
        self.node(x, y).ok_or(Error::OutOfRange {
            x,
            y,
            nx: self.nx,
            ny: self.ny,
        })
    }

    /// Like [`node_checked`](Self::node_checked) but also rejects blocked nodes.
    pub fn free_node(&self, x: i64, y: i64) -> Result<NodeId> {
        let n = self.node_checked(x, y)?;
        if self.is_blocked(n) {
            return Err(Error::BlockedNode {
                x: x as usize,
                y: y as usize,
            });
        }
        Ok(n)
    }

    pub fn coords(&self, n: NodeId) -> (usize, usize) {
        (n.0 % self.nx, n.0 / self.nx)
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        let dx = ax as f64 - bx as f64;
        let dy = ay as f64 - by as f64;
        self.grid_step * (dx * dx + dy * dy).sqrt()
    }

    /// Unblocked nodes `u != n` with `0 < dist(n, u) <= radius`, ascending index.
    pub fn neighbors_within(&self, n: NodeId, radius: f64) -> Vec<(NodeId, f64)> {
        let mut out = Vec::new();
        if self.is_blocked(n) || radius.is_nan() || radius <= 0.0 {
            return out;
        }
        let reach = (radius / self.grid_step).floor() as i64;
        let (x, y) = self.coords(n);
        let (x, y) = (x as i64, y as i64);
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let Some(u) = self.node(x + dx, y + dy) else {
                    continue;
                };
                if self.is_blocked(u) {
                    continue;
                }
                let d = self.grid_step * ((dx * dx + dy * dy) as f64).sqrt();
                if d <= radius {
                    out.push((u, d));
                }
            }
        }
        // row-major scan already yields ascending indices
        out
    }
}

/// Offsets `(dx, dy, distance)` with `distance <= radius`, including the origin.
pub(crate) fn offsets_within(radius: f64) -> Vec<(i64, i64, f64)> {
    let reach = radius.max(0.0).floor() as i64;
    let mut out = Vec::new();
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            let d = ((dx * dx + dy * dy) as f64).sqrt();
            if d <= radius {
                out.push((dx, dy, d));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn counts_free_nodes() {
        assert_eq!(Manifold::open(41, 41).unwrap().free_count(), 1681);
        assert_eq!(Manifold::open(101, 101).unwrap().free_count(), 10201);
        let m = Manifold::new(3, 3, &[Rect::new(1, 1, 1, 1)]).unwrap();
        assert_eq!(m.free_count(), 8);
        assert!(m.is_blocked(m.node(1, 1).unwrap()));
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(matches!(Manifold::open(2, 5), Err(Error::GridTooSmall { .. })));
        assert!(matches!(
            Manifold::new(3, 3, &[Rect::new(0, 0, 2, 2)]),
            Err(Error::AllBlocked)
        ));
        assert!(matches!(
            Manifold::new(5, 5, &[Rect::new(7, 7, 9, 9)]),
            Err(Error::ObstacleOutside { .. })
        ));
    }

    #[test]
    fn index_round_trip() {
        let m = Manifold::open(7, 5).unwrap();
        for i in 0..m.len() {
            let (x, y) = m.coords(NodeId(i));
            assert_eq!(m.node(x as i64, y as i64), Some(NodeId(i)));
        }
        assert_eq!(m.node(7, 0), None);
        assert_eq!(m.node(0, -1), None);
    }

    #[test]
    fn distances() {
        let m = Manifold::open(41, 41).unwrap();
        let a = m.node(0, 0).unwrap();
        assert_eq!(m.distance(a, a), 0.0);
        assert_relative_eq!(m.distance(a, m.node(1, 1).unwrap()), 2f64.sqrt());
        let d = m.distance(m.node(4, 4).unwrap(), m.node(36, 36).unwrap());
        assert!((d - 45.2548).abs() < 1e-4);
    }

    #[test]
    fn neighbor_counts() {
        let m = Manifold::open(9, 9).unwrap();
        let c = m.node(4, 4).unwrap();
        assert_eq!(m.neighbors_within(c, 2.0).len(), 12);
        assert_eq!(m.neighbors_within(c, 1.0).len(), 4);
        assert_eq!(m.neighbors_within(m.node(0, 0).unwrap(), 1.0).len(), 2);
        let n = m.neighbors_within(c, 2.0);
        assert!(n.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn blocked_nodes_are_not_neighbors() {
        let m = Manifold::new(5, 5, &[Rect::new(2, 1, 2, 3)]).unwrap();
        let n = m.neighbors_within(m.node(1, 2).unwrap(), 2.0);
        assert!(n.iter().all(|(u, _)| !m.is_blocked(*u)));
        assert!(m.neighbors_within(m.node(2, 2).unwrap(), 2.0).is_empty());
    }

    #[test]
    fn offsets_include_origin() {
        let o = offsets_within(2.0);
        assert_eq!(o.len(), 13);
        assert!(o.contains(&(0, 0, 0.0)));
    }
}
