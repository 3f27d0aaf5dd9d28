//! Graph search baselines used to judge planned paths.

use std::collections::VecDeque;

use crate::manifold::{Manifold, NodeId};

/// Adjacency lists over free nodes; edge lengths are geometric distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frontier {
    /// First in, first out: breadth-first.
    Fifo,
    /// Last in, first out: depth-first.
    Lifo,
}

impl Graph {
    /// Connect each free node to free nodes within `radius`.
    /// Radius 1.5 gives the 8-neighborhood.
    pub fn from_manifold(m: &Manifold, radius: f64) -> Self {
        let adj = (0..m.len())
            .map(|i| {
                m.neighbors_within(NodeId(i), radius)
                    .into_iter()
                    .map(|(u, d)| (u.0, d))
                    .collect()
            })
            .collect();
        Graph { adj }
    }

    /// Undirected graph from `(a, b, length)` triples.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            adj[a].push((b, w));
            if a != b {
                adj[b].push((a, w));
            }
        }
        for row in &mut adj {
            row.sort_by_key(|e| e.0);
            row.dedup_by_key(|e| e.0);
        }
        Graph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, n: usize) -> &[(usize, f64)] {
        &self.adj[n]
    }

    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        self.adj[a].iter().find(|e| e.0 == b).map(|e| e.1)
    }

    /// Visit everything reachable from `start`. Returns each node's parent
    /// (`start` is its own parent; unreached nodes are `None`).
    pub fn traverse(&self, start: usize, frontier: Frontier) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.len()];
        let mut queue = VecDeque::new();
        parent[start] = Some(start);
        queue.push_back(start);
        loop {
            let next = match frontier {
                Frontier::Fifo => queue.pop_front(),
                Frontier::Lifo => queue.pop_back(),
            };
            let Some(n) = next else { break };
            for &(u, _) in &self.adj[n] {
                if parent[u].is_none() {
                    parent[u] = Some(n);
                    queue.push_back(u);
                }
            }
        }
        parent
    }

    /// Fewest-hop path from `start` to `goal`, both inclusive.
    pub fn shortest_path(&self, start: usize, goal: usize) -> Option<Vec<usize>> {
        let parent = self.traverse(start, Frontier::Fifo);
        parent[goal]?;
        let mut path = vec![goal];
        let mut n = goal;
        while n != start {
            n = parent[n]?;
            path.push(n);
        }
        path.reverse();
        Some(path)
    }

    pub fn path_length(&self, path: &[usize]) -> Option<f64> {
        path.windows(2).map(|w| self.edge_length(w[0], w[1])).sum()
    }
}

/// Breadth-first path on the 8-connected lattice and its geometric length.
pub fn lattice_shortest(m: &Manifold, start: NodeId, goal: NodeId) -> Option<(Vec<NodeId>, f64)> {
    let g = Graph::from_manifold(m, 1.5);
    let p = g.shortest_path(start.0, goal.0)?;
    let len = g.path_length(&p)?;
    Some((p.into_iter().map(NodeId).collect(), len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Rect;

    fn line(n: usize) -> Graph {
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Graph::from_edges(n, &e)
    }

    #[test]
    fn path_graph() {
        let g = line(5);
        assert_eq!(g.shortest_path(0, 4), Some(vec![0, 1, 2, 3, 4]));
        assert_eq!(g.shortest_path(2, 2), Some(vec![2]));
    }

    #[test]
    fn disconnected() {
        let g = Graph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        assert_eq!(g.shortest_path(0, 3), None);
    }

    #[test]
    fn fifo_and_lifo_reach_the_same_set() {
        let m = Manifold::new(9, 9, &[Rect::new(4, 0, 4, 6)]).unwrap();
        let g = Graph::from_manifold(&m, 1.5);
        let a = g.traverse(0, Frontier::Fifo);
        let b = g.traverse(0, Frontier::Lifo);
        for i in 0..g.len() {
            assert_eq!(a[i].is_some(), b[i].is_some());
        }
    }

    #[test]
    fn lattice_length_uses_diagonals() {
        let m = Manifold::open(41, 41).unwrap();
        let (p, len) = lattice_shortest(&m, m.node(4, 4).unwrap(), m.node(36, 36).unwrap()).unwrap();
        assert_eq!(p.len(), 33);
        assert!((len - 32.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn walls_lengthen_the_route() {
        let m = Manifold::new(11, 11, &[Rect::new(5, 0, 5, 8)]).unwrap();
        let (p, _) = lattice_shortest(&m, m.node(2, 2).unwrap(), m.node(8, 2).unwrap()).unwrap();
        assert!(p.iter().all(|n| !m.is_blocked(*n)));
        assert!(p.len() > 7);
    }
}
