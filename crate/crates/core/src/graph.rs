//! Simple undirected graphs as sorted adjacency lists.

use std::collections::VecDeque;
use std::io::Write;

use nalgebra::DMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds from an edge list; duplicate edges are merged, loops rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert_ne!(u, v, "self-loop at {u}");
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        Self::from_adjacency(adj)
    }

    /// Sorts and dedups each list; the caller guarantees symmetry.
    pub fn from_adjacency(mut adj: Vec<Vec<u32>>) -> Self {
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Self { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, l)| {
            l.iter()
                .filter(move |&&v| (u as u32) < v)
                .map(move |&v| (u as u32, v))
        })
    }

    /// The common degree, if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn bfs_distances(&self, src: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n()];
        dist[src as usize] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            for &w in self.neighbors(u) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n()];
        let mut count = 0;
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s as u32];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// A proper 2-coloring, if one exists.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut side = vec![u8::MAX; self.n()];
        for s in 0..self.n() {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            let mut stack = vec![s as u32];
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if side[w as usize] == u8::MAX {
                        side[w as usize] = 1 - side[u as usize];
                        stack.push(w);
                    } else if side[w as usize] == side[u as usize] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }

    /// Subgraph induced on `vertices`, relabeled by position in that list.
    pub fn induced(&self, vertices: &[u32]) -> Graph {
        let mut pos = vec![u32::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter_map(|&w| (pos[w as usize] != u32::MAX).then_some(pos[w as usize]))
                    .collect()
            })
            .collect();
        Graph::from_adjacency(adj)
    }

    pub fn adjacency_f64(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for (u, v) in self.edges() {
            m[(u as usize, v as usize)] = 1.0;
            m[(v as usize, u as usize)] = 1.0;
        }
        m
    }

    /// `D^{-1/2} A D^{-1/2}`; isolated vertices get zero rows.
    pub fn normalized_adjacency(&self) -> DMatrix<f64> {
        let n = self.n();
        let inv_sqrt: Vec<f64> = (0..n)
            .map(|v| match self.degree(v as u32) {
                0 => 0.0,
                d => 1.0 / (d as f64).sqrt(),
            })
            .collect();
        let mut m = DMatrix::zeros(n, n);
        for (u, v) in self.edges() {
            let (u, v) = (u as usize, v as usize);
            let x = inv_sqrt[u] * inv_sqrt[v];
            m[(u, v)] = x;
            m[(v, u)] = x;
        }
        m
    }

    /// Writes a `u,v` CSV (with header) of every edge with `u < v`.
    pub fn write_edge_list(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "u,v")?;
        for (u, v) in self.edges() {
            writeln!(w, "{u},{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_basics() {
        let g = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6)));
        assert_eq!(g.regular_degree(), Some(2));
        assert_eq!(g.edge_count(), 6);
        assert!(g.bipartition().is_some());
        assert!(g.is_connected());
        assert_eq!(g.bfs_distances(0)[3], Some(3));
        let odd = Graph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5)));
        assert!(odd.bipartition().is_none());
        let path = g.induced(&[0, 1, 2]);
        assert_eq!(path.edge_count(), 2);
        let mut buf = Vec::new();
        path.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "u,v\n0,1\n1,2\n");
    }

    #[test]
    fn two_components() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]);
        assert_eq!(g.component_count(), 2);
    }
}
