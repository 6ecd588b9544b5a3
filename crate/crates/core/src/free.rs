//! Free rank-1 and rank-2 submodules of `O_r^3` and the free projective plane.

use std::collections::HashMap;

use serde::Serialize;

use crate::graph::Graph;
use crate::ring::{LocalRing, RingElem};

pub type Vec3 = [RingElem; 3];

/// Scales a unimodular vector so that its first unit coordinate is 1.
/// Returns `None` when no coordinate is a unit.
pub fn normalize<const N: usize>(ring: &LocalRing, v: [RingElem; N]) -> Option<[RingElem; N]> {
    let pivot = v.iter().position(|&x| ring.is_unit(x))?;
    let inv = ring.inv(v[pivot])?;
    Some(v.map(|x| ring.mul(x, inv)))
}

/// Index of the pivot (first unit) coordinate.
pub fn pivot_of(ring: &LocalRing, v: &[RingElem]) -> Option<usize> {
    v.iter().position(|&x| ring.is_unit(x))
}

/// Canonical unimodular vectors of length `N`: ordered by pivot index, then
/// lexicographically by coordinates.
pub fn canonical_vectors<const N: usize>(ring: &LocalRing) -> Vec<[RingElem; N]> {
    let nonunits: Vec<RingElem> = ring.elements().filter(|&x| !ring.is_unit(x)).collect();
    let all: Vec<RingElem> = ring.elements().collect();
    let mut out = Vec::new();
    for pivot in 0..N {
        let mut cur = [0; N];
        cur[pivot] = 1;
        fill(&mut cur, 0, pivot, &nonunits, &all, &mut out);
    }
    out
}

fn fill<const N: usize>(
    cur: &mut [RingElem; N],
    i: usize,
    pivot: usize,
    nonunits: &[RingElem],
    all: &[RingElem],
    out: &mut Vec<[RingElem; N]>,
) {
    if i == N {
        out.push(*cur);
        return;
    }
    if i == pivot {
        fill(cur, i + 1, pivot, nonunits, all, out);
        return;
    }
    let choices = if i < pivot { nonunits } else { all };
    for &x in choices {
        cur[i] = x;
        fill(cur, i + 1, pivot, nonunits, all, out);
    }
}

/// Canonical lines of `O_r^3`.
pub fn enumerate_lines(ring: &LocalRing) -> Vec<Vec3> {
    canonical_vectors::<3>(ring)
}

/// `(q²+q+1)·q^(2(r−1))`
pub fn line_count(q: u64, r: u32) -> u64 {
    (q * q + q + 1) * q.pow(2 * (r - 1))
}

pub fn dot(ring: &LocalRing, a: &Vec3, b: &Vec3) -> RingElem {
    (0..3).fold(0, |s, i| ring.add(s, ring.mul(a[i], b[i])))
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaneMetadata {
    pub q: u64,
    pub r: u32,
    pub ring: String,
    pub n_vertices: usize,
    pub degree: usize,
}

/// The incidence graph of free lines and free planes of `O_r^3`. Vertices
/// `[0, n)` are lines, `[n, 2n)` planes (kernels of the canonical functionals).
#[derive(Clone, Debug)]
pub struct FreePlane {
    ring: LocalRing,
    lines: Vec<Vec3>,
    index: HashMap<Vec3, u32>,
    graph: Graph,
}

impl FreePlane {
    pub fn build(ring: &LocalRing) -> Self {
        let lines = enumerate_lines(ring);
        let index: HashMap<Vec3, u32> = lines.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
        let n = lines.len() as u32;
        let pairs = canonical_vectors::<2>(ring);
        let mut edges = Vec::with_capacity(lines.len() * pairs.len());
        for (pi, phi) in lines.iter().enumerate() {
            // ker φ has basis e_i − φ_i e_j, e_k − φ_k e_j where φ_j = 1 is the pivot.
            let j = pivot_of(ring, phi).expect("functional is unimodular");
            let others: Vec<usize> = (0..3).filter(|&i| i != j).collect();
            let (i, k) = (others[0], others[1]);
            for &[a, b] in &pairs {
                let mut v = [0; 3];
                v[i] = a;
                v[k] = b;
                v[j] = ring.neg(ring.add(ring.mul(a, phi[i]), ring.mul(b, phi[k])));
                let v = normalize(ring, v).expect("kernel vector is unimodular");
                edges.push((index[&v], n + pi as u32));
            }
        }
        let graph = Graph::from_edges(2 * lines.len(), edges);
        Self {
            ring: ring.clone(),
            lines,
            index,
            graph,
        }
    }

    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    pub fn lines(&self) -> &[Vec3] {
        &self.lines
    }

    /// Canonical functionals of the planes, in vertex order.
    pub fn planes(&self) -> &[Vec3] {
        &self.lines
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn line_index(&self, v: &Vec3) -> Option<u32> {
        self.index.get(v).copied()
    }

    /// `(q+1)·q^(r−1)`
    pub fn expected_degree(&self) -> usize {
        let (q, r) = (self.ring.q() as usize, self.ring.r());
        (q + 1) * q.pow(r - 1)
    }

    /// Distance to a common ancestor in the tree of residues:
    /// `r − max{i : u ≡ w mod π^i}` for canonical lines.
    pub fn delta(&self, u: usize, w: usize) -> u32 {
        delta(&self.ring, &self.lines[u], &self.lines[w])
    }

    pub fn metadata(&self) -> PlaneMetadata {
        PlaneMetadata {
            q: self.ring.q(),
            r: self.ring.r(),
            ring: self.ring.spec().to_string(),
            n_vertices: self.graph.n(),
            degree: self.expected_degree(),
        }
    }
}

/// For canonical `u, w`, `u ≡ ε·w mod π^i` forces `ε ≡ 1` (both pivots are 1),
/// so the common depth is the least coordinatewise valuation of `u − w`.
pub fn delta(ring: &LocalRing, u: &Vec3, w: &Vec3) -> u32 {
    let depth = (0..3).map(|k| ring.val(ring.sub(u[k], w[k]))).min().unwrap();
    ring.r() - depth
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_counts() {
        for (q, r, expect) in [(2, 1, 7), (2, 2, 28), (3, 2, 117)] {
            let ring = LocalRing::padic(q, r).unwrap();
            assert_eq!(enumerate_lines(&ring).len(), expect);
            assert_eq!(line_count(q, r), expect as u64);
        }
        for (q, r) in [(4, 2), (2, 3), (4, 3), (5, 2)] {
            let ring = LocalRing::laurent(q, r).unwrap();
            assert_eq!(enumerate_lines(&ring).len() as u64, line_count(q, r));
        }
    }

    #[test]
    fn plane_examples() {
        let ring = LocalRing::padic(2, 2).unwrap();
        let p = FreePlane::build(&ring);
        assert_eq!(p.graph().n(), 56);
        assert_eq!(p.graph().regular_degree(), Some(6));
        let f2 = FreePlane::build(&LocalRing::padic(2, 1).unwrap());
        assert_eq!(f2.graph().n(), 14);
        assert_eq!(f2.graph().regular_degree(), Some(3));
    }

    #[test]
    fn incidence_matches_dot_product() {
        for ring in [LocalRing::padic(2, 2).unwrap(), LocalRing::laurent(3, 2).unwrap()] {
            let p = FreePlane::build(&ring);
            let n = p.n_lines();
            for (a, u) in p.lines().iter().enumerate() {
                for (b, phi) in p.planes().iter().enumerate() {
                    let inc = dot(&ring, u, phi) == 0;
                    assert_eq!(inc, p.graph().has_edge(a as u32, (n + b) as u32));
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        let ring = LocalRing::padic(2, 2).unwrap();
        assert_eq!(delta(&ring, &[1, 0, 0], &[1, 0, 0]), 0);
        assert_eq!(delta(&ring, &[1, 0, 0], &[1, 2, 0]), 1);
        assert_eq!(delta(&ring, &[1, 0, 0], &[0, 1, 0]), 2);
    }
}
