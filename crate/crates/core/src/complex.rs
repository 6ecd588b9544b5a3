//! Pure simplicial complexes, 3-colored triangle complexes, color-one
//! geodesics and geodesic powers, and the link-expansion audit.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::eigen;

/// A pure complex given by its facets (sorted vertex lists).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    n: usize,
    facets: Vec<Vec<u32>>,
}

impl SimplicialComplex {
    /// Facets are sorted and deduplicated; they must all have the same size.
    pub fn new(n: usize, facets: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let mut facets: Vec<Vec<u32>> = facets
            .into_iter()
            .map(|mut f| {
                f.sort_unstable();
                f
            })
            .collect();
        facets.sort();
        facets.dedup();
        if let Some(first) = facets.first() {
            if facets.iter().any(|f| f.len() != first.len()) {
                return Err(Error::Invalid("complex is not pure".into()));
            }
        }
        if facets.iter().flatten().any(|&v| v as usize >= n) {
            return Err(Error::Invalid("facet vertex out of range".into()));
        }
        Ok(Self { n, facets })
    }

    /// Vertex-count bound used for ids (vertices need not all occur).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Vec<u32>] {
        &self.facets
    }

    /// Dimension of the facets; `-1` for the empty complex `{∅}`.
    pub fn dim(&self) -> i32 {
        self.facets.first().map_or(-1, |f| f.len() as i32 - 1)
    }

    pub fn vertices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.facets.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// All cells of dimension `k`, sorted.
    pub fn cells(&self, k: usize) -> Vec<Vec<u32>> {
        let mut out = HashSet::new();
        for f in &self.facets {
            for_each_subset(f, k + 1, &mut |s| {
                out.insert(s.to_vec());
            });
        }
        let mut out: Vec<_> = out.into_iter().collect();
        out.sort();
        out
    }

    pub fn is_cell(&self, tau: &[u32]) -> bool {
        let mut t = tau.to_vec();
        t.sort_unstable();
        tau.is_empty() || self.facets.iter().any(|f| is_sorted_subset(&t, f))
    }

    /// The link `X_τ`: facets containing `τ` with `τ` removed.
    pub fn link(&self, tau: &[u32]) -> Result<SimplicialComplex> {
        let mut t = tau.to_vec();
        t.sort_unstable();
        if !self.is_cell(&t) {
            return Err(Error::Invalid(format!("{tau:?} is not a cell")));
        }
        let facets = self
            .facets
            .iter()
            .filter(|f| is_sorted_subset(&t, f))
            .map(|f| f.iter().copied().filter(|v| t.binary_search(v).is_err()).collect());
        SimplicialComplex::new(self.n, facets)
    }

    /// Vertices and edges, relabeled by position in `vertices()`.
    pub fn one_skeleton(&self) -> (Graph, Vec<u32>) {
        let verts = self.vertices();
        let pos: HashMap<u32, u32> = verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let mut edges = Vec::new();
        for f in &self.facets {
            for (i, a) in f.iter().enumerate() {
                for b in &f[i + 1..] {
                    edges.push((pos[a], pos[b]));
                }
            }
        }
        (Graph::from_edges(verts.len(), edges), verts)
    }
}

fn is_sorted_subset(small: &[u32], big: &[u32]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

fn for_each_subset(set: &[u32], k: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(set: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..set.len() {
            cur.push(set[i]);
            rec(set, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(set, k, 0, &mut Vec::with_capacity(k), f);
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkAudit {
    pub cell: Vec<u32>,
    pub vertices: usize,
    pub mu: f64,
    pub disconnected: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HdxAudit {
    pub lambda: f64,
    pub max_mu: f64,
    pub links: usize,
    pub disconnected: usize,
    pub degenerate: usize,
    pub pass: bool,
    /// `μ/(1 − μ·d)` for the measured maximum, when it is below `1/d`.
    pub global_bound: Option<f64>,
    pub worst: Vec<LinkAudit>,
}

/// Second largest eigenvalue of the normalized adjacency of every codimension-2
/// link, compared against `lambda`.
pub fn hdx_audit(x: &SimplicialComplex, lambda: f64) -> Result<HdxAudit> {
    let d = x.dim();
    if d < 1 {
        return Err(Error::Invalid("audit needs a complex of dimension ≥ 1".into()));
    }
    let taus: Vec<Vec<u32>> = if d == 1 { vec![vec![]] } else { x.cells(d as usize - 2) };
    let mut audits = Vec::with_capacity(taus.len());
    for tau in taus {
        let link = x.link(&tau)?;
        let (g, _) = link.one_skeleton();
        let degenerate = g.n() <= 2;
        let disconnected = !g.is_connected();
        let mu = if disconnected {
            1.0
        } else if g.n() < 2 {
            0.0
        } else {
            let ev = eigen::dense_symmetric_eigenvalues(&g.normalized_adjacency());
            ev[ev.len() - 2]
        };
        audits.push(LinkAudit {
            cell: tau,
            vertices: g.n(),
            mu,
            disconnected,
            degenerate,
        });
    }
    let max_mu = audits.iter().map(|a| a.mu).fold(f64::NEG_INFINITY, f64::max);
    let disconnected = audits.iter().filter(|a| a.disconnected).count();
    let degenerate = audits.iter().filter(|a| a.degenerate).count();
    let df = d as f64;
    let global_bound = (max_mu < 1.0 / df).then(|| max_mu / (1.0 - max_mu * df));
    let links = audits.len();
    audits.sort_by(|a, b| b.mu.total_cmp(&a.mu));
    audits.truncate(5);
    Ok(HdxAudit {
        lambda,
        max_mu,
        links,
        disconnected,
        degenerate,
        pass: max_mu <= lambda + 1e-12 && disconnected == 0 && degenerate == 0,
        global_bound,
        worst: audits,
    })
}

/// A pure 2-dimensional complex with directed edges colored by `{1, 2}`;
/// `col(w → v) = 3 − col(v → w)`.
#[derive(Clone, Debug)]
pub struct ColoredComplex {
    /// `out[0][v]`: color-1 out-neighbors, `out[1][v]`: color-2 out-neighbors.
    out: [Vec<Vec<u32>>; 2],
    triangles: Vec<[u32; 3]>,
    triangle_set: HashSet<[u32; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ComplexHeader {
    format: String,
    vertices: usize,
    triangles: usize,
}

const COMPLEX_FORMAT: &str = "hdx-colored-complex-v1";

impl ColoredComplex {
    /// `out1[v]` lists the `w` with `col(v → w) = 1`. Every triangle must be a
    /// directed color-1 3-cycle, which is exactly the condition that it admits
    /// a vertex coloring inducing the edge colors.
    pub fn new(out1: Vec<Vec<u32>>, triangles: impl IntoIterator<Item = [u32; 3]>) -> Result<Self> {
        let n = out1.len();
        let mut out1 = out1;
        for l in &mut out1 {
            l.sort_unstable();
            l.dedup();
        }
        let mut out2 = vec![Vec::new(); n];
        for (v, l) in out1.iter().enumerate() {
            for &w in l {
                if w as usize >= n || w as usize == v {
                    return Err(Error::Invalid(format!("bad color-1 edge {v} -> {w}")));
                }
                out2[w as usize].push(v as u32);
            }
        }
        for l in &mut out2 {
            l.sort_unstable();
        }
        for v in 0..n {
            if out1[v].iter().any(|w| out2[v].binary_search(w).is_ok()) {
                return Err(Error::Invalid(format!("an edge at {v} carries both colors")));
            }
        }
        let mut x = Self {
            out: [out1, out2],
            triangles: Vec::new(),
            triangle_set: HashSet::new(),
        };
        for t in triangles {
            let mut s = t;
            s.sort_unstable();
            let [a, b, c] = s;
            let cycle = |u, v, w| x.color(u, v) == Some(1) && x.color(v, w) == Some(1) && x.color(w, u) == Some(1);
            if !(cycle(a, b, c) || cycle(a, c, b)) {
                return Err(Error::Invalid(format!(
                    "triangle {s:?} is not a directed color-1 cycle"
                )));
            }
            if x.triangle_set.insert(s) {
                x.triangles.push(s);
            }
        }
        x.triangles.sort_unstable();
        Ok(x)
    }

    pub fn n(&self) -> usize {
        self.out[0].len()
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Out-neighbors along edges of color `c ∈ {1, 2}`.
    pub fn out_neighbors(&self, v: u32, c: u8) -> &[u32] {
        &self.out[c as usize - 1][v as usize]
    }

    pub fn color(&self, v: u32, w: u32) -> Option<u8> {
        if self.out[0][v as usize].binary_search(&w).is_ok() {
            Some(1)
        } else if self.out[1][v as usize].binary_search(&w).is_ok() {
            Some(2)
        } else {
            None
        }
    }

    pub fn is_triangle(&self, a: u32, b: u32, c: u32) -> bool {
        let mut s = [a, b, c];
        s.sort_unstable();
        self.triangle_set.contains(&s)
    }

    /// Undirected one-skeleton.
    pub fn graph(&self) -> Graph {
        let adj = (0..self.n())
            .map(|v| {
                let mut l = self.out[0][v].clone();
                l.extend_from_slice(&self.out[1][v]);
                l
            })
            .collect();
        Graph::from_adjacency(adj)
    }

    pub fn to_simplicial(&self) -> SimplicialComplex {
        SimplicialComplex::new(self.n(), self.triangles.iter().map(|t| t.to_vec()))
            .expect("triangles are valid facets")
    }

    /// Visits every geodesic of color `c` and length `r` starting at `v`.
    pub fn for_each_geodesic(&self, v: u32, r: usize, c: u8, f: &mut impl FnMut(&[u32])) {
        let mut path = Vec::with_capacity(r + 1);
        path.push(v);
        self.extend_geodesic(&mut path, r, c, f);
    }

    fn extend_geodesic(&self, path: &mut Vec<u32>, r: usize, c: u8, f: &mut impl FnMut(&[u32])) {
        if path.len() == r + 1 {
            f(path);
            return;
        }
        let k = path.len();
        let last = path[k - 1];
        for &w in self.out_neighbors(last, c) {
            if k >= 2 {
                let prev = path[k - 2];
                if w == prev || self.is_triangle(prev, last, w) {
                    continue;
                }
            }
            path.push(w);
            self.extend_geodesic(path, r, c, f);
            path.pop();
        }
    }

    /// All color-1 `r`-geodesics from `v`.
    pub fn geodesics(&self, v: u32, r: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        self.for_each_geodesic(v, r, 1, &mut |p| out.push(p.to_vec()));
        out
    }

    /// Endpoints of color-`c` `r`-geodesics from `v`, with multiplicity.
    pub fn geodesic_endpoints(&self, v: u32, r: usize, c: u8) -> Vec<u32> {
        let mut out = Vec::new();
        self.for_each_geodesic(v, r, c, &mut |p| out.push(p[r]));
        out
    }

    /// The full geodesic `r`-power.
    pub fn geodesic_power(&self, r: usize) -> PowerComplex {
        let n = self.n();
        let ends: Vec<Vec<u32>> = (0..n as u32)
            .map(|v| self.geodesic_endpoints(v, r, 1))
            .collect();
        let mut edges: HashMap<(u32, u32), PowerEdge> = HashMap::new();
        for (v, l) in ends.iter().enumerate() {
            let v = v as u32;
            for &w in l {
                if w == v {
                    continue;
                }
                let e = edges.entry((v.min(w), v.max(w))).or_default();
                if v < w {
                    e.forward += 1;
                } else {
                    e.backward += 1;
                }
            }
        }
        let sets: Vec<HashSet<u32>> = ends.iter().map(|l| l.iter().copied().collect()).collect();
        let mut triangles = HashSet::new();
        for a in 0..n as u32 {
            for &b in &sets[a as usize] {
                for &c in &sets[b as usize] {
                    if a != b && b != c && c != a && sets[c as usize].contains(&a) {
                        triangles.insert(canonical_rotation([a, b, c]));
                    }
                }
            }
        }
        let mut triangles: Vec<_> = triangles.into_iter().collect();
        triangles.sort_unstable();
        PowerComplex {
            n,
            r,
            edges,
            triangles,
        }
    }

    /// One-skeleton of the link of `center` in the geodesic `r`-power, computed
    /// locally: `b ∈ S¹(center)`, `c ∈ S¹(b) ∩ S²(center)`. Returns the graph on
    /// the link vertices (sorted ids) and the id list.
    pub fn power_vertex_link(&self, center: u32, r: usize) -> (Graph, Vec<u32>) {
        let s1: HashSet<u32> = self.geodesic_endpoints(center, r, 1).into_iter().collect();
        let s2: HashSet<u32> = self.geodesic_endpoints(center, r, 2).into_iter().collect();
        let mut edges = Vec::new();
        for &b in &s1 {
            let from_b: HashSet<u32> = self.geodesic_endpoints(b, r, 1).into_iter().collect();
            for &c in &from_b {
                if c != center && c != b && s2.contains(&c) {
                    edges.push((b, c));
                }
            }
        }
        let mut verts: Vec<u32> = edges.iter().flat_map(|&(b, c)| [b, c]).collect();
        verts.sort_unstable();
        verts.dedup();
        let pos: HashMap<u32, u32> = verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let g = Graph::from_edges(verts.len(), edges.iter().map(|(b, c)| (pos[b], pos[c])));
        (g, verts)
    }

    /// Writes a JSON header line, then `a b c col(a→b) col(b→c) col(c→a)` per triangle.
    pub fn write(&self, mut w: impl Write) -> Result<()> {
        let header = ComplexHeader {
            format: COMPLEX_FORMAT.into(),
            vertices: self.n(),
            triangles: self.triangles.len(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for &[a, b, c] in &self.triangles {
            let col = |u, v| self.color(u, v).unwrap();
            writeln!(w, "{a} {b} {c} {} {} {}", col(a, b), col(b, c), col(c, a))?;
        }
        Ok(())
    }

    /// Reads the format produced by [`ColoredComplex::write`]; the edge set is
    /// the union of triangle edges.
    pub fn read(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header: ComplexHeader = match lines.next() {
            Some(l) => serde_json::from_str(&l?)?,
            None => return Err(Error::Invalid("empty complex file".into())),
        };
        if header.format != COMPLEX_FORMAT {
            return Err(Error::Invalid(format!("unknown format {}", header.format)));
        }
        let mut out1 = vec![Vec::new(); header.vertices];
        let mut tris = Vec::with_capacity(header.triangles);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Invalid(format!("bad line `{line}`"))))
                .collect::<Result<_>>()?;
            let [a, b, c, cab, cbc, cca] = f[..] else {
                return Err(Error::Invalid(format!("bad line `{line}`")));
            };
            if f[..3].iter().any(|&v| v as usize >= header.vertices) {
                return Err(Error::Invalid(format!("vertex out of range in `{line}`")));
            }
            for (u, v, col) in [(a, b, cab), (b, c, cbc), (c, a, cca)] {
                match col {
                    1 => out1[u as usize].push(v),
                    2 => out1[v as usize].push(u),
                    _ => return Err(Error::Invalid(format!("bad color in `{line}`"))),
                }
            }
            tris.push([a, b, c]);
        }
        Self::new(out1, tris)
    }
}

/// Rotates a directed 3-cycle so that its least vertex comes first.
pub fn canonical_rotation(t: [u32; 3]) -> [u32; 3] {
    let i = (0..3).min_by_key(|&i| t[i]).unwrap();
    [t[i], t[(i + 1) % 3], t[(i + 2) % 3]]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PowerEdge {
    /// Number of color-1 geodesics from the smaller to the larger endpoint.
    pub forward: u32,
    /// Number of color-1 geodesics from the larger to the smaller endpoint.
    pub backward: u32,
}

impl PowerEdge {
    pub fn multiplicity(&self) -> u32 {
        self.forward + self.backward
    }
}

#[derive(Clone, Debug)]
pub struct PowerComplex {
    pub n: usize,
    pub r: usize,
    /// Keyed by `(min, max)` endpoint.
    pub edges: HashMap<(u32, u32), PowerEdge>,
    /// Directed 3-cycles `a → b → c → a` of geodesics, least vertex first.
    pub triangles: Vec<[u32; 3]>,
}

impl PowerComplex {
    /// Color of a power edge read in its geodesic direction.
    pub fn edge_color(&self) -> u32 {
        (self.r % 3) as u32
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.n, self.edges.keys().copied())
    }

    /// Triangles as a simplicial complex (isolated vertices are dropped).
    pub fn to_simplicial(&self) -> SimplicialComplex {
        SimplicialComplex::new(self.n, self.triangles.iter().map(|t| t.to_vec()))
            .expect("triangles are valid facets")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two triangles glued along an edge, colored by vertex class mod 3.
    fn two_triangles() -> ColoredComplex {
        // vertex colors: 0 → 0, 1 → 1, 2 → 2, 3 → 2
        let col = [0u32, 1, 2, 2];
        let edges = [(0u32, 1u32), (1, 2), (0, 2), (1, 3), (0, 3)];
        let mut out1 = vec![Vec::new(); 4];
        for (u, v) in edges {
            if (col[v as usize] + 3 - col[u as usize]) % 3 == 1 {
                out1[u as usize].push(v);
            } else {
                out1[v as usize].push(u);
            }
        }
        ColoredComplex::new(out1, [[0, 1, 2], [0, 1, 3]]).unwrap()
    }

    #[test]
    fn link_of_empty_is_whole_complex() {
        let x = two_triangles().to_simplicial();
        assert_eq!(x.link(&[]).unwrap(), x);
        let l = x.link(&[0, 1]).unwrap();
        assert_eq!(l.vertices(), vec![2, 3]);
        assert_eq!(l.dim(), 0);
        assert!(x.link(&[2, 3]).is_err());
    }

    #[test]
    fn geodesic_rejects_triangle_closure() {
        let x = two_triangles();
        // 0 → 1 → 2 closes the triangle {0,1,2}; 0 → 1 → 3 closes {0,1,3}.
        assert!(x.geodesics(0, 2).is_empty());
        assert_eq!(x.geodesics(0, 1), vec![vec![0, 1]]);
    }

    #[test]
    fn file_round_trip() {
        let x = two_triangles();
        let mut buf = Vec::new();
        x.write(&mut buf).unwrap();
        let y = ColoredComplex::read(buf.as_slice()).unwrap();
        assert_eq!(y.triangles(), x.triangles());
        assert_eq!(y.color(0, 1), Some(1));
    }

    #[test]
    fn rejects_badly_colored_triangle() {
        let out1 = vec![vec![1, 2], vec![2], vec![]];
        assert!(ColoredComplex::new(out1, [[0, 1, 2]]).is_err());
    }

    #[test]
    fn single_triangle_links_are_degenerate() {
        let x = SimplicialComplex::new(3, [vec![0, 1, 2]]).unwrap();
        let audit = hdx_audit(&x, 0.5).unwrap();
        assert_eq!(audit.degenerate, 3);
        assert!(!audit.pass);
    }

    #[test]
    fn power_one_is_original() {
        let x = two_triangles();
        let p = x.geodesic_power(1);
        let mut tris: Vec<[u32; 3]> = p.triangles.iter().map(|t| {
            let mut s = *t;
            s.sort_unstable();
            s
        }).collect();
        tris.sort_unstable();
        assert_eq!(tris, x.triangles());
        assert_eq!(p.edges.len(), 5);
    }

    #[test]
    fn isolated_vertex_has_no_power_edges() {
        let mut out1 = two_triangles().out[0].clone();
        out1.push(Vec::new());
        let x = ColoredComplex::new(out1, [[0, 1, 2], [0, 1, 3]]).unwrap();
        let p = x.geodesic_power(2);
        assert!(p.graph().neighbors(4).is_empty());
    }
}
