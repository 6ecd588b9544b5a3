//! Balls and spheres around the standard vertex of the Ã₂ building of
//! `PGL_3(F)`, for `F = Q_p` or `F_q((t))`.
//!
//! A vertex is a homothety class of lattices; it is stored as the unique
//! representative `π^R O³ ≤ L ≤ O³` with `L ⊄ πO³`, in column Hermite form
//! over `O/π^(R+2)`: `L = H·O³` with `H` upper triangular, `H_ii = π^(a_i)`
//! and `H_ij` (`i < j`) reduced modulo `π^(a_i)`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::ColoredComplex;
use crate::error::{overflow, Error, Result};
use crate::graph::Graph;
use crate::ring::{LocalRing, RingElem, RingKind};
use crate::smith::{smith_form, Matrix};
use crate::spectral::eigen::{self, GraphOperator, LanczosConfig};
use crate::spectral::mixing::{self, CutReport};

/// Largest ball (in vertices) that [`build_ball`] will construct.
pub const MAX_BALL_VERTICES: u128 = 3_000_000;

/// Row-major upper-triangular Hermite form.
pub type Lattice = [RingElem; 9];

type Col = [RingElem; 3];

/// `|S_r| = q^(2r−3)(qr+q+r−1)(q²+q+1)` for `r ≥ 1`, and 1 for `r = 0`.
pub fn sphere_size(q: u64, r: u32) -> u64 {
    if r == 0 {
        return 1;
    }
    // q^(2r−3) may be fractional at r = 1; multiply first.
    let num = (q * r as u64 + q + r as u64 - 1) * (q * q + q + 1) * q.pow(2 * r);
    num / q.pow(3)
}

/// The Weyl-length count `|X_{a,b,c}|` (with `min(a,b,c) = 0`).
pub fn stratum_size(q: u64, [a, b, c]: [u32; 3]) -> u64 {
    let m = a.max(b).max(c);
    let shift = if a >= b && b >= c {
        0
    } else if (a >= c && c > b) || (b > a && a >= c) {
        1
    } else if (b >= c && c > a) || (c > a && a >= b) {
        2
    } else {
        3
    };
    q.pow(2 * m - shift.min(2 * m))
}

/// Column Hermite form of the lattice spanned by `gens` together with
/// `π^(P−1)·O³`; the result is divided by `π` when it lies in `πO³`.
pub fn hermite(ring: &LocalRing, gens: &[Col]) -> Lattice {
    let h = hermite_raw(ring, gens);
    if h.iter().all(|&x| ring.val(x) >= 1) {
        let cols: Vec<Col> = (0..3)
            .map(|j| [0, 1, 2].map(|i| ring.div_pi_pow(h[i * 3 + j], 1)))
            .collect();
        hermite_raw(ring, &cols)
    } else {
        h
    }
}

fn hermite_raw(ring: &LocalRing, gens: &[Col]) -> Lattice {
    let top = ring.pi_pow(ring.r() - 1);
    let mut avail: Vec<Col> = gens.iter().copied().filter(|c| c.iter().any(|&x| x != 0)).collect();
    avail.extend([[top, 0, 0], [0, top, 0], [0, 0, top]]);
    let mut piv = [[0u64; 3]; 3];
    let mut exps = [0u32; 3];
    for i in (0..3).rev() {
        let (idx, _) = avail
            .iter()
            .enumerate()
            .map(|(k, c)| (k, ring.val(c[i])))
            .min_by_key(|&(k, v)| (v, k))
            .expect("lattice has full rank");
        let mut c = avail.swap_remove(idx);
        let (a, unit) = ring.split(c[i]);
        let inv = ring.inv(unit).expect("unit part");
        c = c.map(|x| ring.mul(x, inv));
        for o in avail.iter_mut() {
            if o[i] != 0 {
                let f = ring.div_exact(o[i], c[i]);
                for k in 0..3 {
                    o[k] = ring.sub(o[k], ring.mul(f, c[k]));
                }
            }
        }
        avail.retain(|o| o.iter().any(|&x| x != 0));
        piv[i] = c;
        exps[i] = a;
    }
    for i in (0..2).rev() {
        for j in i + 1..3 {
            let x = piv[j][i];
            let red = ring.reduce(x, exps[i]);
            if red != x {
                let f = ring.div_pi_pow(ring.sub(x, red), exps[i]);
                let ci = piv[i];
                for k in 0..3 {
                    piv[j][k] = ring.sub(piv[j][k], ring.mul(f, ci[k]));
                }
            }
        }
    }
    let mut h = [0u64; 9];
    for i in 0..3 {
        for j in 0..3 {
            h[i * 3 + j] = piv[j][i];
        }
    }
    h
}

fn columns(h: &Lattice) -> [Col; 3] {
    [0, 1, 2].map(|j| [h[j], h[3 + j], h[6 + j]])
}

/// Valuations of the diagonal of a Hermite form.
pub fn diagonal_exponents(ring: &LocalRing, h: &Lattice) -> [u32; 3] {
    [0, 4, 8].map(|i| ring.val(h[i]))
}

/// Smith exponents (ascending) of `diag(π^e) · H`.
fn scaled_exponents(ring: &LocalRing, h: &Lattice, e: [u32; 3]) -> Vec<u32> {
    let mut m = Matrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            m.set(i, j, ring.mul_pi_pow(h[i * 3 + j], e[i]));
        }
    }
    smith_form(ring, &m).exponents
}

/// The value whose multiplicity drops by one from `before` to `after` while
/// that of its successor rises by one.
fn incremented(before: &[u32], after: &[u32]) -> Option<u32> {
    before.iter().copied().find(|&v| {
        let cnt = |s: &[u32], x: u32| s.iter().filter(|&&y| y == x).count();
        cnt(after, v) + 1 == cnt(before, v) && cnt(after, v + 1) == cnt(before, v + 1) + 1
    })
}

/// The `(a,b,c)` with `L ∈ B·diag(π^a,π^b,π^c)·O³`, `B` the Iwahori subgroup
/// (subdiagonal entries in `πO`). Conjugating `B` by `diag(π,1,1)` and
/// `diag(π,π,1)` lands in `GL_3(O)`, so the Smith exponents of `H`,
/// `diag(π,1,1)H` and `diag(π,π,1)H` are `{a,b,c}`, `{a+1,b,c}` and
/// `{a+1,b+1,c}`.
pub fn stratum(ring: &LocalRing, h: &Lattice) -> Result<[u32; 3]> {
    let e0 = scaled_exponents(ring, h, [0, 0, 0]);
    let e2 = scaled_exponents(ring, h, [1, 0, 0]);
    let e1 = scaled_exponents(ring, h, [1, 1, 0]);
    let bad = || Error::Violation(format!("Smith exponents {e0:?}/{e2:?}/{e1:?} admit no stratum"));
    let a = incremented(&e0, &e2).ok_or_else(bad)?;
    let b = incremented(&e2, &e1).ok_or_else(bad)?;
    let mut rest = e0.clone();
    for v in [a, b] {
        let i = rest.iter().position(|&x| x == v).ok_or_else(bad)?;
        rest.remove(i);
    }
    Ok([a, b, rest[0]])
}

/// Lattices `L'` with `πL < L' < L`: first the `q²+q+1` of index `q`
/// (color +1), then the `q²+q+1` of index `q²` (color +2).
pub fn neighbors(ring: &LocalRing, h: &Lattice) -> Vec<(Lattice, u8)> {
    let f = ring.field();
    let q = f.order();
    let cols = columns(h);
    let pi = ring.pi();
    let scaled: Vec<Col> = cols.iter().map(|c| c.map(|x| ring.mul(x, pi))).collect();
    let lift = |w: [u32; 3]| -> Col {
        let mut v = [0u64; 3];
        for (i, &wi) in w.iter().enumerate() {
            if wi != 0 {
                for k in 0..3 {
                    v[k] = ring.add(v[k], ring.mul(wi as u64, cols[i][k]));
                }
            }
        }
        v
    };
    let projective = projective_points(q);
    let mut out = Vec::with_capacity(2 * projective.len());
    for &phi in &projective {
        // ker φ, φ_j = 1 at the first nonzero coordinate.
        let j = phi.iter().position(|&x| x != 0).unwrap();
        let mut gens = scaled.clone();
        for i in (0..3).filter(|&i| i != j) {
            let mut w = [0u32; 3];
            w[i] = 1;
            w[j] = f.neg(phi[i]);
            gens.push(lift(w));
        }
        out.push((hermite(ring, &gens), 1));
    }
    for &w in &projective {
        let mut gens = scaled.clone();
        gens.push(lift(w));
        out.push((hermite(ring, &gens), 2));
    }
    out
}

/// Points of `P²(F_q)` as normalized vectors (first nonzero coordinate 1).
fn projective_points(q: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for pivot in 0..3 {
        let free = 2 - pivot;
        for code in 0..q.pow(free as u32) {
            let mut v = [0u32; 3];
            v[pivot] = 1;
            let mut c = code;
            for slot in v.iter_mut().skip(pivot + 1) {
                *slot = c % q;
                c /= q;
            }
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Ball {
    ring: LocalRing,
    radius: u32,
    lattices: Vec<Lattice>,
    index: HashMap<Lattice, u32>,
    distance: Vec<u32>,
    color: Vec<u8>,
    strata: Vec<[u32; 3]>,
    graph: Graph,
    out1: Vec<Vec<u32>>,
}

/// Builds the radius-`radius` ball around `O³` by breadth-first search.
/// `kind`/`q` select `Q_p` (`q = p`) or `F_q((t))`.
pub fn build_ball(kind: RingKind, q: u64, radius: u32) -> Result<Ball> {
    let precision = radius + 2;
    let ring = match kind {
        RingKind::Padic => LocalRing::padic(q, precision)?,
        RingKind::Laurent => LocalRing::laurent(q, precision)?,
    };
    let estimate: u128 = (0..=radius).map(|r| sphere_size(q, r) as u128).sum();
    if estimate > MAX_BALL_VERTICES {
        return Err(overflow("building ball vertices", estimate, MAX_BALL_VERTICES));
    }
    let base: Lattice = [1, 0, 0, 0, 1, 0, 0, 0, 1];
    let mut lattices = vec![base];
    let mut index = HashMap::from([(base, 0u32)]);
    let mut distance = vec![0u32];
    let mut adj: Vec<Vec<u32>> = vec![Vec::new()];
    let mut out1: Vec<Vec<u32>> = vec![Vec::new()];
    let mut layer: Vec<u32> = vec![0];
    for d in 0..=radius {
        let nbrs: Vec<Vec<(Lattice, u8)>> = layer
            .par_iter()
            .map(|&v| neighbors(&ring, &lattices[v as usize]))
            .collect();
        let mut next = Vec::new();
        for (&v, list) in layer.iter().zip(nbrs) {
            for (l, col) in list {
                let w = match index.get(&l) {
                    Some(&w) => w,
                    None if d < radius => {
                        let w = lattices.len() as u32;
                        lattices.push(l);
                        index.insert(l, w);
                        distance.push(d + 1);
                        adj.push(Vec::new());
                        out1.push(Vec::new());
                        next.push(w);
                        w
                    }
                    None => continue,
                };
                adj[v as usize].push(w);
                adj[w as usize].push(v);
                if col == 1 {
                    out1[v as usize].push(w);
                } else {
                    out1[w as usize].push(v);
                }
            }
        }
        layer = next;
    }
    for l in &mut out1 {
        l.sort_unstable();
        l.dedup();
    }
    let color = lattices
        .iter()
        .map(|h| (diagonal_exponents(&ring, h).iter().sum::<u32>() % 3) as u8)
        .collect();
    let strata = lattices
        .par_iter()
        .map(|h| stratum(&ring, h))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ball {
        ring,
        radius,
        lattices,
        index,
        distance,
        color,
        strata,
        graph: Graph::from_adjacency(adj),
        out1,
    })
}

impl Ball {
    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }
    pub fn q(&self) -> u64 {
        self.ring.q()
    }
    pub fn radius(&self) -> u32 {
        self.radius
    }
    pub fn len(&self) -> usize {
        self.lattices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }
    pub fn lattice(&self, v: u32) -> &Lattice {
        &self.lattices[v as usize]
    }
    pub fn vertex(&self, l: &Lattice) -> Option<u32> {
        self.index.get(l).copied()
    }
    pub fn distance(&self, v: u32) -> u32 {
        self.distance[v as usize]
    }
    pub fn color(&self, v: u32) -> u8 {
        self.color[v as usize]
    }
    pub fn stratum(&self, v: u32) -> [u32; 3] {
        self.strata[v as usize]
    }
    pub fn graph(&self) -> &Graph {
        &self.graph
    }
    /// Neighbors `w` with `col(v → w) = 1`.
    pub fn out1(&self, v: u32) -> &[u32] {
        &self.out1[v as usize]
    }

    /// `col(v → w)` from the edge construction agrees with the vertex colors.
    pub fn colors_consistent(&self) -> bool {
        (0..self.len() as u32).all(|v| {
            self.out1(v)
                .iter()
                .all(|&w| (self.color(w) + 3 - self.color(v)) % 3 == 1)
        }) && self.graph.edges().all(|(v, w)| self.color(v) != self.color(w))
    }

    /// The ball as a colored triangle complex (its triangles are the 3-cliques).
    pub fn complex(&self) -> Result<ColoredComplex> {
        let mut tris = Vec::new();
        for v in 0..self.len() as u32 {
            for &w in self.out1(v) {
                for &x in self.out1(w) {
                    if self.out1(x).binary_search(&v).is_ok() && v < w && v < x {
                        tris.push([v, w, x]);
                    }
                }
            }
        }
        ColoredComplex::new(self.out1.clone(), tris)
    }

    pub fn sphere(&self, r: u32) -> Sphere {
        let ids: Vec<u32> = (0..self.len() as u32).filter(|&v| self.distance(v) == r).collect();
        let graph = self.graph.induced(&ids);
        let strata = ids.iter().map(|&v| self.stratum(v)).collect();
        Sphere {
            q: self.q(),
            r,
            ids,
            graph,
            strata,
        }
    }
}

/// The induced graph on the vertices at distance `r` from the base vertex.
#[derive(Clone, Debug)]
pub struct Sphere {
    pub q: u64,
    pub r: u32,
    /// Ball vertex ids, in increasing order.
    pub ids: Vec<u32>,
    pub graph: Graph,
    pub strata: Vec<[u32; 3]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumRow {
    pub stratum: [u32; 3],
    pub count: usize,
    pub expected: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereCensus {
    pub q: u64,
    pub r: u32,
    pub size: usize,
    pub expected_size: u64,
    pub strata: Vec<StratumRow>,
    pub stratum_mismatches: usize,
    pub degree_mismatches: usize,
    /// Vertices whose stratum maximum differs from `r`.
    pub distance_mismatches: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HalfSphereCut {
    pub cut: CutReport,
    pub cut_from_complement: u64,
    /// `cut / vol(A)`
    pub ratio: f64,
    pub expected_ratio: f64,
    /// `cut·(q²+q+1)·r == vol(A)·(q²−q+1)` in integers.
    pub exact_match: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayleighWitness {
    /// `None` when the test function vanishes identically (`r = 2`).
    pub quotient: Option<f64>,
    pub cos_2pi_over_r: f64,
    /// `⟨f, D^{1/2}1⟩ / (‖f‖·‖D^{1/2}1‖)`
    pub perron_overlap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereSpectrum {
    pub lambda2: f64,
    pub method: eigen::Method,
    pub residual: f64,
    pub expected: Option<f64>,
}

impl Sphere {
    pub fn census(&self) -> SphereCensus {
        let mut counts: BTreeMap<[u32; 3], usize> = BTreeMap::new();
        for s in &self.strata {
            *counts.entry(*s).or_default() += 1;
        }
        // Every stratum on the hexagon max = r, including empty ones.
        let r = self.r;
        let mut rows = Vec::new();
        for a in 0..=r {
            for b in 0..=r {
                for c in 0..=r {
                    if a.max(b).max(c) == r && a.min(b).min(c) == 0 {
                        let s = [a, b, c];
                        rows.push(StratumRow {
                            stratum: s,
                            count: counts.get(&s).copied().unwrap_or(0),
                            expected: if r == 0 { 1 } else { stratum_size(self.q, s) },
                        });
                    }
                }
            }
        }
        if r == 0 {
            rows = vec![StratumRow {
                stratum: [0, 0, 0],
                count: counts.get(&[0, 0, 0]).copied().unwrap_or(0),
                expected: 1,
            }];
        }
        let stratum_mismatches = rows.iter().filter(|row| row.count as u64 != row.expected).count();
        let distance_mismatches = self.strata.iter().filter(|s| s.iter().max() != Some(&r)).count();
        let degree_mismatches = (0..self.ids.len())
            .filter(|&i| {
                let s = self.strata[i];
                let distinct = {
                    let mut v = s.to_vec();
                    v.sort_unstable();
                    v.dedup();
                    v.len()
                };
                let expected = if distinct == 3 { 2 * self.q } else { self.q + 1 };
                r >= 1 && self.graph.degree(i as u32) as u64 != expected
            })
            .count();
        SphereCensus {
            q: self.q,
            r,
            size: self.ids.len(),
            expected_size: sphere_size(self.q, r),
            strata: rows,
            stratum_mismatches,
            degree_mismatches,
            distance_mismatches,
        }
    }

    /// The explicit sparse cut for odd `r ≥ 3`.
    pub fn half_sphere_cut(&self) -> Result<HalfSphereCut> {
        let r = self.r;
        if r < 3 || r % 2 == 0 {
            return Err(Error::Invalid(format!("half-sphere cut needs odd r ≥ 3, got {r}")));
        }
        let h = (r + 1) / 2;
        let in_a: Vec<bool> = self
            .strata
            .iter()
            .map(|&[a, b, c]| (a >= b && b >= h) || (b > a && a >= c) || (b >= c && c > a) || (c > b && b >= h))
            .collect();
        let cut = mixing::cut(&self.graph, &in_a);
        let complement: Vec<bool> = in_a.iter().map(|x| !x).collect();
        let cut_from_complement = mixing::cut(&self.graph, &complement).cut_edges;
        let q = self.q;
        let (num, den) = (q * q - q + 1, (q * q + q + 1) * r as u64);
        Ok(HalfSphereCut {
            ratio: cut.cut_edges as f64 / cut.volume as f64,
            expected_ratio: num as f64 / den as f64,
            exact_match: cut.cut_edges as u128 * den as u128 == cut.volume as u128 * num as u128,
            cut_from_complement,
            cut,
        })
    }

    /// Rayleigh quotient of `f = sin(2πj/r)` on `X_{r,j,0}` for `M = D^{-1/2}AD^{-1/2}`.
    pub fn rayleigh_witness(&self) -> RayleighWitness {
        let r = self.r;
        let f: Vec<f64> = self
            .strata
            .iter()
            .map(|&[a, b, c]| {
                // sin(2πj/r) is exactly zero when 2j ≡ 0 mod r.
                if a == r && c == 0 && (2 * b) % r != 0 {
                    (2.0 * std::f64::consts::PI * b as f64 / r as f64).sin()
                } else {
                    0.0
                }
            })
            .collect();
        let g = &self.graph;
        let mut mf = vec![0.0; f.len()];
        eigen::Operator::apply(&GraphOperator::normalized(g), &f, &mut mf);
        let ff: f64 = f.iter().map(|x| x * x).sum();
        let mff: f64 = mf.iter().zip(&f).map(|(a, b)| a * b).sum();
        let perron: Vec<f64> = (0..g.n() as u32).map(|v| (g.degree(v) as f64).sqrt()).collect();
        let pn: f64 = perron.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = f.iter().zip(&perron).map(|(a, b)| a * b).sum();
        let nonzero = ff > 0.0;
        RayleighWitness {
            quotient: nonzero.then(|| mff / ff),
            perron_overlap: if nonzero { dot / (ff.sqrt() * pn) } else { 0.0 },
            cos_2pi_over_r: (2.0 * std::f64::consts::PI / r as f64).cos(),
        }
    }

    /// Second largest eigenvalue of `D^{-1/2}AD^{-1/2}`.
    pub fn spectrum(&self, tol: f64) -> Result<SphereSpectrum> {
        let op = GraphOperator::normalized(&self.graph);
        let (lambda2, method, residual) = if self.graph.n() <= eigen::DENSE_LIMIT {
            let ev = eigen::dense_symmetric_eigenvalues(&self.graph.normalized_adjacency());
            (ev[ev.len() - 2], eigen::Method::Dense, 0.0)
        } else {
            let res = eigen::lanczos_top(&op, &[], &LanczosConfig::top(2, tol))?;
            let resid = res.residuals.iter().copied().fold(0.0, f64::max);
            (res.values[1], eigen::Method::Lanczos, resid)
        };
        let q = self.q as f64;
        let expected = match self.r {
            1 => Some(q.sqrt() / (q + 1.0)),
            2 => Some((0.5 + q.sqrt() / (2.0 * (q + 1.0))).sqrt()),
            _ => None,
        };
        Ok(SphereSpectrum {
            lambda2,
            method,
            residual,
            expected,
        })
    }

    /// Best sweep cut along the second eigenvector (usable for any `r`).
    pub fn fiedler_sweep(&self) -> Result<CutReport> {
        let op = GraphOperator::normalized(&self.graph);
        let res = eigen::lanczos_top(&op, &[], &LanczosConfig::top(2, 1e-8))?;
        let score: Vec<f64> = res.vectors[1]
            .iter()
            .enumerate()
            .map(|(v, x)| x / (self.graph.degree(v as u32).max(1) as f64).sqrt())
            .collect();
        Ok(mixing::sweep_cut(&self.graph, &score).0)
    }
}

/// Three conditions on a color-one path `L_0 → … → L_r` of index-`q` steps,
/// tallied over every such path leaving the base vertex.
#[derive(Clone, Debug, Serialize)]
pub struct PathEquivalence {
    pub r: u32,
    pub paths: usize,
    /// `L_r` is free in `L_0/π^r L_0`.
    pub free: usize,
    /// No other color-one path of length `r` joins the endpoints.
    pub unique: usize,
    /// No three consecutive vertices form a triangle.
    pub geodesic: usize,
    /// Paths on which the three conditions do not all agree.
    pub disagreements: usize,
}

impl Ball {
    /// Whether the chain representative `π^k L` of `v` (index `q^r` in `O³`)
    /// is free in `O_r³`.
    fn chain_end_is_free(&self, v: u32, r: u32) -> Result<bool> {
        let h = self.lattice(v);
        let s: u32 = diagonal_exponents(&self.ring, h).iter().sum();
        if s > r || (r - s) % 3 != 0 {
            return Err(Error::Violation(format!("vertex {v} has no index-q^{r} representative")));
        }
        let k = (r - s) / 3;
        Ok(scaled_exponents(&self.ring, h, [k; 3]) == [0, 0, r])
    }

    pub fn path_equivalences(&self, r: u32) -> Result<PathEquivalence> {
        if r == 0 || r > self.radius {
            return Err(Error::Invalid(format!("path length {r} outside 1..={}", self.radius)));
        }
        let mut paths: Vec<Vec<u32>> = vec![vec![0]];
        for _ in 0..r {
            paths = paths
                .iter()
                .flat_map(|p| {
                    let last = *p.last().unwrap();
                    self.out1(last).iter().map(move |&w| {
                        let mut next = p.clone();
                        next.push(w);
                        next
                    })
                })
                .collect();
        }
        let mut per_end: HashMap<u32, usize> = HashMap::new();
        for p in &paths {
            *per_end.entry(p[r as usize]).or_default() += 1;
        }
        let mut report = PathEquivalence {
            r,
            paths: paths.len(),
            free: 0,
            unique: 0,
            geodesic: 0,
            disagreements: 0,
        };
        for p in &paths {
            let end = p[r as usize];
            let free = self.chain_end_is_free(end, r)?;
            let unique = per_end[&end] == 1;
            let geodesic = p
                .windows(3)
                .all(|w| self.out1(w[2]).binary_search(&w[0]).is_err());
            report.free += free as usize;
            report.unique += unique as usize;
            report.geodesic += geodesic as usize;
            report.disagreements += !(free == unique && unique == geodesic) as usize;
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_size_formula() {
        assert_eq!(sphere_size(2, 1), 14);
        assert_eq!(sphere_size(2, 3), 560);
        assert_eq!(sphere_size(3, 2), 390);
    }

    #[test]
    fn stratum_table_examples() {
        assert_eq!(stratum_size(2, [2, 2, 0]), 16);
        assert_eq!(stratum_size(2, [0, 1, 2]), 2);
        assert_eq!(stratum_size(2, [1, 0, 0]), 4);
        assert_eq!(stratum_size(2, [0, 0, 1]), 1);
    }

    #[test]
    fn base_and_first_sphere() {
        let ball = build_ball(RingKind::Padic, 2, 1).unwrap();
        assert_eq!(ball.len(), 15);
        assert_eq!(ball.stratum(0), [0, 0, 0]);
        assert_eq!(ball.color(0), 0);
        assert_eq!(ball.graph().degree(0), 14);
        assert_eq!(ball.out1(0).len(), 7);
        assert!(ball.colors_consistent());
        // O ⊕ O ⊕ πO is fixed by the Iwahori subgroup.
        let v = ball.vertex(&[1, 0, 0, 0, 1, 0, 0, 0, 2]).unwrap();
        assert_eq!(ball.stratum(v), [0, 0, 1]);
    }

    #[test]
    fn hermite_is_canonical() {
        let ring = LocalRing::padic(3, 4).unwrap();
        // Same lattice from different generating sets.
        let a = hermite(&ring, &[[1, 5, 0], [0, 3, 0], [0, 0, 9]]);
        let b = hermite(&ring, &[[1, 2, 0], [2, 7, 0], [0, 0, 9], [0, 6, 0]]);
        assert_eq!(a, b);
    }
}
