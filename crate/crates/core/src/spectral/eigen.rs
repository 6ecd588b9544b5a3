//! Dense and Lanczos eigensolvers for symmetric operators.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest dimension handled by the dense solver in [`eigensolve`].
pub const DENSE_LIMIT: usize = 4000;

/// A symmetric linear operator on `R^n`, applied matrix-free.
pub trait Operator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl Operator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            *yi = (0..n).map(|j| self[(i, j)] * x[j]).sum();
        });
    }
}

/// Adjacency operator of a graph, optionally normalized as `D^{-1/2} A D^{-1/2}`.
pub struct GraphOperator<'a> {
    graph: &'a Graph,
    scale: Option<Vec<f64>>,
}

impl<'a> GraphOperator<'a> {
    pub fn adjacency(graph: &'a Graph) -> Self {
        Self { graph, scale: None }
    }
    pub fn normalized(graph: &'a Graph) -> Self {
        let scale = (0..graph.n() as u32)
            .map(|v| match graph.degree(v) {
                0 => 0.0,
                d => 1.0 / (d as f64).sqrt(),
            })
            .collect();
        Self {
            graph,
            scale: Some(scale),
        }
    }
}

impl Operator for GraphOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match &self.scale {
            None => y.par_iter_mut().enumerate().for_each(|(v, yv)| {
                *yv = self.graph.neighbors(v as u32).iter().map(|&w| x[w as usize]).sum();
            }),
            Some(s) => y.par_iter_mut().enumerate().for_each(|(v, yv)| {
                let acc: f64 = self
                    .graph
                    .neighbors(v as u32)
                    .iter()
                    .map(|&w| s[w as usize] * x[w as usize])
                    .sum();
                *yv = s[v] * acc;
            }),
        }
    }
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn dense_symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest `|m − mᵀ|` entry.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Materializes an operator as a dense matrix by applying it to unit vectors.
pub fn materialize(op: &dyn Operator) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct LanczosConfig {
    pub k: usize,
    /// Required residual `‖Av − θv‖` for unit Ritz vectors.
    pub tol: f64,
    pub subspace: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl LanczosConfig {
    pub fn top(k: usize, tol: f64) -> Self {
        Self {
            k,
            tol,
            subspace: (3 * k + 20).max(30),
            max_restarts: 500,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    /// Largest eigenvalues, descending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// Explicit residuals `‖Av − θv‖` of the returned unit vectors.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    pub restarts: usize,
}

/// Fixed chunking keeps the summation order independent of the thread count.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

fn axpy(y: &mut [f64], c: f64, x: &[f64]) {
    y.par_iter_mut().zip(x).for_each(|(yi, xi)| *yi += c * xi);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalizes `w` against `basis` (two Gram–Schmidt passes), returning the
/// accumulated coefficients.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>], extra: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for u in extra {
            let c = dot(u, w);
            axpy(w, -c, u);
        }
        for (i, u) in basis.iter().enumerate() {
            let c = dot(u, w);
            axpy(w, -c, u);
            coeffs[i] += c;
        }
    }
    coeffs
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, basis: &[Vec<f64>], extra: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        orthogonalize(&mut v, basis, extra);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return v;
        }
    }
}

/// Thick-restart Lanczos with full reorthogonalization for the `k` largest
/// eigenvalues, on the orthogonal complement of the orthonormal `deflate` set.
pub fn lanczos_top(op: &dyn Operator, deflate: &[Vec<f64>], cfg: &LanczosConfig) -> Result<LanczosResult> {
    let n = op.dim();
    let avail = n.saturating_sub(deflate.len());
    if cfg.k == 0 || cfg.k > avail {
        return Err(Error::Invalid(format!("cannot compute {} eigenvalues in dimension {avail}", cfg.k)));
    }
    let m = cfg.subspace.max(cfg.k + 2).min(avail);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut basis: Vec<Vec<f64>> = vec![random_unit(n, &mut rng, &[], deflate)];
    let mut h = DMatrix::<f64>::zeros(m, m);
    let mut matvecs = 0;
    let mut best_residual = f64::INFINITY;
    for restart in 0..=cfg.max_restarts {
        // Expand to m basis vectors; column j of h holds ⟨v_i, A v_j⟩.
        let mut last = None;
        while last.is_none() {
            let j = basis.len() - 1;
            let mut w = vec![0.0; n];
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let coeffs = orthogonalize(&mut w, &basis, deflate);
            for (i, &c) in coeffs.iter().enumerate() {
                h[(i, j)] = c;
                h[(j, i)] = c;
            }
            let beta = norm(&w);
            if basis.len() == m {
                last = Some((w, beta));
            } else if beta <= 1e-10 * (1.0 + h[(j, j)].abs()) {
                // Invariant subspace: continue with a fresh direction.
                let v = random_unit(n, &mut rng, &basis, deflate);
                basis.push(v);
            } else {
                w.iter_mut().for_each(|x| *x /= beta);
                basis.push(w);
            }
        }
        let (f, beta) = last.unwrap();
        let hs = (&h + h.transpose()) * 0.5;
        let eig = hs.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let res: Vec<f64> = order.iter().map(|&i| (beta * eig.eigenvectors[(m - 1, i)]).abs()).collect();
        let worst = res[..cfg.k].iter().copied().fold(0.0, f64::max);
        best_residual = best_residual.min(worst);
        let ritz = |cols: &[usize]| -> Vec<Vec<f64>> {
            cols.par_iter()
                .map(|&c| {
                    let mut x = vec![0.0; n];
                    for (j, b) in basis.iter().enumerate() {
                        let y = eig.eigenvectors[(j, c)];
                        if y != 0.0 {
                            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += y * bi);
                        }
                    }
                    x
                })
                .collect()
        };
        if worst <= cfg.tol * 0.5 || m == avail {
            let vectors = ritz(&order[..cfg.k]);
            let values: Vec<f64> = order[..cfg.k].iter().map(|&i| eig.eigenvalues[i]).collect();
            let mut residuals = Vec::with_capacity(cfg.k);
            for (x, &theta) in vectors.iter().zip(&values) {
                let mut ax = vec![0.0; n];
                op.apply(x, &mut ax);
                matvecs += 1;
                axpy(&mut ax, -theta, x);
                residuals.push(norm(&ax) / norm(x));
            }
            if residuals.iter().all(|&r| r <= cfg.tol) || m == avail {
                return Ok(LanczosResult {
                    values,
                    vectors,
                    residuals,
                    matvecs,
                    restarts: restart,
                });
            }
        }
        let keep = (cfg.k + (m - cfg.k) / 2).min(m - 1);
        let mut new_basis = ritz(&order[..keep]);
        h.fill(0.0);
        for (i, &c) in order[..keep].iter().enumerate() {
            h[(i, i)] = eig.eigenvalues[c];
        }
        if beta > 1e-14 {
            let mut f = f;
            f.iter_mut().for_each(|x| *x /= beta);
            new_basis.push(f);
        } else {
            let v = random_unit(n, &mut rng, &new_basis, deflate);
            new_basis.push(v);
        }
        basis = new_basis;
    }
    Err(Error::NonConvergence {
        residual: best_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericSpectrum {
    /// Largest eigenvalues, descending (all of them for the dense method).
    pub values: Vec<f64>,
    pub method: Method,
    pub max_residual: f64,
}

/// Top `k` eigenvalues of a symmetric operator (all of them when `k = 0` and
/// the dense path is used).
pub fn eigensolve(op: &dyn Operator, k: usize, mode: Mode, tol: f64) -> Result<NumericSpectrum> {
    let n = op.dim();
    let dense = match mode {
        Mode::Auto => n <= DENSE_LIMIT,
        Mode::Dense => true,
        Mode::Lanczos => false,
    };
    if dense {
        let m = materialize(op);
        let asym = asymmetry(&m);
        if asym > 1e-9 {
            return Err(Error::NotSymmetric(asym));
        }
        let mut values = dense_symmetric_eigenvalues(&m);
        values.reverse();
        if k > 0 {
            values.truncate(k);
        }
        return Ok(NumericSpectrum {
            values,
            method: Method::Dense,
            max_residual: 0.0,
        });
    }
    let res = lanczos_top(op, &[], &LanczosConfig::top(k.max(1), tol))?;
    Ok(NumericSpectrum {
        max_residual: res.residuals.iter().copied().fold(0.0, f64::max),
        values: res.values,
        method: Method::Lanczos,
    })
}

/// Groups sorted values into `(value, multiplicity)` clusters within `tol`.
pub fn cluster(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for x in v {
        match out.last_mut() {
            Some((_, count, last)) if (x - *last).abs() <= tol => {
                *count += 1;
                *last = x;
            }
            _ => out.push((x, 1, x)),
        }
    }
    out.into_iter().map(|(x, c, _)| (x, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heawood() -> Graph {
        // Points i, lines 7 + j; line j = {j, j+1, j+3} mod 7.
        let mut edges = Vec::new();
        for j in 0..7u32 {
            for d in [0, 1, 3] {
                edges.push(((j + d) % 7, 7 + j));
            }
        }
        Graph::from_edges(14, edges)
    }

    #[test]
    fn heawood_spectrum() {
        let g = heawood();
        let ev = eigensolve(&GraphOperator::adjacency(&g), 0, Mode::Dense, 1e-10).unwrap();
        let c = cluster(&ev.values, 1e-8);
        let s2 = 2f64.sqrt();
        let expect = [(-3.0, 1), (-s2, 6), (s2, 6), (3.0, 1)];
        assert_eq!(c.len(), 4);
        for ((v, m), (ev, em)) in c.iter().zip(expect) {
            assert!((v - ev).abs() < 1e-9);
            assert_eq!(*m, em);
        }
    }

    #[test]
    fn disconnected_cliques_have_repeated_top() {
        let mut edges = Vec::new();
        for off in [0u32, 4] {
            for a in 0..4 {
                for b in a + 1..4 {
                    edges.push((off + a, off + b));
                }
            }
        }
        let g = Graph::from_edges(8, edges);
        let ev = eigensolve(&GraphOperator::adjacency(&g), 2, Mode::Dense, 1e-10).unwrap();
        assert!((ev.values[0] - ev.values[1]).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense_on_cycle_products() {
        // Path-like graph with distinct eigenvalues: a 300-cycle plus chords.
        let n = 300u32;
        let mut edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        edges.extend((0..n).step_by(7).map(|i| (i, (i + 50) % n)));
        let g = Graph::from_edges(n as usize, edges);
        let op = GraphOperator::adjacency(&g);
        let dense = eigensolve(&op, 5, Mode::Dense, 1e-10).unwrap();
        let lz = lanczos_top(&op, &[], &LanczosConfig::top(5, 1e-9)).unwrap();
        for (a, b) in dense.values.iter().zip(&lz.values) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(lz.residuals.iter().all(|&r| r <= 1e-9));
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eigensolve(&m, 0, Mode::Dense, 1e-9), Err(Error::NotSymmetric(_))));
    }
}
