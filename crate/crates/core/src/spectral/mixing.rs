//! Edge counts between vertex sets: the expander mixing bound and conductance.

use serde::Serialize;

use crate::graph::Graph;

#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub size_s: usize,
    pub size_t: usize,
    /// Ordered pairs `(s, t) ∈ S × T` that are edges.
    pub edges: u64,
    pub main_term: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `|E(S,T)|` with `λ₁|S||T|/n + λ₂√(|S||T|)`.
pub fn mixing_bound(g: &Graph, s: &[u32], t: &[u32], lambda1: f64, lambda2: f64) -> MixingReport {
    let mut in_t = vec![false; g.n()];
    t.iter().for_each(|&v| in_t[v as usize] = true);
    let edges: u64 = s
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&w| in_t[w as usize]).count() as u64)
        .sum();
    let (ns, nt) = (s.len() as f64, t.len() as f64);
    let main_term = lambda1 * ns * nt / g.n() as f64;
    let bound = main_term + lambda2 * (ns * nt).sqrt();
    MixingReport {
        size_s: s.len(),
        size_t: t.len(),
        edges,
        main_term,
        bound,
        holds: edges as f64 <= bound + 1e-9,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutReport {
    pub cut_edges: u64,
    pub volume: u64,
    pub complement_volume: u64,
    /// `cut / min(vol A, vol Aᶜ)`
    pub ratio: f64,
}

/// Crossing edges and volumes of the cut `(A, V ∖ A)`.
pub fn cut(g: &Graph, in_a: &[bool]) -> CutReport {
    let mut cut_edges = 0;
    let (mut vol_a, mut vol_b) = (0u64, 0u64);
    for v in 0..g.n() as u32 {
        let d = g.degree(v) as u64;
        if in_a[v as usize] {
            vol_a += d;
            cut_edges += g.neighbors(v).iter().filter(|&&w| !in_a[w as usize]).count() as u64;
        } else {
            vol_b += d;
        }
    }
    let denom = vol_a.min(vol_b);
    CutReport {
        cut_edges,
        volume: vol_a,
        complement_volume: vol_b,
        ratio: if denom == 0 { f64::INFINITY } else { cut_edges as f64 / denom as f64 },
    }
}

/// Best conductance among prefix cuts of the vertices sorted by `score`.
pub fn sweep_cut(g: &Graph, score: &[f64]) -> (CutReport, Vec<bool>) {
    let mut order: Vec<u32> = (0..g.n() as u32).collect();
    order.sort_by(|&a, &b| score[a as usize].total_cmp(&score[b as usize]));
    let total: u64 = (0..g.n() as u32).map(|v| g.degree(v) as u64).sum();
    let mut in_a = vec![false; g.n()];
    let (mut cut_edges, mut vol) = (0i64, 0u64);
    let mut best: Option<(f64, usize)> = None;
    for (i, &v) in order.iter().enumerate().take(g.n().saturating_sub(1)) {
        let inside = g.neighbors(v).iter().filter(|&&w| in_a[w as usize]).count() as i64;
        cut_edges += g.degree(v) as i64 - 2 * inside;
        in_a[v as usize] = true;
        vol += g.degree(v) as u64;
        let denom = vol.min(total - vol);
        if denom > 0 {
            let ratio = cut_edges as f64 / denom as f64;
            if best.is_none_or(|(b, _)| ratio < b) {
                best = Some((ratio, i));
            }
        }
    }
    let mut set = vec![false; g.n()];
    if let Some((_, i)) = best {
        for &v in &order[..=i] {
            set[v as usize] = true;
        }
    }
    (cut(g, &set), set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heawood() -> Graph {
        let mut edges = Vec::new();
        for j in 0..7u32 {
            for d in [0, 1, 3] {
                edges.push(((j + d) % 7, 7 + j));
            }
        }
        Graph::from_edges(14, edges)
    }

    #[test]
    fn full_sets_hit_main_term() {
        let g = heawood();
        let all: Vec<u32> = (0..14).collect();
        let rep = mixing_bound(&g, &all, &all, 3.0, 2f64.sqrt());
        assert_eq!(rep.edges as f64, rep.main_term);
        assert!(rep.holds);
    }

    #[test]
    fn disjoint_halves() {
        let g = heawood();
        let s: Vec<u32> = (0..7).collect();
        let t: Vec<u32> = (7..14).collect();
        // Direct count: every edge joins a point to a line.
        let rep = mixing_bound(&g, &s, &t, 3.0, 3.0);
        assert_eq!(rep.edges, 21);
        assert!(rep.holds);
        let empty = mixing_bound(&g, &[], &t, 3.0, 3.0);
        assert_eq!((empty.edges, empty.bound), (0, 0.0));
    }

    #[test]
    fn cut_counts_agree_from_both_sides() {
        let g = heawood();
        let a: Vec<bool> = (0..14).map(|v| v % 3 == 0).collect();
        let b: Vec<bool> = a.iter().map(|x| !x).collect();
        assert_eq!(cut(&g, &a).cut_edges, cut(&g, &b).cut_edges);
    }
}
