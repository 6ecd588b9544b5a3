//! Graph isomorphism by joint color refinement, individualization and
//! exhaustive backtracking.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum IsoVerdict {
    Isomorphic { mapping: Vec<u32> },
    NonIsomorphic,
    /// The budget ran out before the search finished.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub verdict: IsoVerdict,
    pub nodes: u64,
    pub elapsed_ms: u128,
}

impl IsoReport {
    pub fn is_isomorphic(&self) -> Option<bool> {
        match self.verdict {
            IsoVerdict::Isomorphic { .. } => Some(true),
            IsoVerdict::NonIsomorphic => Some(false),
            IsoVerdict::Inconclusive => None,
        }
    }
}

struct Search<'a> {
    g: &'a Graph,
    h: &'a Graph,
    nodes: u64,
    max_nodes: u64,
    deadline: Instant,
    out_of_budget: bool,
}

/// Refines the joint coloring to a stable one. Returns `None` when the color
/// class sizes of the two graphs diverge.
fn refine(g: &Graph, h: &Graph, cg: &mut Vec<u32>, ch: &mut Vec<u32>) -> Option<()> {
    let mut classes = count_classes(cg, ch)?;
    loop {
        let sig = |graph: &Graph, c: &[u32], v: usize| -> (u32, Vec<u32>) {
            let mut nb: Vec<u32> = graph.neighbors(v as u32).iter().map(|&w| c[w as usize]).collect();
            nb.sort_unstable();
            (c[v], nb)
        };
        let sg: Vec<_> = (0..g.n()).map(|v| sig(g, cg, v)).collect();
        let sh: Vec<_> = (0..h.n()).map(|v| sig(h, ch, v)).collect();
        let mut all: Vec<&(u32, Vec<u32>)> = sg.iter().chain(&sh).collect();
        all.sort();
        all.dedup();
        let ids: HashMap<&(u32, Vec<u32>), u32> = all.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        *cg = sg.iter().map(|s| ids[s]).collect();
        *ch = sh.iter().map(|s| ids[s]).collect();
        let next = count_classes(cg, ch)?;
        if next == classes {
            return Some(());
        }
        classes = next;
    }
}

fn count_classes(cg: &[u32], ch: &[u32]) -> Option<usize> {
    let k = cg.iter().chain(ch).copied().max().map_or(0, |m| m as usize + 1);
    let mut a = vec![0usize; k];
    let mut b = vec![0usize; k];
    cg.iter().for_each(|&c| a[c as usize] += 1);
    ch.iter().for_each(|&c| b[c as usize] += 1);
    (a == b).then(|| a.iter().filter(|&&x| x > 0).count())
}

impl Search<'_> {
    fn run(&mut self, cg: Vec<u32>, ch: Vec<u32>) -> Option<Vec<u32>> {
        self.nodes += 1;
        if self.nodes > self.max_nodes || (self.nodes % 256 == 0 && Instant::now() > self.deadline) {
            self.out_of_budget = true;
            return None;
        }
        let (mut cg, mut ch) = (cg, ch);
        refine(self.g, self.h, &mut cg, &mut ch)?;
        let k = cg.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut size = vec![0usize; k];
        cg.iter().for_each(|&c| size[c as usize] += 1);
        // Largest non-singleton cell, lowest color first. In projective planes
        // this individualizes points in general position, where refinement
        // alone cannot separate points of one line by cross-ratio.
        let target = (0..k).filter(|&c| size[c] > 1).min_by_key(|&c| (std::cmp::Reverse(size[c]), c));
        let Some(target) = target else {
            let mut mapping = vec![0u32; cg.len()];
            let mut pos = vec![0u32; k];
            for (w, &c) in ch.iter().enumerate() {
                pos[c as usize] = w as u32;
            }
            for (v, &c) in cg.iter().enumerate() {
                mapping[v] = pos[c as usize];
            }
            let ok = self.g.edges().all(|(a, b)| self.h.has_edge(mapping[a as usize], mapping[b as usize]));
            return ok.then_some(mapping);
        };
        let v = cg.iter().position(|&c| c as usize == target).unwrap();
        let fresh = k as u32;
        for w in (0..ch.len()).filter(|&w| ch[w] as usize == target) {
            let mut cg2 = cg.clone();
            let mut ch2 = ch.clone();
            cg2[v] = fresh;
            ch2[w] = fresh;
            if let Some(m) = self.run(cg2, ch2) {
                return Some(m);
            }
            if self.out_of_budget {
                return None;
            }
        }
        None
    }
}

/// Decides whether `g ≅ h`, giving up after `max_nodes` search nodes or `budget`.
pub fn isomorphism(g: &Graph, h: &Graph, max_nodes: u64, budget: Duration) -> IsoReport {
    let start = Instant::now();
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return IsoReport {
            verdict: IsoVerdict::NonIsomorphic,
            nodes: 0,
            elapsed_ms: start.elapsed().as_millis(),
        };
    }
    let mut s = Search {
        g,
        h,
        nodes: 0,
        max_nodes,
        deadline: start + budget,
        out_of_budget: false,
    };
    let found = s.run(vec![0; g.n()], vec![0; h.n()]);
    let verdict = match found {
        Some(mapping) => IsoVerdict::Isomorphic { mapping },
        None if s.out_of_budget => IsoVerdict::Inconclusive,
        None => IsoVerdict::NonIsomorphic,
    };
    IsoReport {
        verdict,
        nodes: s.nodes,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[test]
    fn relabeled_cycle_is_isomorphic() {
        let g = cycle(9);
        let perm: Vec<u32> = vec![3, 7, 1, 8, 0, 2, 6, 4, 5];
        let h = Graph::from_edges(9, g.edges().map(|(a, b)| (perm[a as usize], perm[b as usize])));
        let rep = isomorphism(&g, &h, 1_000_000, Duration::from_secs(10));
        let IsoVerdict::Isomorphic { mapping } = rep.verdict else { panic!() };
        assert!(g.edges().all(|(a, b)| h.has_edge(mapping[a as usize], mapping[b as usize])));
    }

    #[test]
    fn two_triangles_vs_hexagon() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let rep = isomorphism(&g, &cycle(6), 1_000_000, Duration::from_secs(10));
        assert_eq!(rep.is_isomorphic(), Some(false));
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let rep = isomorphism(&cycle(12), &cycle(12), 1, Duration::from_secs(10));
        assert_eq!(rep.verdict, IsoVerdict::Inconclusive);
    }
}
