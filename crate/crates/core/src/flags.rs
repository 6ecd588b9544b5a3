//! Free flag complexes `P^d_fr(O_r)`: free submodules of `O_r^(d+1)` ordered
//! by inclusion.

use crate::complex::SimplicialComplex;
use crate::error::{overflow, Result};
use crate::ring::{LocalRing, RingElem};

/// Largest number of candidate generator matrices examined.
pub const MAX_CANDIDATES: u128 = 10_000_000;

/// A free submodule in reduced column-echelon form: the rows in `pivots` of
/// `basis` form the identity, where `pivots` is the greedy (lexicographically
/// first) set of rows independent modulo `π`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeSubmodule {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// Columns, each of length `d + 1`.
    pub basis: Vec<Vec<RingElem>>,
}

impl FreeSubmodule {
    /// Whether every column of `self` lies in `other`.
    pub fn is_contained_in(&self, ring: &LocalRing, other: &FreeSubmodule) -> bool {
        self.basis.iter().all(|b| {
            (0..b.len()).all(|row| {
                let s = other
                    .pivots
                    .iter()
                    .enumerate()
                    .fold(0, |s, (c, &p)| ring.add(s, ring.mul(other.basis[c][row], b[p])));
                s == b[row]
            })
        })
    }

    /// All elements, as vectors.
    pub fn elements(&self, ring: &LocalRing) -> Vec<Vec<RingElem>> {
        let dim = self.basis.first().map_or(0, Vec::len);
        let mut out = vec![vec![0; dim]];
        for b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * ring.size() as usize);
            for v in &out {
                for c in ring.elements() {
                    next.push(
                        v.iter()
                            .zip(b)
                            .map(|(&x, &y)| ring.add(x, ring.mul(c, y)))
                            .collect(),
                    );
                }
            }
            out = next;
        }
        out
    }
}

/// Greedy pivot rows of the reduction mod `π` of the columns.
fn greedy_pivots(ring: &LocalRing, basis: &[Vec<RingElem>], dim: usize) -> Vec<usize> {
    let f = ring.field();
    let k = basis.len();
    // Row-reduced echelon rows of F_q^k seen so far, each with its lead index.
    let mut echelon: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut pivots = Vec::new();
    for row in 0..dim {
        let mut v: Vec<u32> = basis.iter().map(|c| ring.residue(c[row])).collect();
        for (lead, e) in &echelon {
            let c = v[*lead];
            if c != 0 {
                for j in 0..k {
                    v[j] = f.sub(v[j], f.mul(c, e[j]));
                }
            }
        }
        if let Some(lead) = v.iter().position(|&x| x != 0) {
            let inv = f.inv(v[lead]);
            let v: Vec<u32> = v.iter().map(|&x| f.mul(x, inv)).collect();
            for (_, e) in echelon.iter_mut() {
                let c = e[lead];
                if c != 0 {
                    for j in 0..k {
                        e[j] = f.sub(e[j], f.mul(c, v[j]));
                    }
                }
            }
            echelon.push((lead, v));
            pivots.push(row);
            if pivots.len() == k {
                break;
            }
        }
    }
    pivots
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// All free rank-`k` submodules of `O_r^dim`, sorted.
pub fn free_submodules(ring: &LocalRing, dim: usize, k: usize) -> Vec<FreeSubmodule> {
    let size = ring.size();
    let free_entries = (dim - k) * k;
    let mut out = Vec::new();
    for pivots in subsets(dim, k) {
        let others: Vec<usize> = (0..dim).filter(|i| !pivots.contains(i)).collect();
        let total = size.pow(free_entries as u32);
        for code in 0..total {
            let mut basis = vec![vec![0; dim]; k];
            for (c, &p) in pivots.iter().enumerate() {
                basis[c][p] = 1;
            }
            let mut rest = code;
            for col in basis.iter_mut() {
                for &row in &others {
                    col[row] = rest % size;
                    rest /= size;
                }
            }
            if greedy_pivots(ring, &basis, dim) == pivots {
                out.push(FreeSubmodule {
                    rank: k,
                    pivots: pivots.clone(),
                    basis,
                });
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug)]
pub struct FlagComplex {
    pub dim: usize,
    /// Vertices: free submodules of ranks `1..=d`, by rank then canonical order.
    pub modules: Vec<FreeSubmodule>,
    pub complex: SimplicialComplex,
}

/// `P^d_fr(O_r)`: vertices are proper nonzero free submodules of `O_r^(d+1)`,
/// cells are free flags.
pub fn build_pfr_d(ring: &LocalRing, d: usize) -> Result<FlagComplex> {
    let dim = d + 1;
    let size = ring.size() as u128;
    let estimate: u128 = (1..dim)
        .map(|k| subsets(dim, k).len() as u128 * size.saturating_pow(((dim - k) * k) as u32))
        .sum();
    if estimate > MAX_CANDIDATES {
        return Err(overflow("free submodule candidates", estimate, MAX_CANDIDATES));
    }
    let by_rank: Vec<Vec<FreeSubmodule>> = (1..dim).map(|k| free_submodules(ring, dim, k)).collect();
    let mut offsets = vec![0usize];
    for l in &by_rank {
        offsets.push(offsets.last().unwrap() + l.len());
    }
    // Inclusions between consecutive ranks suffice for building chains.
    let mut up: Vec<Vec<u32>> = vec![Vec::new(); offsets[by_rank.len()]];
    for k in 0..by_rank.len().saturating_sub(1) {
        for (i, m) in by_rank[k].iter().enumerate() {
            for (j, m2) in by_rank[k + 1].iter().enumerate() {
                if m.is_contained_in(ring, m2) {
                    up[offsets[k] + i].push((offsets[k + 1] + j) as u32);
                }
            }
        }
    }
    let mut facets = Vec::new();
    for start in 0..by_rank[0].len() {
        let mut chain = vec![start as u32];
        extend_chains(&up, &mut chain, d, &mut facets);
    }
    let modules: Vec<FreeSubmodule> = by_rank.into_iter().flatten().collect();
    let complex = SimplicialComplex::new(modules.len(), facets)?;
    Ok(FlagComplex {
        dim: d,
        modules,
        complex,
    })
}

fn extend_chains(up: &[Vec<u32>], chain: &mut Vec<u32>, len: usize, out: &mut Vec<Vec<u32>>) {
    if chain.len() == len {
        out.push(chain.clone());
        return;
    }
    let last = *chain.last().unwrap() as usize;
    for &next in &up[last] {
        chain.push(next);
        extend_chains(up, chain, len, out);
        chain.pop();
    }
}

/// Brute-force check that a free flag `M_1 < … < M_d` (with `0` and `O^(d+1)`
/// appended) has a unique refinement to a maximal flag of submodules: between
/// consecutive members the intermediate submodules form a chain of length `r`.
pub fn refinement_is_unique(ring: &LocalRing, dim: usize, flag: &[&FreeSubmodule]) -> bool {
    let zero = FreeSubmodule {
        rank: 0,
        pivots: vec![],
        basis: vec![],
    };
    let full = FreeSubmodule {
        rank: dim,
        pivots: (0..dim).collect(),
        basis: (0..dim)
            .map(|i| (0..dim).map(|j| u64::from(i == j)).collect())
            .collect(),
    };
    let mut seq: Vec<&FreeSubmodule> = vec![&zero];
    seq.extend_from_slice(flag);
    seq.push(&full);
    let encode = |v: &[RingElem]| v.iter().fold(0u64, |a, &x| a * ring.size() + x);
    for w in seq.windows(2) {
        let lower: Vec<Vec<RingElem>> = if w[0].rank == 0 {
            vec![vec![0; dim]]
        } else {
            w[0].elements(ring)
        };
        let upper = w[1].elements(ring);
        let span = |x: &[RingElem]| -> Vec<u64> {
            let mut s: Vec<u64> = lower
                .iter()
                .flat_map(|m| {
                    ring.elements().map(move |c| {
                        let v: Vec<RingElem> =
                            m.iter().zip(x).map(|(&a, &b)| ring.add(a, ring.mul(c, b))).collect();
                        encode(&v)
                    })
                })
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        };
        let mut family: Vec<Vec<u64>> = upper.iter().map(|x| span(x)).collect();
        family.sort();
        family.dedup();
        // Totally ordered by inclusion (sizes distinct and nested).
        family.sort_by_key(Vec::len);
        let nested = family.windows(2).all(|p| {
            p[0].len() < p[1].len() && p[0].iter().all(|x| p[1].binary_search(x).is_ok())
        });
        if !nested || family.len() != ring.r() as usize + 1 {
            return false;
        }
        // Every intermediate submodule is a sum of the cyclic extensions above,
        // and a chain is closed under sums, so the chain is all of them.
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_plane_flag_counts() {
        let ring = LocalRing::padic(2, 1).unwrap();
        let x = build_pfr_d(&ring, 2).unwrap();
        assert_eq!(x.modules.len(), 14);
        assert_eq!(x.complex.cells(1).len(), 21);
    }

    #[test]
    fn free_plane_over_z4() {
        let ring = LocalRing::padic(2, 2).unwrap();
        let x = build_pfr_d(&ring, 2).unwrap();
        assert_eq!(x.modules.len(), 56);
        assert_eq!(x.complex.cells(1).len(), 168);
        // 0 < (*,0,0) < (*,*,0) < O^3
        let line = x.modules.iter().position(|m| m.rank == 1 && m.basis[0] == vec![1, 0, 0]).unwrap();
        let plane = x
            .modules
            .iter()
            .position(|m| m.rank == 2 && m.basis == vec![vec![1, 0, 0], vec![0, 1, 0]])
            .unwrap();
        assert!(x.complex.is_cell(&[line as u32, plane as u32]));
        for f in x.complex.facets() {
            let flag: Vec<&FreeSubmodule> = f.iter().map(|&i| &x.modules[i as usize]).collect();
            assert!(refinement_is_unique(&ring, 3, &flag));
        }
    }

    #[test]
    fn size_guard() {
        let ring = LocalRing::padic(5, 3).unwrap();
        assert!(build_pfr_d(&ring, 3).is_err());
    }
}
