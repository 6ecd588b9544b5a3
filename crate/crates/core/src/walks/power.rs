//! Triangles of the geodesic `r`-power of `X^{p,q}`, computed over `Z[i]`.
//!
//! By left invariance the power triangles through the power edge `g → g·t`
//! are `g → g·t → g·t·u → g` with `t·u·t''` scalar for `u, t'' ∈ S_p^(r)`,
//! so one table indexed by `t` describes every edge.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::cayley::{power_paths, SigmaTables};
use crate::error::{Error, Result};
use crate::gaussian::GMatrix;
use crate::spectral::exact::pow_mod;

/// Prime `≡ 1 mod 4` used to filter candidates before exact confirmation.
const FILTER_PRIME: u64 = 1_000_000_009;

#[derive(Clone, Debug)]
pub struct PowerData {
    pub r: usize,
    /// Letter sequences `s_1…s_r` (indices into `S_p`).
    pub words: Vec<Vec<u32>>,
    pub mats: Vec<GMatrix>,
    /// `closers[t]`: pairs `(u, t'')` closing a triangle on `t`, sorted.
    pub closers: Vec<Vec<(u32, u32)>>,
}

fn reduce_mod(m: &GMatrix, eps: u64) -> [u64; 9] {
    m.reduce(FILTER_PRIME, eps)
}

fn mul_mod(a: &[u64; 9], b: &[u64; 9]) -> [u64; 9] {
    let p = FILTER_PRIME as u128;
    let mut m = [0; 9];
    for i in 0..3 {
        for j in 0..3 {
            let s: u128 = (0..3).map(|k| a[i * 3 + k] as u128 * b[k * 3 + j] as u128).sum();
            m[i * 3 + j] = (s % p) as u64;
        }
    }
    m
}

fn normalize_with(m: &[u64; 9], lead_inv: u64) -> [u64; 9] {
    m.map(|x| (x as u128 * lead_inv as u128 % FILTER_PRIME as u128) as u64)
}

fn lead(m: &[u64; 9]) -> u64 {
    *m.iter().find(|&&x| x != 0).expect("invertible matrix")
}

fn inv_mod(x: u64) -> u64 {
    pow_mod(x, FILTER_PRIME - 2, FILTER_PRIME)
}

/// Inverses of all entries via one modular inversion.
fn batch_inverse(xs: &[u64]) -> Vec<u64> {
    let p = FILTER_PRIME as u128;
    let mut prefix = Vec::with_capacity(xs.len());
    let mut acc = 1u128;
    for &x in xs {
        prefix.push(acc as u64);
        acc = acc * x as u128 % p;
    }
    let mut inv = inv_mod(acc as u64) as u128;
    let mut out = vec![0; xs.len()];
    for i in (0..xs.len()).rev() {
        out[i] = (inv * prefix[i] as u128 % p) as u64;
        inv = inv * xs[i] as u128 % p;
    }
    out
}

impl PowerData {
    /// With `exhaustive = false` the candidates `u` are restricted to those
    /// whose first letter closes a triangle with the last letter of `t`.
    pub fn build(sp: &[GMatrix], tables: &SigmaTables, r: usize, exhaustive: bool) -> Result<Self> {
        if r == 0 {
            return Err(Error::Invalid("power walk needs r ≥ 1".into()));
        }
        let words = power_paths(tables, r);
        let mats: Vec<GMatrix> = words
            .iter()
            .map(|w| w.iter().fold(GMatrix::identity(), |acc, &i| acc * sp[i as usize]))
            .collect();
        let eps = pow_mod(sqrt_minus_one_base(), (FILTER_PRIME - 1) / 4, FILTER_PRIME);
        debug_assert_eq!(eps as u128 * eps as u128 % FILTER_PRIME as u128, FILTER_PRIME as u128 - 1);
        let red: Vec<[u64; 9]> = mats.iter().map(|m| reduce_mod(m, eps)).collect();
        let adj: Vec<[u64; 9]> = mats.iter().map(|m| reduce_mod(&m.adjoint(), eps)).collect();
        let mut keys: HashMap<[u64; 9], u32> = HashMap::with_capacity(red.len());
        for (i, m) in red.iter().enumerate() {
            keys.insert(normalize_with(m, inv_mod(lead(m))), i as u32);
        }
        let mut by_first: Vec<Vec<u32>> = vec![Vec::new(); sp.len()];
        for (i, w) in words.iter().enumerate() {
            by_first[w[0] as usize].push(i as u32);
        }
        let all: Vec<u32> = (0..words.len() as u32).collect();
        let closers = (0..words.len())
            .into_par_iter()
            .map(|t| {
                let cands: Vec<u32> = if exhaustive {
                    all.clone()
                } else {
                    let last = *words[t].last().unwrap() as usize;
                    tables.closers[last].iter().flat_map(|&a| by_first[a as usize].iter().copied()).collect()
                };
                // (t·u)* = u*·t*
                let prods: Vec<[u64; 9]> = cands.iter().map(|&u| mul_mod(&adj[u as usize], &adj[t])).collect();
                let leads: Vec<u64> = prods.iter().map(lead).collect();
                let invs = batch_inverse(&leads);
                let mut out = Vec::new();
                for ((&u, m), &li) in cands.iter().zip(&prods).zip(&invs) {
                    if let Some(&t2) = keys.get(&normalize_with(m, li)) {
                        if (mats[t] * mats[u as usize] * mats[t2 as usize]).is_scalar() {
                            out.push((u, t2));
                        }
                    }
                }
                out.sort_unstable();
                out
            })
            .collect();
        Ok(Self { r, words, mats, closers })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Every power edge lies in `(p+1)p^{r−1}` power triangles.
    pub fn triangle_counts_uniform(&self, p: u64) -> bool {
        let want = ((p + 1) * p.pow(self.r as u32 - 1)) as usize;
        self.closers.iter().all(|c| c.len() == want)
    }

    /// `(t, u, t'')` closing implies `(u, t'', t)` closing.
    pub fn rotation_invariant(&self) -> bool {
        self.closers.iter().enumerate().all(|(t, cs)| {
            cs.iter().all(|&(u, t2)| self.closers[u as usize].binary_search(&(t2, t as u32)).is_ok())
        })
    }
}

/// A quadratic non-residue modulo the filter prime.
fn sqrt_minus_one_base() -> u64 {
    (2..)
        .find(|&g| pow_mod(g, (FILTER_PRIME - 1) / 2, FILTER_PRIME) == FILTER_PRIME - 1)
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{enumerate_sp, sigma_tables};

    #[test]
    fn p5_power_triangles() {
        let sp = enumerate_sp(5).unwrap();
        let tables = sigma_tables(&sp);
        let r1 = PowerData::build(&sp, &tables, 1, true).unwrap();
        assert!(r1.triangle_counts_uniform(5));
        let full = PowerData::build(&sp, &tables, 2, true).unwrap();
        assert_eq!(full.len(), 775);
        assert!(full.triangle_counts_uniform(5), "{:?}", full.closers[0].len());
        assert!(full.rotation_invariant());
        // Junctions of power triangles always turn, so the restricted scan loses nothing.
        let fast = PowerData::build(&sp, &tables, 2, false).unwrap();
        assert_eq!(fast.closers, full.closers);
    }
}
