//! Spectral structure of the free projective plane: the operator `Q = A²`
//! restricted to lines, its `Δ`-stratification, the annihilating product, and
//! exact eigenvalue multiplicities.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::eigen::{self, GraphOperator, Mode};
use super::exact::{IntMatrix, RANK_PRIME};
use crate::error::{Error, Result};
use crate::free::FreePlane;

/// `Q[v][w]` = number of planes containing both lines.
pub fn q_matrix(plane: &FreePlane) -> IntMatrix {
    let n = plane.n_lines();
    let g = plane.graph();
    let mut q = IntMatrix::zeros(n, n);
    for p in n..2 * n {
        let ls = g.neighbors(p as u32);
        for &a in ls {
            for &b in ls {
                q.data[a as usize * n + b as usize] += 1;
            }
        }
    }
    q
}

/// Row-major `Δ(v, w)` table.
pub fn delta_matrix(plane: &FreePlane) -> Vec<u8> {
    let n = plane.n_lines();
    let mut d = vec![0u8; n * n];
    for v in 0..n {
        for w in 0..n {
            d[v * n + w] = plane.delta(v, w) as u8;
        }
    }
    d
}

/// `Q_0 = (q+1)q^(r−1)`, `Q_δ = q^(r−δ)`.
pub fn q_delta_expected(q: u64, r: u32, delta: u32) -> u64 {
    if delta == 0 {
        (q + 1) * q.pow(r - 1)
    } else {
        q.pow(r - delta)
    }
}

/// The number of lines `u` with `Δ(v,u) = ε`, `Δ(u,w) = ζ` for `Δ(v,w) = δ`,
/// from the rooted-tree count (zero outside the ultrametric pattern).
pub fn n_expected(q: u64, r: u32, delta: u32, eps: u32, zeta: u32) -> u64 {
    let (e, z) = (eps.min(zeta), eps.max(zeta));
    if !((delta < e && e == z) || z == delta) {
        return 0;
    }
    if e == 0 {
        return 1;
    }
    let top = q.pow(2 * (r - 1));
    match (e == delta, e < r) {
        (false, true) => (q * q - 1) * q.pow(2 * (e - 1)),
        (false, false) => (q * q + q) * top,
        (true, true) => (q * q - 2) * q.pow(2 * (e - 1)),
        (true, false) => (q * q + q - 1) * top,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StratificationReport {
    pub q: u64,
    pub r: u32,
    /// Measured `Q_δ` (None if not constant on the stratum).
    pub q_delta: Vec<Option<i64>>,
    pub q_delta_mismatches: usize,
    /// Measured `N^δ_{ε,ζ}` indexed `[δ][ε][ζ]` (None if not constant).
    pub n_table: Vec<Vec<Vec<Option<u64>>>>,
    pub n_mismatches: usize,
    pub pairs_checked: usize,
}

/// Exhaustive measurement of `Q_δ` and `N^δ_{ε,ζ}` over all line pairs.
pub fn stratification(plane: &FreePlane, qm: &IntMatrix, delta: &[u8]) -> StratificationReport {
    let n = plane.n_lines();
    let (q, r) = (plane.ring().q(), plane.ring().r());
    let rs = r as usize + 1;
    let mut q_delta: Vec<Option<Option<i64>>> = vec![None; rs];
    let mut table: Vec<Vec<Vec<Option<Option<u64>>>>> = vec![vec![vec![None; rs]; rs]; rs];
    for v in 0..n {
        for w in 0..n {
            let d = delta[v * n + w] as usize;
            let x = qm.get(v, w);
            q_delta[d] = match q_delta[d] {
                None => Some(Some(x)),
                Some(Some(y)) if y == x => Some(Some(y)),
                _ => Some(None),
            };
            let mut counts = vec![vec![0u64; rs]; rs];
            for u in 0..n {
                counts[delta[v * n + u] as usize][delta[u * n + w] as usize] += 1;
            }
            for e in 0..rs {
                for z in 0..rs {
                    let c = counts[e][z];
                    let slot = &mut table[d][e][z];
                    *slot = match *slot {
                        None => Some(Some(c)),
                        Some(Some(y)) if y == c => Some(Some(y)),
                        _ => Some(None),
                    };
                }
            }
        }
    }
    let mut q_mis = 0;
    let q_delta: Vec<Option<i64>> = q_delta
        .into_iter()
        .enumerate()
        .map(|(d, m)| {
            let m = m.flatten();
            if m != Some(q_delta_expected(q, r, d as u32) as i64) {
                q_mis += 1;
            }
            m
        })
        .collect();
    let mut n_mis = 0;
    let n_table = table
        .into_iter()
        .enumerate()
        .map(|(d, row)| {
            row.into_iter()
                .enumerate()
                .map(|(e, col)| {
                    col.into_iter()
                        .enumerate()
                        .map(|(z, m)| {
                            let m = m.flatten();
                            if m != Some(n_expected(q, r, d as u32, e as u32, z as u32)) {
                                n_mis += 1;
                            }
                            m
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    StratificationReport {
        q,
        r,
        q_delta,
        q_delta_mismatches: q_mis,
        n_table,
        n_mismatches: n_mis,
        pairs_checked: n * n,
    }
}

/// Product of two `Δ`-indexed functions with an `N` table.
pub fn delta_product(n_table: &[Vec<Vec<u64>>], a: &[i128], b: &[i128]) -> Vec<i128> {
    let rs = a.len();
    (0..rs)
        .map(|d| {
            let mut s = 0i128;
            for e in 0..rs {
                for z in 0..rs {
                    s += n_table[d][e][z] as i128 * a[e] * b[z];
                }
            }
            s
        })
        .collect()
}

/// `B^(ℓ) = ∏_{j=r}^{r+ℓ−1} (Q − q^j)` in `Δ`-indexed form, for `ℓ = 0..=r`.
pub fn b_sequence_compressed(q: u64, r: u32, n_table: &[Vec<Vec<u64>>]) -> Vec<Vec<i128>> {
    let rs = r as usize + 1;
    let qd: Vec<i128> = (0..=r).map(|d| q_delta_expected(q, r, d) as i128).collect();
    let mut b: Vec<i128> = (0..rs).map(|d| i128::from(d == 0)).collect();
    let mut out = vec![b.clone()];
    for j in r..2 * r {
        let mut factor = qd.clone();
        factor[0] -= (q as i128).pow(j);
        b = delta_product(n_table, &b, &factor);
        out.push(b.clone());
    }
    out
}

/// `N` table from the closed-form counts.
pub fn n_table_expected(q: u64, r: u32) -> Vec<Vec<Vec<u64>>> {
    (0..=r)
        .map(|d| (0..=r).map(|e| (0..=r).map(|z| n_expected(q, r, d, e, z)).collect()).collect())
        .collect()
}

/// Predicted `B^(ℓ)_{δ−1} − B^(ℓ)_δ`.
pub fn b_difference_expected(q: u64, r: u32, ell: u32, delta: u32) -> i128 {
    if delta <= ell {
        return 0;
    }
    let q = q as i128;
    let binom = if ell >= 2 { (ell - 1) * (ell - 2) / 2 } else { 0 };
    let mut v = q.pow(ell * r - delta + binom) * (q.pow(ell) - 1);
    for j in delta - ell..=delta - 2 {
        v *= q.pow(j) - 1;
    }
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilatorReport {
    pub q: u64,
    pub r: u32,
    pub n_lines: usize,
    pub holds: bool,
    pub c: Option<i64>,
    pub expected_c: Option<i64>,
    /// Whether the `Δ`-compressed product with the closed-form `N` table agrees
    /// entrywise with the dense product.
    pub compressed_agrees: bool,
}

/// `∏_{j=r}^{2r−1} (Q − q^j·I) = c·J`, with `c = ∏_j (λ₁ − q^j) / n`.
pub fn verify_annihilator(plane: &FreePlane, qm: &IntMatrix, delta: &[u8]) -> Result<AnnihilatorReport> {
    let (q, r) = (plane.ring().q(), plane.ring().r());
    let n = plane.n_lines();
    let mut b = IntMatrix::identity(n);
    for j in r..2 * r {
        b = b.mul(&qm.minus_scalar((q as i64).pow(j)))?;
    }
    let c = b.constant_value();
    let lambda1 = ((q + 1) * (q + 1) * q.pow(2 * (r - 1))) as i128;
    let num: i128 = (r..2 * r).map(|j| lambda1 - (q as i128).pow(j)).product();
    let expected_c = (num % n as i128 == 0).then(|| (num / n as i128) as i64);
    let compressed = b_sequence_compressed(q, r, &n_table_expected(q, r));
    let last = &compressed[r as usize];
    let compressed_agrees = (0..n * n).all(|i| b.data[i] as i128 == last[delta[i] as usize]);
    Ok(AnnihilatorReport {
        q,
        r,
        n_lines: n,
        holds: c.is_some() && c != Some(0) && c == expected_c,
        c,
        expected_c,
        compressed_agrees,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SparseAnnihilatorReport {
    pub q: u64,
    pub r: u32,
    pub n_lines: usize,
    pub holds: bool,
    pub c: Option<i64>,
    pub expected_c: Option<i64>,
}

fn add_row(dst: &mut [i64], src: &[i64]) {
    dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
}

/// The annihilating product applied exactly to every standard basis vector,
/// in column blocks through the sparse incidence. Suitable for planes whose
/// dense `Q` does not fit in memory.
pub fn verify_annihilator_sparse(plane: &FreePlane) -> Result<SparseAnnihilatorReport> {
    const BLOCK: usize = 64;
    let (q, r) = (plane.ring().q(), plane.ring().r());
    let n = plane.n_lines();
    let g = plane.graph();
    let lambda1 = ((q + 1) * (q + 1) * q.pow(2 * (r - 1))) as u128;
    let bound = (2 * lambda1).pow(r);
    if bound > i64::MAX as u128 {
        return Err(crate::error::overflow("annihilator entry bound", bound, i64::MAX as u128));
    }
    let num: i128 = (r..2 * r).map(|j| lambda1 as i128 - (q as i128).pow(j)).product();
    let expected_c = (num % n as i128 == 0).then(|| (num / n as i128) as i64);
    let per_block: Vec<Option<i64>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let cols = b * BLOCK..n.min((b + 1) * BLOCK);
            let w = cols.len();
            let mut x = vec![0i64; n * w];
            for (j, c) in cols.enumerate() {
                x[c * w + j] = 1;
            }
            let mut z = vec![0i64; n * w];
            let mut y = vec![0i64; n * w];
            for e in r..2 * r {
                let shift = (q as i64).pow(e);
                for p in 0..n {
                    let zp = &mut z[p * w..(p + 1) * w];
                    zp.fill(0);
                    for &v in g.neighbors((n + p) as u32) {
                        add_row(zp, &x[v as usize * w..(v as usize + 1) * w]);
                    }
                }
                for u in 0..n {
                    let yu = &mut y[u * w..(u + 1) * w];
                    yu.iter_mut().zip(&x[u * w..(u + 1) * w]).for_each(|(d, s)| *d = -shift * s);
                    for &p in g.neighbors(u as u32) {
                        let p = p as usize - n;
                        add_row(yu, &z[p * w..(p + 1) * w]);
                    }
                }
                std::mem::swap(&mut x, &mut y);
            }
            let c0 = x[0];
            x.iter().all(|&v| v == c0).then_some(c0)
        })
        .collect();
    let c = match per_block.first() {
        Some(&Some(c0)) if per_block.iter().all(|&c| c == Some(c0)) => Some(c0),
        _ => None,
    };
    Ok(SparseAnnihilatorReport {
        q,
        r,
        n_lines: n,
        holds: c.is_some() && c != Some(0) && c == expected_c,
        c,
        expected_c,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BDifferenceReport {
    pub q: u64,
    pub r: u32,
    /// `(ℓ, δ, measured, predicted)` for every mismatch.
    pub mismatches: Vec<(u32, u32, i128, i128)>,
    pub checked: usize,
}

/// Compares the predicted differences with dense `B^(ℓ)` products.
pub fn check_b_differences(plane: &FreePlane, qm: &IntMatrix, delta: &[u8]) -> Result<BDifferenceReport> {
    let (q, r) = (plane.ring().q(), plane.ring().r());
    let n = plane.n_lines();
    let mut b = IntMatrix::identity(n);
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for ell in 1..=r {
        b = b.mul(&qm.minus_scalar((q as i64).pow(r + ell - 1)))?;
        let mut by_delta: BTreeMap<u32, i64> = BTreeMap::new();
        for i in 0..n * n {
            let d = delta[i] as u32;
            let prev = *by_delta.entry(d).or_insert(b.data[i]);
            if prev != b.data[i] {
                return Err(Error::Violation(format!(
                    "B^({ell}) is not constant on the Δ = {d} stratum"
                )));
            }
        }
        for d in 1..=r {
            let (Some(&lo), Some(&hi)) = (by_delta.get(&(d - 1)), by_delta.get(&d)) else {
                continue;
            };
            let measured = (lo - hi) as i128;
            let predicted = b_difference_expected(q, r, ell, d);
            checked += 1;
            if measured != predicted {
                mismatches.push((ell, d, measured, predicted));
            }
        }
    }
    Ok(BDifferenceReport {
        q,
        r,
        mismatches,
        checked,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenEntry {
    pub value_squared_exact: u64,
    pub value_float: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub ring: String,
    pub n_vertices: usize,
    pub degree: Option<usize>,
    pub connected: bool,
    pub bipartite: bool,
    /// Adjacency eigenvalues `±√λ`, ascending.
    pub eigenvalues: Vec<EigenEntry>,
    pub method: String,
    /// Largest deviation of the numeric spectrum from the exact one.
    pub numeric_deviation: Option<f64>,
    pub second_normalized: f64,
    pub matches_theorem: bool,
}

/// The eigenvalues of `Q` predicted by the theorem: `λ₁` and `q^j`, `r ≤ j < 2r`.
pub fn q_eigenvalues_expected(q: u64, r: u32) -> Vec<u64> {
    let mut v = vec![(q + 1) * (q + 1) * q.pow(2 * (r - 1))];
    v.extend((r..2 * r).map(|j| q.pow(j)));
    v
}

/// Exact multiplicities of the eigenvalues of `Q`. Requires the annihilating
/// polynomial to hold, so that `Q` (symmetric) is diagonalizable with spectrum
/// inside the candidate set and the nullities over `Q` sum to `n`. Nullities
/// over `F_p` bound those over `Q` from above, so if they also sum to `n` they
/// are exact. Falls back to fraction-free elimination otherwise.
pub fn q_multiplicities(qm: &IntMatrix, candidates: &[u64]) -> Result<(Vec<usize>, &'static str)> {
    let n = qm.rows;
    let modular: Vec<usize> = candidates
        .iter()
        .map(|&l| n - qm.minus_scalar(l as i64).rank_mod(RANK_PRIME))
        .collect();
    if modular.iter().sum::<usize>() == n {
        return Ok((modular, "certified-modular-rank"));
    }
    let exact: Vec<usize> = candidates
        .iter()
        .map(|&l| n - qm.minus_scalar(l as i64).rank_exact())
        .collect();
    if exact.iter().sum::<usize>() != n {
        return Err(Error::Violation(format!(
            "eigenspace dimensions {exact:?} do not sum to {n}"
        )));
    }
    Ok((exact, "bareiss-rank"))
}

/// Exact and numeric spectrum of `P²_fr(O_r)`.
pub fn spectrum(plane: &FreePlane, numeric: bool) -> Result<SpectrumReport> {
    let (q, r) = (plane.ring().q(), plane.ring().r());
    let qm = q_matrix(plane);
    let delta = delta_matrix(plane);
    let ann = verify_annihilator(plane, &qm, &delta)?;
    if !ann.holds {
        return Err(Error::Violation(format!(
            "annihilating product is not a nonzero multiple of J (c = {:?}, expected {:?})",
            ann.c, ann.expected_c
        )));
    }
    let cands = q_eigenvalues_expected(q, r);
    let (mults, method) = q_multiplicities(&qm, &cands)?;
    let mut eigenvalues = Vec::new();
    for (&l, &m) in cands.iter().zip(&mults) {
        if m == 0 {
            continue;
        }
        let s = (l as f64).sqrt();
        for v in [-s, s] {
            eigenvalues.push(EigenEntry {
                value_squared_exact: l,
                value_float: v,
                multiplicity: m,
            });
        }
    }
    eigenvalues.sort_by(|a, b| a.value_float.total_cmp(&b.value_float));
    let numeric_deviation = if numeric {
        let ev = eigen::eigensolve(&GraphOperator::adjacency(plane.graph()), 0, Mode::Dense, 1e-10)?;
        let mut expected: Vec<f64> = eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat(e.value_float).take(e.multiplicity))
            .collect();
        expected.sort_by(f64::total_cmp);
        let mut got = ev.values.clone();
        got.sort_by(f64::total_cmp);
        if got.len() != expected.len() {
            return Err(Error::Violation("numeric spectrum has the wrong size".into()));
        }
        Some(got.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    } else {
        None
    };
    let g = plane.graph();
    let degree = g.regular_degree();
    let all_present = mults.iter().all(|&m| m > 0);
    let n_expected = 2 * crate::free::line_count(q, r) as usize;
    let second_normalized = (q.pow(2 * r - 1) as f64).sqrt() / plane.expected_degree() as f64;
    Ok(SpectrumReport {
        ring: plane.ring().spec().to_string(),
        n_vertices: g.n(),
        degree,
        connected: g.is_connected(),
        bipartite: g.bipartition().is_some(),
        matches_theorem: all_present
            && mults[0] == 1
            && g.n() == n_expected
            && degree == Some(plane.expected_degree()),
        eigenvalues,
        method: method.to_string(),
        numeric_deviation,
        second_normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::LocalRing;

    #[test]
    fn annihilator_constants() {
        for (q, r, c) in [(2u64, 2u32, 32i64), (2, 1, 1)] {
            let plane = FreePlane::build(&LocalRing::padic(q, r).unwrap());
            let qm = q_matrix(&plane);
            let rep = verify_annihilator(&plane, &qm, &delta_matrix(&plane)).unwrap();
            assert!(rep.holds);
            assert_eq!(rep.c, Some(c));
            assert!(rep.compressed_agrees);
        }
    }

    #[test]
    fn n_table_examples() {
        assert_eq!(n_expected(2, 2, 1, 1, 1), 2);
        assert_eq!(n_expected(2, 2, 1, 2, 2), 24);
        for d in 0..=2 {
            assert_eq!(n_expected(2, 2, d, 0, d), 1);
        }
        assert_eq!(n_expected(2, 2, 2, 1, 1), 0);
    }

    #[test]
    fn heawood_spectrum_exact() {
        let plane = FreePlane::build(&LocalRing::padic(2, 1).unwrap());
        let rep = spectrum(&plane, true).unwrap();
        let vals: Vec<(u64, usize)> = rep.eigenvalues.iter().map(|e| (e.value_squared_exact, e.multiplicity)).collect();
        assert_eq!(vals, vec![(9, 1), (2, 6), (2, 6), (9, 1)]);
        assert!(rep.numeric_deviation.unwrap() < 1e-9);
        assert!(rep.matches_theorem);
    }

    #[test]
    fn q_multiplicities_cross_check_bareiss() {
        let plane = FreePlane::build(&LocalRing::padic(2, 2).unwrap());
        let qm = q_matrix(&plane);
        for l in q_eigenvalues_expected(2, 2) {
            let m = qm.minus_scalar(l as i64);
            assert_eq!(m.rank_exact(), m.rank_mod(RANK_PRIME));
        }
    }
}
