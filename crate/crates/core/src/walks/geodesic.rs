//! Geodesic operators `A_m` and the vertex–geodesic incidence graph `G^(r)`,
//! evaluated locally on a colored complex.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::ColoredComplex;
use crate::error::{Error, Result};

/// `(A_m f)(v) = Σ_{w ∈ S¹_m(v) ∪ S²_m(v)} f(w)`; `A_0` is the identity.
pub fn apply_am(x: &ColoredComplex, f: &[i64], m: usize, v: u32) -> i64 {
    if m == 0 {
        return f[v as usize];
    }
    let mut acc = 0;
    for c in [1, 2] {
        x.for_each_geodesic(v, m, c, &mut |p| acc += f[p[m] as usize]);
    }
    acc
}

/// All color-1 `r`-geodesics having `v` as a vertex, as vertex sequences.
pub fn geodesics_through(x: &ColoredComplex, v: u32, r: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for i in 0..=r {
        let mut backs = Vec::new();
        // A color-2 geodesic from v, reversed, is a color-1 geodesic into v.
        x.for_each_geodesic(v, i, 2, &mut |p| backs.push(p.iter().rev().copied().collect::<Vec<_>>()));
        let mut fronts = Vec::new();
        x.for_each_geodesic(v, r - i, 1, &mut |p| fronts.push(p.to_vec()));
        for b in &backs {
            for f in &fronts {
                if i > 0 && r > i {
                    let (prev, next) = (b[i - 1], f[1]);
                    if prev == next || x.is_triangle(prev, v, next) {
                        continue;
                    }
                }
                let mut g = b.clone();
                g.extend_from_slice(&f[1..]);
                out.push(g);
            }
        }
    }
    out
}

/// Two-stage sampler of a color-`c` `r`-geodesic from `v`: a uniform first
/// edge, then a uniform admissible continuation at each step. On a regular
/// neighborhood every geodesic has probability `1/((q²+q+1)q^{2(r−1)})`.
/// Returns `None` at a dead end (the boundary of a ball).
pub fn sample_geodesic(x: &ColoredComplex, v: u32, r: usize, c: u8, rng: &mut impl Rng) -> Option<Vec<u32>> {
    let mut path = vec![v];
    let mut options = Vec::new();
    while path.len() <= r {
        let k = path.len();
        let last = path[k - 1];
        options.clear();
        options.extend(x.out_neighbors(last, c).iter().copied().filter(|&w| {
            k < 2 || {
                let prev = path[k - 2];
                w != prev && !x.is_triangle(prev, last, w)
            }
        }));
        path.push(*options.choose(rng)?);
    }
    Some(path)
}

/// `N_0 = (r+1)(q²+q+1)q^{2(r−1)}`, `N_m = (r−m+1)q^{2(r−m)}` for `0 < m ≤ r`.
pub fn n_expected(q: u64, r: u32, m: u32) -> u64 {
    if m == 0 {
        (r as u64 + 1) * (q * q + q + 1) * q.pow(2 * (r - 1))
    } else {
        (r - m + 1) as u64 * q.pow(2 * (r - m))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GvrReport {
    pub q: u64,
    pub r: u32,
    pub pairs_checked: usize,
    pub pair_mismatches: usize,
    /// `λ₁(A²) = (r+1)²(q²+q+1)q^{2(r−1)}` from the constant function.
    pub lambda1_expected: u64,
    pub lambda1_constant: u64,
    /// `Σ_m N_m·deg(A_m)`
    pub lambda1_from_counts: u64,
    pub decomposition_vertices: usize,
    pub decomposition_mismatches: usize,
}

impl GvrReport {
    pub fn passed(&self) -> bool {
        self.pair_mismatches == 0
            && self.decomposition_mismatches == 0
            && self.lambda1_expected == self.lambda1_constant
            && self.lambda1_expected == self.lambda1_from_counts
    }
}

/// Checks the `N_m^(r)` counts at `pairs` sampled pairs `w ∈ S¹_m(v)` and the
/// identity `A²|vertex = Σ_m N_m A_m` on `tests` random integer functions.
/// `interior` lists vertices whose `r`-neighborhood lies inside `x`.
pub fn gvr_check(
    x: &ColoredComplex,
    q: u64,
    r: u32,
    interior: &[u32],
    pairs: usize,
    tests: usize,
    seed: u64,
) -> Result<GvrReport> {
    if interior.is_empty() || r == 0 {
        return Err(Error::Invalid("no interior vertices or r = 0".into()));
    }
    let ru = r as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pair_mismatches = 0;
    for k in 0..pairs {
        let m = k % (ru + 1);
        let v = *interior.choose(&mut rng).unwrap();
        let through = geodesics_through(x, v, ru);
        let w = if m == 0 {
            v
        } else {
            *x.geodesic_endpoints(v, m, 1).choose(&mut rng).unwrap()
        };
        let count = through.iter().filter(|g| g.contains(&w)).count() as u64;
        if count != n_expected(q, r, m as u32) {
            pair_mismatches += 1;
        }
    }
    let n = x.n();
    let ones = vec![1i64; n];
    let v0 = interior[0];
    let lambda1_constant: i64 = geodesics_through(x, v0, ru).iter().map(|g| g.len() as i64).sum();
    let lambda1_from_counts = (0..=r)
        .map(|m| n_expected(q, r, m) * crate::walks::hall_littlewood::am_degree(q, m))
        .sum();
    debug_assert_eq!(apply_am(x, &ones, 0, v0), 1);
    // Both sides at a sample of interior vertices.
    let sample: Vec<u32> = interior.choose_multiple(&mut rng, interior.len().min(20)).copied().collect();
    let mut decomposition_mismatches = 0;
    for _ in 0..tests {
        let f: Vec<i64> = (0..n).map(|_| rng.gen_range(-1000..=1000)).collect();
        for &v in &sample {
            let lhs: i64 = geodesics_through(x, v, ru)
                .iter()
                .map(|g| g.iter().map(|&u| f[u as usize]).sum::<i64>())
                .sum();
            let rhs: i64 = (0..=ru)
                .map(|m| n_expected(q, r, m as u32) as i64 * apply_am(x, &f, m, v))
                .sum();
            decomposition_mismatches += (lhs != rhs) as usize;
        }
    }
    Ok(GvrReport {
        q,
        r,
        pairs_checked: pairs,
        pair_mismatches,
        lambda1_expected: (r as u64 + 1).pow(2) * (q * q + q + 1) * q.pow(2 * (r - 1)),
        lambda1_constant: lambda1_constant as u64,
        lambda1_from_counts,
        decomposition_vertices: sample.len(),
        decomposition_mismatches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AmSpectrum {
    pub m: u32,
    pub degree: u64,
    /// Largest eigenvalues, descending.
    pub top: Vec<f64>,
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    /// Second largest eigenvalue.
    pub lambda2: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Top-`k` Lanczos eigenvalues of `A_1 = A_1^col + A_2^col` on `X^{p,q}`.
/// Larger `m` would need a `|G| × |S_p^(m)|` table and is refused.
pub fn am_spectrum_cayley(x: &crate::cayley::CayleyGroup, m: u32, k: usize, tol: f64) -> Result<AmSpectrum> {
    use crate::cayley::CayleyOperator;
    use crate::spectral::eigen::{lanczos_top, LanczosConfig};
    use crate::walks::hall_littlewood::{am_degree, lambda_m_bound};
    if m != 1 {
        let width = am_degree(x.p, m) as u128;
        return Err(crate::error::overflow(
            "A_m neighbor table entries",
            width * x.order() as u128,
            2 * x.degree() as u128 * x.order() as u128,
        ));
    }
    let inverse = x.table_for(&x.inverse_gens()?)?;
    let d = x.degree();
    let op = CayleyOperator::new(x.order(), vec![(x.right_table(), d), (&inverse, d)]);
    let res = lanczos_top(&op, &[], &LanczosConfig::top(k, tol))?;
    let bound = lambda_m_bound(x.p, m);
    let lambda2 = res.values.get(1).copied().unwrap_or(f64::NAN);
    Ok(AmSpectrum {
        m,
        degree: am_degree(x.p, m),
        lambda2,
        within_bound: lambda2 <= bound,
        bound,
        top: res.values,
        residuals: res.residuals,
        matvecs: res.matvecs,
    })
}
