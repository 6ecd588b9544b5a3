//! Monte-Carlo sampler experiments: walks on expanders, the vertex/geodesic
//! sampler and the geodesic/long-walk sampler on `X^{p,q}`, and the `r`-walk.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::CayleyGroup;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::walks::power::PowerData;

const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `x` successes in `n` trials at 95%.
pub fn wilson(x: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (n, p) = (n as f64, x as f64 / n as f64);
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Independent per-trial stream derived from `(seed, trial)`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// SplitMix64 finalizer, used to hash sequences into `[0, 1)`.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hash_seq(seed: u64, xs: &[u32]) -> u64 {
    xs.iter().fold(mix(seed), |h, &x| mix(h ^ x as u64))
}

#[derive(Clone, Debug, Serialize)]
pub struct BadFraction {
    pub trials: u64,
    pub bad: u64,
    pub fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// `1/f`
    pub target: f64,
    /// The target is at least 1, so the bound holds for any outcome.
    pub vacuous: bool,
    pub within_target: bool,
}

impl BadFraction {
    fn new(bad: u64, trials: u64, target: f64) -> Self {
        let (lo, hi) = wilson(bad, trials);
        Self {
            trials,
            bad,
            fraction: bad as f64 / trials as f64,
            wilson_low: lo,
            wilson_high: hi,
            target,
            vacuous: target >= 1.0,
            within_target: hi <= target,
        }
    }
}

/// `|x − α| ≥ ε`, computed in integers when `x = hits/size`.
fn deviates(hits: usize, size: usize, alpha: f64, eps: f64) -> bool {
    // A small tolerance keeps exact ties (e.g. 1/2 − 3/10 = 1/5) on the bad side.
    (hits as f64 / size as f64 - alpha).abs() >= eps - 1e-12
}

/// A random subset of `0..n` of size `round(αn)`, as a membership mask.
pub fn random_subset(n: usize, alpha: f64, rng: &mut impl Rng) -> Vec<bool> {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut mask = vec![false; n];
    for &i in &ids[..(alpha * n as f64).round() as usize] {
        mask[i] = true;
    }
    mask
}

/// `k`-step random walks on a regular graph as samplers of vertex sets:
/// bad when the fraction of the `k` visited vertices (after the start) in `S`
/// deviates from `α` by `ε`; target `1/f = exp(−ε²k(1−λ)/60)`.
pub fn expander_sampler(g: &Graph, lambda: f64, k: usize, eps: f64, alpha: f64, trials: u64, seed: u64) -> BadFraction {
    let n = g.n();
    let mask = random_subset(n, alpha, &mut trial_rng(seed, u64::MAX));
    let density = mask.iter().filter(|&&b| b).count() as f64 / n as f64;
    let bad: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut v = rng.gen_range(0..n as u32);
            let mut hits = 0;
            for _ in 0..k {
                let nb = g.neighbors(v);
                v = nb[rng.gen_range(0..nb.len())];
                hits += mask[v as usize] as usize;
            }
            deviates(hits, k, density, eps) as u64
        })
        .sum();
    BadFraction::new(bad, trials, (-eps * eps * k as f64 * (1.0 - lambda) / 60.0).exp())
}

/// Vertices of the power edge `g → g·t`.
fn leg(x: &CayleyGroup, power: &PowerData, g: u32, t: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(power.r + 1);
    out.push(g);
    let mut v = g;
    for &s in &power.words[t as usize] {
        v = x.right(v)[s as usize];
        out.push(v);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleSamplerReport {
    pub p: u64,
    pub q: u64,
    pub k: usize,
    pub big_k: usize,
    pub eps: f64,
    pub alpha: f64,
    /// Vertices against uniformly sampled `k`-geodesics (`k+1` vertices each).
    pub vertex_level: BadFraction,
    /// `k`-geodesics against `k`-walks of length `K/k` (their `K/k` legs).
    pub geodesic_level: BadFraction,
    /// Walks in which some window other than the legs is a `k`-geodesic.
    pub extra_geodesic_walks: u64,
    /// The complex density is below the theorem's threshold 37.
    pub below_density_threshold: bool,
}

/// The double sampler with `L = X(0)`, `R` = `k`-geodesics, `W` = walks made
/// of `K/k` legs where consecutive legs bound a power triangle.
pub fn double_sampler(
    x: &CayleyGroup,
    power: &PowerData,
    big_k: usize,
    eps: f64,
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Result<DoubleSamplerReport> {
    let k = power.r;
    if big_k % k != 0 || big_k == 0 {
        return Err(Error::Invalid(format!("K = {big_k} is not a positive multiple of k = {k}")));
    }
    if x.is_tripartite() {
        return Err(Error::Invalid("vertex-level sampler needs a non-tripartite complex".into()));
    }
    let n = x.order();
    let legs = big_k / k;
    let q = x.p as f64;
    let mask = random_subset(n, alpha, &mut trial_rng(seed, u64::MAX));
    let density = mask.iter().filter(|&&b| b).count() as f64 / n as f64;
    // T ⊂ R: a hash threshold on the leg's vertex sequence.
    let t_seed = mix(seed ^ 0x5eed);
    let threshold = (alpha * u64::MAX as f64) as u64;
    let in_t = |vs: &[u32]| hash_seq(t_seed, vs) < threshold;
    let first_closers = crate::cayley::sigma_tables(&x.sp).closers;
    let (bad1, bad2, extra) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let g = rng.gen_range(0..n as u32);
            let t = rng.gen_range(0..power.len() as u32);
            let vs = leg(x, power, g, t);
            let hits = vs.iter().filter(|&&v| mask[v as usize]).count();
            let bad1 = deviates(hits, k + 1, density, eps) as u64;
            let (mut g, mut t) = (rng.gen_range(0..n as u32), rng.gen_range(0..power.len() as u32));
            let mut in_count = 0;
            let mut extra = false;
            let mut prev_last: Option<u32> = None;
            for _ in 0..legs {
                let vs = leg(x, power, g, t);
                in_count += in_t(&vs) as usize;
                let word = &power.words[t as usize];
                if let Some(last) = prev_last {
                    // The junction turns: the windows across it are not geodesics.
                    extra |= first_closers[last as usize].binary_search(&word[0]).is_err();
                }
                prev_last = Some(*word.last().unwrap());
                let cs = &power.closers[t as usize];
                let (u, _) = cs[rng.gen_range(0..cs.len())];
                g = vs[k];
                t = u;
            }
            let bad2 = deviates(in_count, legs, alpha, eps) as u64;
            (bad1, bad2, extra as u64)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let target1 = alpha / (eps * eps * k as f64);
    let target2 = (-eps * eps * (1.0 / 3.0 - 2.0 / q.sqrt()) * big_k as f64 / (60.0 * k as f64)).exp();
    Ok(DoubleSamplerReport {
        p: x.p,
        q: x.q,
        k,
        big_k,
        eps,
        alpha,
        vertex_level: BadFraction::new(bad1, trials, target1),
        geodesic_level: BadFraction::new(bad2, trials, target2),
        extra_geodesic_walks: extra,
        below_density_threshold: x.p < 37,
    })
}

/// One `r`-walk move from the power edge `(g, t)`: the power triangle is
/// `cs[closer]` and `second` picks which of its two other edges becomes
/// current. Returns the power words leading from `g` to the new base vertex
/// and the new edge label.
pub fn rwalk_move(power: &PowerData, t: u32, closer: usize, second: bool) -> (Vec<u32>, u32) {
    let (u, t2) = power.closers[t as usize][closer];
    if second {
        (vec![t, u], t2)
    } else {
        (vec![t], u)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingEstimate {
    pub r: usize,
    pub buckets: usize,
    pub trials: u64,
    /// `(steps, total variation to uniform over buckets)`
    pub profile: Vec<(usize, f64)>,
    /// Expected total variation of an exactly uniform sample of this size.
    pub noise_floor: f64,
}

/// Runs the `r`-walk (uniform power triangle through the current power edge,
/// then one of its two other edges) from the edge `e → t_0` and compares the
/// bucketed distribution of the current edge with uniform.
pub fn rwalk_mixing(
    x: &CayleyGroup,
    power: &PowerData,
    checkpoints: &[usize],
    buckets: usize,
    trials: u64,
    seed: u64,
) -> MixingEstimate {
    let max = checkpoints.iter().copied().max().unwrap_or(0);
    let hseed = mix(seed ^ 0xb0c4);
    let finals: Vec<Vec<usize>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let (mut g, mut t) = (0u32, 0u32);
            let mut seen = Vec::with_capacity(checkpoints.len());
            for step in 0..=max {
                if checkpoints.contains(&step) {
                    let vs = leg(x, power, g, t);
                    seen.push(hash_seq(hseed, &[vs[0], vs[power.r]]) as usize % buckets);
                }
                let closer = rng.gen_range(0..power.closers[t as usize].len());
                let (path, next) = rwalk_move(power, t, closer, rng.gen_bool(0.5));
                for w in path {
                    g = leg(x, power, g, w)[power.r];
                }
                t = next;
            }
            seen
        })
        .collect();
    let mut cps: Vec<usize> = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let profile = cps
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut hist = vec![0u64; buckets];
            for f in &finals {
                hist[f[i]] += 1;
            }
            let tv = hist
                .iter()
                .map(|&c| (c as f64 / trials as f64 - 1.0 / buckets as f64).abs())
                .sum::<f64>()
                / 2.0;
            (s, tv)
        })
        .collect();
    MixingEstimate {
        r: power.r,
        buckets,
        trials,
        profile,
        noise_floor: (buckets as f64 / (2.0 * std::f64::consts::PI * trials as f64)).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson(0, 100);
        assert!(lo < 1e-15);
        assert!((hi - 0.037).abs() < 1e-3);
        let (lo, hi) = wilson(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && (hi - 0.5 - (0.5 - lo)).abs() < 1e-12);
    }

    #[test]
    fn trivial_sets_never_deviate() {
        let g = Graph::from_edges(5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))));
        for alpha in [0.0, 1.0] {
            let r = expander_sampler(&g, 0.25, 10, 0.1, alpha, 500, 1);
            assert_eq!(r.bad, 0);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a: u64 = trial_rng(7, 3).gen();
        let b: u64 = trial_rng(7, 3).gen();
        let c: u64 = trial_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
