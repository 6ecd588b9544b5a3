//! Brute-force enumeration of every submodule of `O_r^3` for tiny rings,
//! stored as bitmasks over the `|O_r|^3 ≤ 64` vectors.

use std::collections::BTreeSet;

use hdx_core::flags::free_submodules;
use hdx_core::free::FreePlane;
use hdx_core::ring::{LocalRing, RingElem};
use hdx_core::smith::{smith_form, Matrix};

type Vec3 = [RingElem; 3];

fn encode(s: u64, v: &Vec3) -> usize {
    (v[0] + s * v[1] + s * s * v[2]) as usize
}

fn decode(s: u64, i: usize) -> Vec3 {
    let i = i as u64;
    [i % s, (i / s) % s, i / (s * s)]
}

fn span(ring: &LocalRing, gens: &[Vec3]) -> u64 {
    let s = ring.size();
    let mut mask = 0u64;
    let mut coeffs = vec![0; gens.len()];
    loop {
        let mut v = [0; 3];
        for (c, g) in coeffs.iter().zip(gens) {
            for i in 0..3 {
                v[i] = ring.add(v[i], ring.mul(*c, g[i]));
            }
        }
        mask |= 1 << encode(s, &v);
        // Odometer over coefficient tuples.
        let mut k = 0;
        while k < coeffs.len() {
            coeffs[k] += 1;
            if coeffs[k] < s {
                break;
            }
            coeffs[k] = 0;
            k += 1;
        }
        if k == coeffs.len() {
            return mask;
        }
    }
}

/// Every submodule, with a generating triple for each.
fn all_submodules(ring: &LocalRing) -> Vec<(u64, [Vec3; 3])> {
    let s = ring.size();
    let n = (s * s * s) as usize;
    assert!(n <= 64);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                let gens = [decode(s, a), decode(s, b), decode(s, c)];
                let m = span(ring, &gens);
                if seen.insert(m) {
                    out.push((m, gens));
                }
            }
        }
    }
    out
}

/// `|π^k N|` for `N ≅ ⊕ π^{e_i} O_r`.
fn scaled_size(q: u64, r: u32, exps: &[u32], k: u32) -> u64 {
    exps.iter().map(|&e| q.pow(r.saturating_sub(e + k))).product()
}

fn exponents(ring: &LocalRing, gens: &[Vec3; 3]) -> Vec<u32> {
    let cols: Vec<Vec<RingElem>> = gens.iter().map(|g| g.to_vec()).collect();
    smith_form(ring, &Matrix::from_columns(&cols)).module_exponents()
}

fn check_duality(ring: &LocalRing) -> usize {
    let (q, r, s) = (ring.q(), ring.r(), ring.size());
    let n = (s * s * s) as usize;
    let subs = all_submodules(ring);
    for (mask, gens) in &subs {
        let m = exponents(ring, gens);
        assert!(m.windows(2).all(|w| w[0] >= w[1]) && m[0] <= r);
        for k in 0..=r {
            let pk = ring.pi_pow(k);
            let scaled: Vec<Vec3> = (0..n)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| decode(s, i).map(|x| ring.mul(pk, x)))
                .collect();
            let pi_m = scaled.iter().fold(0u64, |acc, v| acc | 1 << encode(s, v));
            assert_eq!(pi_m.count_ones() as u64, scaled_size(q, r, &m, k), "π^{k}M for {m:?}");
            // π^k(O^3/M) = (π^k O^3 + M)/M.
            let basis = [[pk, 0, 0], [0, pk, 0], [0, 0, pk]];
            let mut sum_gens: Vec<Vec3> = basis.to_vec();
            sum_gens.extend_from_slice(gens);
            let sum = span(ring, &sum_gens);
            let quotient = sum.count_ones() as u64 / mask.count_ones() as u64;
            let dual: Vec<u32> = m.iter().rev().map(|&mi| r - mi).collect();
            assert_eq!(quotient, scaled_size(q, r, &dual, k), "π^k(O^3/M) for {m:?}");
        }
    }
    subs.len()
}

#[test]
fn quotient_exponents_are_dual() {
    for ring in [LocalRing::padic(2, 1), LocalRing::padic(2, 2), LocalRing::laurent(2, 2)] {
        let ring = ring.unwrap();
        let count = check_duality(&ring);
        assert!(count > 0);
    }
}

#[test]
fn free_submodules_match_exponent_pattern() {
    for ring in [LocalRing::padic(2, 1), LocalRing::padic(2, 2)] {
        let ring = ring.unwrap();
        let r = ring.r();
        let s = ring.size();
        let subs = all_submodules(&ring);
        for k in 1..=2 {
            let expected: BTreeSet<u64> = subs
                .iter()
                .filter(|(_, g)| {
                    let m = exponents(&ring, g);
                    m.iter().all(|&x| x == 0 || x == r) && m.iter().filter(|&&x| x == 0).count() == k
                })
                .map(|(mask, _)| *mask)
                .collect();
            let found: BTreeSet<u64> = free_submodules(&ring, 3, k)
                .iter()
                .map(|f| {
                    let cols: Vec<Vec3> = f.basis.iter().map(|c| [c[0], c[1], c[2]]).collect();
                    span(&ring, &cols)
                })
                .collect();
            assert_eq!(found, expected, "rank {k} over {s} elements");
        }
    }
}

#[test]
fn plane_kernels_are_the_free_rank_two_submodules() {
    let ring = LocalRing::padic(2, 2).unwrap();
    let r = ring.r();
    let plane = FreePlane::build(&ring);
    let n = plane.n_lines();
    let kernels: BTreeSet<u64> = (n..2 * n)
        .map(|p| {
            let lines: Vec<Vec3> = plane.graph().neighbors(p as u32).iter().map(|&l| plane.lines()[l as usize]).collect();
            span(&ring, &lines)
        })
        .collect();
    let smith: BTreeSet<u64> = all_submodules(&ring)
        .into_iter()
        .filter(|(_, g)| exponents(&ring, g) == vec![r, 0, 0])
        .map(|(mask, _)| mask)
        .collect();
    assert_eq!(kernels.len(), n);
    assert_eq!(kernels, smith);
}
