use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hdx_core::building::build_ball;
use hdx_core::complex::ColoredComplex;
use hdx_core::ring::RingKind;
use hdx_core::walks::geodesic::{apply_am, sample_geodesic};
use hdx_core::walks::hall_littlewood::am_degree;

const RADIUS: u32 = 5;

fn ball_complex() -> (ColoredComplex, Vec<u32>) {
    let ball = build_ball(RingKind::Padic, 2, RADIUS).unwrap();
    let dist = (0..ball.len() as u32).map(|v| ball.distance(v)).collect();
    (ball.complex().unwrap(), dist)
}

#[test]
fn geodesics_are_unique_and_invert_to_color_two() {
    let (cx, dist) = ball_complex();
    for r in 1..=3usize {
        for v in (0..cx.n() as u32).filter(|&v| dist[v as usize] as usize + r <= RADIUS as usize) {
            let paths = cx.geodesics(v, r);
            let ends: HashSet<u32> = paths.iter().map(|p| p[r]).collect();
            assert_eq!(ends.len(), paths.len(), "two {r}-geodesics share endpoints from {v}");
            for p in &paths {
                let mut back: Vec<u32> = p.clone();
                back.reverse();
                let mut found = false;
                cx.for_each_geodesic(p[r], r, 2, &mut |q| found |= q == back.as_slice());
                assert!(found, "reverse of {p:?} is not a color-2 geodesic");
            }
        }
    }
}

#[test]
fn am_is_self_adjoint_with_the_stated_degree() {
    let (cx, dist) = ball_complex();
    let q: u64 = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inner: Vec<u32> = (0..cx.n() as u32).filter(|&v| dist[v as usize] <= 2).collect();
    let n = cx.n();
    let random = |rng: &mut ChaCha8Rng| {
        let mut f = vec![0i64; n];
        for &v in &inner {
            f[v as usize] = rng.gen_range(-50..=50);
        }
        f
    };
    let ones = vec![1i64; n];
    for m in 0..=3usize {
        for _ in 0..5 {
            let (f, g) = (random(&mut rng), random(&mut rng));
            let lhs: i64 = inner.iter().map(|&v| g[v as usize] * apply_am(&cx, &f, m, v)).sum();
            let rhs: i64 = inner.iter().map(|&v| f[v as usize] * apply_am(&cx, &g, m, v)).sum();
            assert_eq!(lhs, rhs, "m = {m}");
        }
        if m == 0 {
            assert!(inner.iter().all(|&v| apply_am(&cx, &ones, 0, v) == 1));
            continue;
        }
        for v in (0..n as u32).filter(|&v| dist[v as usize] as usize + m <= RADIUS as usize) {
            assert_eq!(cx.geodesics(v, m).len() as u64, (q * q + q + 1) * q.pow(2 * (m as u32 - 1)));
            assert_eq!(apply_am(&cx, &ones, m, v) as u64, am_degree(q, m as u32));
        }
    }
}

#[test]
fn two_stage_sampler_is_uniform() {
    let (cx, _) = ball_complex();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // 0.999 quantiles of χ² with 27 and 111 degrees of freedom.
    for (m, critical) in [(2usize, 55.476), (3, 162.788)] {
        let all = cx.geodesics(0, m);
        let cells = all.len();
        let per_cell = 200;
        let mut counts: HashMap<Vec<u32>, u64> = all.into_iter().map(|p| (p, 0)).collect();
        for _ in 0..cells * per_cell {
            let p = sample_geodesic(&cx, 0, m, 1, &mut rng).unwrap();
            *counts.get_mut(&p).expect("sampled path is a geodesic") += 1;
        }
        let e = per_cell as f64;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        assert!(chi2 < critical, "m = {m}: χ² = {chi2}");
    }
}
