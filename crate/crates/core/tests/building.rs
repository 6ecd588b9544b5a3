use hdx_core::building::{build_ball, sphere_size, stratum_size};
use hdx_core::ring::RingKind;

#[test]
fn spheres_match_census_for_p2() {
    let ball = build_ball(RingKind::Padic, 2, 3).unwrap();
    assert!(ball.colors_consistent());
    let total: u64 = (0..=3).map(|r| sphere_size(2, r)).sum();
    assert_eq!(ball.len() as u64, total);
    for r in 1..=3 {
        let c = ball.sphere(r).census();
        assert_eq!(c.size as u64, c.expected_size, "r = {r}");
        assert_eq!(c.stratum_mismatches, 0, "{:?}", c.strata);
        assert_eq!(c.degree_mismatches, 0);
        assert_eq!(c.distance_mismatches, 0);
    }
}

#[test]
fn laurent_ball_has_same_census() {
    let ball = build_ball(RingKind::Laurent, 2, 2).unwrap();
    let c = ball.sphere(2).census();
    assert_eq!(c.size as u64, c.expected_size);
    assert_eq!(c.stratum_mismatches, 0);
    assert_eq!(c.degree_mismatches, 0);
}

#[test]
fn color_one_neighbors_of_iwahori_vertex() {
    let ball = build_ball(RingKind::Padic, 3, 2).unwrap();
    let base = ball.vertex(&[1, 0, 0, 0, 1, 0, 0, 0, 3]).unwrap();
    let mut counts = std::collections::BTreeMap::new();
    for &w in ball.out1(0) {
        *counts.entry(ball.stratum(w)).or_insert(0u64) += 1;
    }
    assert_eq!(ball.stratum(base), [0, 0, 1]);
    assert_eq!(counts[&[1, 0, 0]], 9);
    assert_eq!(counts[&[0, 1, 0]], 3);
    assert_eq!(counts[&[0, 0, 1]], 1);
    assert_eq!(stratum_size(3, [1, 0, 0]), 9);
}

#[test]
fn half_sphere_cut_ratio() {
    let ball = build_ball(RingKind::Padic, 2, 3).unwrap();
    let cut = ball.sphere(3).half_sphere_cut().unwrap();
    assert!(cut.exact_match, "{cut:?}");
    assert_eq!(cut.cut.cut_edges, cut.cut_from_complement);
    assert!((cut.ratio - 1.0 / 7.0).abs() < 1e-12);
}

#[test]
fn rayleigh_witness_and_low_spectra() {
    let ball = build_ball(RingKind::Padic, 2, 3).unwrap();
    assert_eq!(ball.sphere(2).rayleigh_witness().quotient, None);
    let w = ball.sphere(3).rayleigh_witness();
    assert!((w.quotient.unwrap() - w.cos_2pi_over_r).abs() < 1e-10, "{w:?}");
    assert!(w.perron_overlap.abs() < 1e-10);
    for r in 1..=2 {
        let s = ball.sphere(r).spectrum(1e-10).unwrap();
        assert!((s.lambda2 - s.expected.unwrap()).abs() < 1e-9, "{s:?}");
    }
}

#[test]
fn p3_radius3_sphere() {
    let ball = build_ball(RingKind::Padic, 3, 3).unwrap();
    assert_eq!(ball.len(), 5331);
    let s = ball.sphere(3);
    let c = s.census();
    assert_eq!((c.size, c.stratum_mismatches, c.degree_mismatches), (4914, 0, 0));
    let cut = s.half_sphere_cut().unwrap();
    assert!(cut.exact_match);
    assert!((cut.ratio - 7.0 / 39.0).abs() < 1e-12);
    let w = s.rayleigh_witness();
    let spec = s.spectrum(1e-10).unwrap();
    assert!(spec.lambda2 >= w.quotient.unwrap() - 1e-9, "{spec:?}");
    let low = ball.sphere(2).spectrum(1e-10).unwrap();
    assert!((low.lambda2 - low.expected.unwrap()).abs() < 1e-8);
}

#[test]
fn radius4_witness_is_zero() {
    let ball = build_ball(RingKind::Padic, 2, 4).unwrap();
    assert_eq!(ball.len(), 3585);
    let w = ball.sphere(4).rayleigh_witness();
    assert!(w.quotient.unwrap().abs() < 1e-10);
}

#[test]
fn color_one_path_conditions_agree() {
    for (q, radius, r) in [(2, 2, 2), (3, 2, 2), (2, 3, 3)] {
        let ball = build_ball(RingKind::Padic, q, radius).unwrap();
        let rep = ball.path_equivalences(r).unwrap();
        assert_eq!(rep.paths as u64, (q * q + q + 1).pow(r), "{rep:?}");
        assert_eq!(rep.disagreements, 0, "{rep:?}");
        // Geodesics of length r from a vertex: (q²+q+1)·q^(2(r−1)).
        assert_eq!(rep.geodesic as u64, (q * q + q + 1) * q.pow(2 * (r - 1)));
    }
}

#[test]
fn power_link_of_center_is_free_plane() {
    use hdx_core::free::FreePlane;
    use hdx_core::ring::LocalRing;
    use hdx_core::spectral::iso::isomorphism;
    use std::time::Duration;
    let ball = build_ball(RingKind::Padic, 2, 4).unwrap();
    let cx = ball.complex().unwrap();
    let (link, _) = cx.power_vertex_link(0, 2);
    let plane = FreePlane::build(&LocalRing::padic(2, 2).unwrap());
    assert_eq!(link.n(), plane.graph().n());
    assert_eq!(link.edge_count(), plane.graph().edge_count());
    let rep = isomorphism(&link, plane.graph(), 10_000_000, Duration::from_secs(120));
    assert_eq!(rep.is_isomorphic(), Some(true));
}

#[test]
fn power_link_r3_is_free_plane_over_z8() {
    use hdx_core::free::FreePlane;
    use hdx_core::ring::LocalRing;
    use hdx_core::spectral::iso::isomorphism;
    use std::time::Duration;
    let ball = build_ball(RingKind::Padic, 2, 6).unwrap();
    let cx = ball.complex().unwrap();
    let (link, _) = cx.power_vertex_link(0, 3);
    let plane = FreePlane::build(&LocalRing::padic(2, 3).unwrap());
    assert_eq!(link.n(), plane.graph().n());
    assert_eq!(link.edge_count(), plane.graph().edge_count());
    let t = std::time::Instant::now();
    let rep = isomorphism(&link, plane.graph(), 50_000_000, Duration::from_secs(300));
    println!("{} nodes {:?}", rep.nodes, t.elapsed());
    assert_eq!(rep.is_isomorphic(), Some(true));
}
