use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use hdx_core::building::{build_ball, Ball};
use hdx_core::cayley::{self, load_or_build, CayleyGroup};
use hdx_core::flags::build_pfr_d;
use hdx_core::free::FreePlane;
use hdx_core::ring::{LocalRing, RingKind, RingSpec};
use hdx_core::spectral::iso::isomorphism;
use hdx_core::spectral::pfr;
use hdx_core::suite::{payload, Suite, SuiteConfig};
use hdx_core::walks::geodesic::{am_spectrum_cayley, gvr_check};
use hdx_core::walks::hall_littlewood;
use hdx_core::walks::power::PowerData;
use hdx_core::walks::sampler::{double_sampler, rwalk_mixing};

use crate::{
    BallAction, CayleyAction, Cli, Command, ComplexSource, FieldArgs, Global, PfrAction, PowerAction, SamplerAction,
    WalkAction,
};

fn data_dir() -> Option<PathBuf> {
    std::env::var_os("HDX_DATA_DIR").map(PathBuf::from)
}

fn ring(spec: &str) -> Result<LocalRing> {
    let s: RingSpec = spec.parse()?;
    Ok(s.build()?)
}

fn field(f: &FieldArgs) -> Result<(RingKind, u64)> {
    match (f.p, f.laurent) {
        (Some(p), None) => Ok((RingKind::Padic, p)),
        (None, Some(q)) => Ok((RingKind::Laurent, q)),
        _ => bail!("give either -p PRIME or --laurent Q"),
    }
}

fn ball(f: &FieldArgs, radius: u32) -> Result<Ball> {
    let (kind, q) = field(f)?;
    Ok(build_ball(kind, q, radius)?)
}

fn out_dir(g: &Global) -> Result<&PathBuf> {
    g.out.as_ref().context("this command writes files and needs --out DIR")
}

fn group(src: &ComplexSource, g: &Global) -> Result<CayleyGroup> {
    match &src.complex {
        Some(dir) => CayleyGroup::read_binary(dir, src.p, src.q)
            .with_context(|| format!("loading X^{{{},{}}} from {}", src.p, src.q, dir.display())),
        None => Ok(load_or_build(src.p, src.q, g.budget_bytes(), data_dir().as_deref())?),
    }
}

pub fn run(cli: &Cli) -> Result<(bool, Value)> {
    let g = &cli.global;
    match &cli.command {
        Command::Pfr { action } => pfr_command(action, g),
        Command::Ball { action } => match action {
            BallAction::Census { field, radius } => {
                let b = ball(field, *radius)?;
                let spheres: Vec<_> = (1..=*radius).map(|r| b.sphere(r).census()).collect();
                let ok = b.colors_consistent()
                    && spheres.iter().all(|c| {
                        c.size as u64 == c.expected_size && c.stratum_mismatches == 0 && c.degree_mismatches == 0
                    });
                Ok((ok, json!({ "vertices": b.len(), "q": b.q(), "spheres": spheres })))
            }
            BallAction::Paths { field, r } => {
                let rep = ball(field, *r)?.path_equivalences(*r)?;
                Ok((rep.disagreements == 0, serde_json::to_value(rep)?))
            }
        },
        Command::Sphere(args) => {
            let b = ball(&args.field, args.r)?;
            let s = b.sphere(args.r);
            let census = s.census();
            let witness = s.rayleigh_witness();
            let spectrum = s.spectrum(1e-10)?;
            let cut = if args.r % 2 == 1 && args.r >= 3 { Some(s.half_sphere_cut()?) } else { None };
            if let Some(dir) = &g.out {
                std::fs::create_dir_all(dir)?;
                let sphere = b.graph().induced(&sphere_ids(&b, args.r));
                sphere.write_edge_list(BufWriter::new(File::create(dir.join(format!("sphere-{}.csv", args.r)))?))?;
            }
            let ok = census.stratum_mismatches == 0 && census.degree_mismatches == 0;
            Ok((ok, json!({ "census": census, "half_sphere_cut": cut, "rayleigh_witness": witness, "spectrum": spectrum })))
        }
        Command::Cayley { action } => match action {
            CayleyAction::Gen { p } => {
                let sp = cayley::enumerate_sp(*p)?;
                let mats: Vec<Vec<[i64; 2]>> =
                    sp.iter().map(|m| m.0.iter().map(|z| [z.re, z.im]).collect()).collect();
                Ok((true, json!({ "p": p, "count": sp.len(), "generators": mats })))
            }
            CayleyAction::Complex { p, q } => {
                let x = match &g.out {
                    Some(dir) => {
                        let x = cayley::build_cayley(*p, *q, g.budget_bytes())?;
                        x.write_binary(dir)?;
                        x
                    }
                    None => load_or_build(*p, *q, g.budget_bytes(), data_dir().as_deref())?,
                };
                Ok((x.generators_injective(), serde_json::to_value(x.summary())?))
            }
        },
        Command::Power { action } => match action {
            PowerAction::Link { p, r } => {
                let b = build_ball(RingKind::Padic, *p, 2 * r)?;
                let (link, _) = b.complex()?.power_vertex_link(0, *r as usize);
                let plane = FreePlane::build(&LocalRing::padic(*p, *r)?);
                let rep = isomorphism(&link, plane.graph(), u64::MAX, Duration::from_secs(600));
                Ok((
                    rep.is_isomorphic() == Some(true),
                    json!({
                        "link_vertices": link.n(),
                        "link_edges": link.edge_count(),
                        "free_plane_vertices": plane.graph().n(),
                        "free_plane_edges": plane.graph().edge_count(),
                        "isomorphic": rep.is_isomorphic(),
                        "search_nodes": rep.nodes,
                    }),
                ))
            }
            PowerAction::Cayley { p, r } => {
                let sp = cayley::enumerate_sp(*p)?;
                let tables = cayley::sigma_tables(&sp);
                let power = PowerData::build(&sp, &tables, *r, false)?;
                let uniform = power.triangle_counts_uniform(*p);
                let rotation = power.rotation_invariant();
                let triangles: usize = power.closers.iter().map(Vec::len).sum();
                Ok((
                    uniform && rotation,
                    json!({
                        "p": p,
                        "r": r,
                        "power_generators": power.len(),
                        "triangles_at_identity": triangles,
                        "triangle_counts_uniform": uniform,
                        "rotation_invariant": rotation,
                    }),
                ))
            }
        },
        Command::Walk { action } => match action {
            WalkAction::AmSpectrum { source, m, k, tol } => {
                let x = group(source, g)?;
                let s = am_spectrum_cayley(&x, *m, *k, *tol)?;
                Ok((s.within_bound, serde_json::to_value(s)?))
            }
            WalkAction::Hl { m, q } => {
                let c = hall_littlewood::check(*m, *q)?;
                Ok((c.passed(), serde_json::to_value(c)?))
            }
            WalkAction::Gvr { field: f, r, radius, pairs, tests } => {
                let seed = g.require_seed()?;
                let (_, q) = field(f)?;
                if r >= radius {
                    bail!("need r < radius");
                }
                let b = ball(f, *radius)?;
                let cx = b.complex()?;
                let interior: Vec<u32> = (0..b.len() as u32).filter(|&v| b.distance(v) + r < *radius).collect();
                let rep = gvr_check(&cx, q, *r, &interior, *pairs, *tests, seed)?;
                Ok((rep.passed(), serde_json::to_value(rep)?))
            }
        },
        Command::Sampler { action } => match action {
            SamplerAction::Double { source, k, big_k, eps, alpha, trials } => {
                let seed = g.require_seed()?;
                let x = group(source, g)?;
                let power = PowerData::build(&x.sp, &cayley::sigma_tables(&x.sp), *k, false)?;
                let rep = double_sampler(&x, &power, *big_k, *eps, *alpha, *trials, seed)?;
                let ok = rep.vertex_level.within_target && rep.geodesic_level.within_target;
                Ok((ok, serde_json::to_value(rep)?))
            }
            SamplerAction::Mixing { source, k, steps, buckets, trials } => {
                let seed = g.require_seed()?;
                let x = group(source, g)?;
                let power = PowerData::build(&x.sp, &cayley::sigma_tables(&x.sp), *k, false)?;
                let est = rwalk_mixing(&x, &power, steps, *buckets, *trials, seed);
                Ok((true, serde_json::to_value(est)?))
            }
        },
        Command::VerifyAll { quick, extended, only } => {
            let seed = g.require_seed()?;
            if !quick && !extended {
                bail!("choose --quick, --extended or both");
            }
            let mut suite = Suite::new(SuiteConfig {
                seed,
                extended: *extended,
                budget_bytes: g.budget_bytes(),
                cache_dir: data_dir(),
            });
            let report = |o: &hdx_core::suite::Outcome| {
                eprintln!(
                    "criterion {:>2} {:<4} {} ({:.1} s)",
                    o.id,
                    if o.passed() { "PASS" } else { "FAIL" },
                    o.name,
                    o.elapsed.as_secs_f64()
                );
            };
            let outcomes = if only.is_empty() {
                suite.run_all(report)
            } else {
                only.iter()
                    .map(|&id| {
                        let o = suite.run(id);
                        report(&o);
                        o
                    })
                    .collect()
            };
            let ok = outcomes.iter().all(|o| o.passed());
            Ok((
                ok,
                json!({
                    "seed": seed,
                    "extended": extended,
                    "passed": ok,
                    "criteria": payload(&outcomes),
                }),
            ))
        }
    }
}

fn sphere_ids(b: &Ball, r: u32) -> Vec<u32> {
    (0..b.len() as u32).filter(|&v| b.distance(v) == r).collect()
}

fn pfr_command(action: &PfrAction, g: &Global) -> Result<(bool, Value)> {
    match action {
        PfrAction::Spectrum { ring: r, exact_only } => {
            let plane = FreePlane::build(&ring(&r.ring)?);
            let rep = pfr::spectrum(&plane, !exact_only)?;
            Ok((rep.matches_theorem, serde_json::to_value(rep)?))
        }
        PfrAction::Strata { ring: r } => {
            let plane = FreePlane::build(&ring(&r.ring)?);
            let qm = pfr::q_matrix(&plane);
            let delta = pfr::delta_matrix(&plane);
            let s = pfr::stratification(&plane, &qm, &delta);
            let a = pfr::verify_annihilator(&plane, &qm, &delta)?;
            let b = pfr::check_b_differences(&plane, &qm, &delta)?;
            let ok = s.q_delta_mismatches == 0 && s.n_mismatches == 0 && a.holds && b.mismatches.is_empty();
            Ok((ok, json!({ "stratification": s, "annihilator": a, "b_differences": b })))
        }
        PfrAction::Iso { ring: r, other, timeout_secs } => {
            let a = FreePlane::build(&ring(&r.ring)?);
            let b = FreePlane::build(&ring(other)?);
            let rep = isomorphism(a.graph(), b.graph(), u64::MAX, Duration::from_secs(*timeout_secs));
            Ok((rep.is_isomorphic().is_some(), json!({ "verdict": rep.verdict, "search_nodes": rep.nodes })))
        }
        PfrAction::Flags { ring: r, d } => {
            let fc = build_pfr_d(&ring(&r.ring)?, *d)?;
            let counts: Vec<usize> = (0..=fc.complex.dim().max(0) as usize).map(|k| fc.complex.cells(k).len()).collect();
            Ok((true, json!({ "d": d, "vertices": fc.modules.len(), "cells_by_dimension": counts })))
        }
        PfrAction::Export { ring: r } => {
            let dir = out_dir(g)?;
            std::fs::create_dir_all(dir)?;
            let plane = FreePlane::build(&ring(&r.ring)?);
            let path = dir.join(format!("{}.csv", r.ring.replace([':', '^'], "_")));
            plane.graph().write_edge_list(BufWriter::new(File::create(&path)?))?;
            Ok((true, json!({ "metadata": plane.metadata(), "edges": path })))
        }
    }
}
