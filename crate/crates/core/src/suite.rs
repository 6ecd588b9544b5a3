//! The acceptance checks. Each criterion produces a pass/fail status and a
//! JSON payload that depends only on the inputs and the seed, so two runs can
//! be compared byte for byte. Timings are kept outside the payload.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

use crate::building::{build_ball, Ball};
use crate::cayley::{self, load_or_build, CayleyGroup};
use crate::complex::ColoredComplex;
use crate::error::{Error, Result};
use crate::free::{line_count, FreePlane};
use crate::ring::{RingKind, RingSpec};
use crate::spectral::eigen::dense_symmetric_eigenvalues;
use crate::spectral::iso::isomorphism;
use crate::spectral::pfr;
use crate::walks::geodesic::{am_spectrum_cayley, gvr_check};
use crate::walks::hall_littlewood;
use crate::walks::power::PowerData;
use crate::walks::sampler::double_sampler;

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "free-plane spectrum"),
    (2, "annihilator identity"),
    (3, "N-table and Q_delta"),
    (4, "isospectral pair"),
    (5, "link of the geodesic power"),
    (6, "color-1 path equivalences"),
    (7, "spheres"),
    (8, "Cayley complex X^{13,5}"),
    (9, "Hall-Littlewood specializations"),
    (10, "vertex-geodesic incidence"),
    (11, "Lanczos bound and double sampler"),
    (12, "determinism"),
];

pub const FREE_PLANE_RINGS: [&str; 8] = [
    "zmod:2^1", "zmod:2^2", "zmod:2^3", "zmod:3^1", "zmod:3^2", "zmod:5^1", "zmod:5^2", "ff:4^2",
];

const ANNIHILATOR_MAX_LINES: u64 = 50_000;
const ISO_BUDGET: Duration = Duration::from_secs(600);
const CAYLEY_P: u64 = 13;
const CAYLEY_Q: u64 = 5;
const SAMPLER_TRIALS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub status: Status,
    pub payload: Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Also run the full-scale Lanczos check of criterion 11.
    pub extended: bool,
    pub budget_bytes: u64,
    /// Where Cayley closures are cached between runs.
    pub cache_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            extended: false,
            budget_bytes: cayley::DEFAULT_BUDGET_BYTES,
            cache_dir: None,
        }
    }
}

/// Runs criteria while sharing the expensive objects between them.
pub struct Suite {
    cfg: SuiteConfig,
    planes: HashMap<String, FreePlane>,
    balls: HashMap<(u64, u32), Ball>,
    complexes: HashMap<(u64, u32), ColoredComplex>,
    cayley: Option<CayleyGroup>,
    power: Option<PowerData>,
}

fn verdict(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "isomorphic",
        Some(false) => "non-isomorphic",
        None => "inconclusive",
    }
}

impl Suite {
    pub fn new(cfg: SuiteConfig) -> Self {
        Self {
            cfg,
            planes: HashMap::new(),
            balls: HashMap::new(),
            complexes: HashMap::new(),
            cayley: None,
            power: None,
        }
    }

    pub fn run_all(&mut self, mut on_done: impl FnMut(&Outcome)) -> Vec<Outcome> {
        CRITERIA
            .iter()
            .map(|&(id, _)| {
                let o = self.run(id);
                on_done(&o);
                o
            })
            .collect()
    }

    pub fn run(&mut self, id: u32) -> Outcome {
        let name = CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map_or("unknown", |c| c.1);
        let start = Instant::now();
        let res = match id {
            1 => self.free_plane_spectrum(),
            2 => self.annihilator(),
            3 => self.stratification(),
            4 => self.isospectral_pair(),
            5 => self.power_link(),
            6 => self.path_equivalences(),
            7 => self.spheres(),
            8 => self.cayley_complex(),
            9 => hall_littlewood_grid(),
            10 => self.vertex_geodesic(),
            11 => self.lanczos_and_sampler(),
            12 => self.determinism(),
            _ => Err(Error::Invalid(format!("no criterion {id}"))),
        };
        let (ok, payload) = res.unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
        Outcome {
            id,
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            payload,
            elapsed: start.elapsed(),
        }
    }

    fn plane(&mut self, ring: &str) -> Result<&FreePlane> {
        if !self.planes.contains_key(ring) {
            let r = ring.parse::<RingSpec>()?.build()?;
            self.planes.insert(ring.to_string(), FreePlane::build(&r));
        }
        Ok(&self.planes[ring])
    }

    fn ball(&mut self, q: u64, radius: u32) -> Result<&Ball> {
        if !self.balls.contains_key(&(q, radius)) {
            self.balls.insert((q, radius), build_ball(RingKind::Padic, q, radius)?);
        }
        Ok(&self.balls[&(q, radius)])
    }

    fn complex(&mut self, q: u64, radius: u32) -> Result<&ColoredComplex> {
        if !self.complexes.contains_key(&(q, radius)) {
            let cx = self.ball(q, radius)?.complex()?;
            self.complexes.insert((q, radius), cx);
        }
        Ok(&self.complexes[&(q, radius)])
    }

    fn cayley(&mut self) -> Result<&CayleyGroup> {
        if self.cayley.is_none() {
            let x = load_or_build(CAYLEY_P, CAYLEY_Q, self.cfg.budget_bytes, self.cfg.cache_dir.as_deref())?;
            self.cayley = Some(x);
        }
        Ok(self.cayley.as_ref().unwrap())
    }

    fn power(&mut self) -> Result<(&CayleyGroup, &PowerData)> {
        if self.power.is_none() {
            let x = self.cayley()?;
            let tables = cayley::sigma_tables(&x.sp);
            self.power = Some(PowerData::build(&x.sp, &tables, 2, false)?);
        }
        Ok((self.cayley.as_ref().unwrap(), self.power.as_ref().unwrap()))
    }

    fn free_plane_spectrum(&mut self) -> Result<(bool, Value)> {
        let mut ok = true;
        let mut rows = Vec::new();
        for ring in FREE_PLANE_RINGS {
            let plane = self.plane(ring)?;
            let (q, r) = (plane.ring().q(), plane.ring().r());
            let rep = pfr::spectrum(plane, true)?;
            let mut got: Vec<u64> = rep.eigenvalues.iter().map(|e| e.value_squared_exact).collect();
            got.sort_unstable();
            got.dedup();
            let mut expected = pfr::q_eigenvalues_expected(q, r);
            expected.sort_unstable();
            let n_ok = rep.n_vertices as u64 == 2 * line_count(q, r);
            let d_ok = rep.degree == Some(((q + 1) * q.pow(r - 1)) as usize);
            let dev = rep.numeric_deviation.unwrap_or(f64::INFINITY);
            let case_ok = rep.matches_theorem && got == expected && n_ok && d_ok && dev <= 1e-8;
            ok &= case_ok;
            rows.push(json!({
                "ring": ring,
                "vertices": rep.n_vertices,
                "degree": rep.degree,
                "squared_eigenvalues": rep.eigenvalues.iter()
                    .filter(|e| e.value_float > 0.0)
                    .map(|e| [e.value_squared_exact, e.multiplicity as u64])
                    .collect::<Vec<_>>(),
                "multiplicity_method": rep.method,
                "numeric_within_1e-8": dev <= 1e-8,
                "passed": case_ok,
            }));
        }
        Ok((ok, json!({ "cases": rows })))
    }

    fn annihilator(&mut self) -> Result<(bool, Value)> {
        let mut ok = true;
        let mut rows = Vec::new();
        for ring in FREE_PLANE_RINGS {
            let plane = self.plane(ring)?;
            if plane.n_lines() as u64 > ANNIHILATOR_MAX_LINES {
                continue;
            }
            let qm = pfr::q_matrix(plane);
            let delta = pfr::delta_matrix(plane);
            let rep = pfr::verify_annihilator(plane, &qm, &delta)?;
            let case_ok = rep.holds && rep.c.is_some_and(|c| c != 0);
            ok &= case_ok;
            rows.push(json!({ "ring": ring, "lines": rep.n_lines, "c": rep.c, "passed": case_ok }));
        }
        Ok((ok, json!({ "cases": rows })))
    }

    fn stratification(&mut self) -> Result<(bool, Value)> {
        let mut ok = true;
        let mut rows = Vec::new();
        for ring in ["zmod:2^2", "zmod:2^3", "zmod:3^2"] {
            let plane = self.plane(ring)?;
            let qm = pfr::q_matrix(plane);
            let delta = pfr::delta_matrix(plane);
            let s = pfr::stratification(plane, &qm, &delta);
            let b = pfr::check_b_differences(plane, &qm, &delta)?;
            let case_ok = s.q_delta_mismatches == 0 && s.n_mismatches == 0 && b.mismatches.is_empty();
            ok &= case_ok;
            rows.push(json!({
                "ring": ring,
                "pairs": s.pairs_checked,
                "q_delta": s.q_delta,
                "q_delta_mismatches": s.q_delta_mismatches,
                "n_mismatches": s.n_mismatches,
                "b_difference_mismatches": b.mismatches.len(),
                "passed": case_ok,
            }));
        }
        Ok((ok, json!({ "cases": rows })))
    }

    fn isospectral_pair(&mut self) -> Result<(bool, Value)> {
        let key = |s: &pfr::SpectrumReport| {
            s.eigenvalues
                .iter()
                .map(|e| (e.value_squared_exact, e.value_float > 0.0, e.multiplicity))
                .collect::<Vec<_>>()
        };
        for ring in ["zmod:2^1", "ff:2^1", "zmod:2^2", "ff:2^2"] {
            self.plane(ring)?;
        }
        let p = &self.planes;
        let a = pfr::spectrum(&p["zmod:2^2"], false)?;
        let b = pfr::spectrum(&p["ff:2^2"], false)?;
        let same_spectrum = key(&a) == key(&b);
        let r1 = isomorphism(p["zmod:2^1"].graph(), p["ff:2^1"].graph(), u64::MAX, ISO_BUDGET);
        let r2 = isomorphism(p["zmod:2^2"].graph(), p["ff:2^2"].graph(), u64::MAX, ISO_BUDGET);
        let ok = same_spectrum && r1.is_isomorphic() == Some(true) && r2.is_isomorphic() == Some(false);
        Ok((
            ok,
            json!({
                "spectra_equal": same_spectrum,
                "vertices_r2": p["zmod:2^2"].graph().n(),
                "r1": verdict(r1.is_isomorphic()),
                "r2": verdict(r2.is_isomorphic()),
                "r2_search_nodes": r2.nodes,
            }),
        ))
    }

    fn power_link(&mut self) -> Result<(bool, Value)> {
        let mut ok = true;
        let mut rows = Vec::new();
        for (r, radius) in [(2u32, 4u32), (3, 6)] {
            let (link, _) = self.complex(2, radius)?.power_vertex_link(0, r as usize);
            let plane = self.plane(&format!("zmod:2^{r}"))?;
            let rep = isomorphism(&link, plane.graph(), u64::MAX, ISO_BUDGET);
            let case_ok = rep.is_isomorphic() == Some(true);
            ok &= case_ok;
            rows.push(json!({
                "r": r,
                "ball_radius": radius,
                "link_vertices": link.n(),
                "link_edges": link.edge_count(),
                "free_plane_vertices": plane.graph().n(),
                "verdict": verdict(rep.is_isomorphic()),
            }));
        }
        Ok((ok, json!({ "cases": rows })))
    }

    fn path_equivalences(&mut self) -> Result<(bool, Value)> {
        let mut ok = true;
        let mut rows = Vec::new();
        for q in [2u64, 3] {
            let rep = self.ball(q, 2)?.path_equivalences(2)?;
            let case_ok = rep.disagreements == 0 && rep.paths as u64 == (q * q + q + 1).pow(2);
            ok &= case_ok;
            rows.push(serde_json::to_value(&rep)?);
        }
        Ok((ok, json!({ "cases": rows })))
    }

    fn spheres(&mut self) -> Result<(bool, Value)> {
        let mut ok = true;
        let mut rows = Vec::new();
        for q in [2u64, 3] {
            let ball = self.ball(q, 3)?;
            for r in 1..=3u32 {
                let s = ball.sphere(r);
                let census = s.census();
                let mut case_ok = census.size as u64 == census.expected_size
                    && census.stratum_mismatches == 0
                    && census.degree_mismatches == 0
                    && census.distance_mismatches == 0;
                let witness = s.rayleigh_witness();
                let spec = s.spectrum(1e-10)?;
                if let Some(w) = witness.quotient {
                    case_ok &= (w - witness.cos_2pi_over_r).abs() <= 1e-10;
                }
                let cut = if r == 3 {
                    let cut = s.half_sphere_cut()?;
                    case_ok &= cut.exact_match && witness.quotient.is_some();
                    case_ok &= spec.lambda2 >= witness.cos_2pi_over_r - 1e-9;
                    Some(cut)
                } else {
                    let expected = spec.expected.unwrap_or(f64::NAN);
                    case_ok &= (spec.lambda2 - expected).abs() <= 1e-8;
                    None
                };
                ok &= case_ok;
                rows.push(json!({
                    "q": q,
                    "r": r,
                    "size": census.size,
                    "strata": census.strata,
                    "degree_mismatches": census.degree_mismatches,
                    "half_sphere_cut_ratio": cut.as_ref().map(|c| c.ratio),
                    "half_sphere_cut_exact": cut.as_ref().map(|c| c.exact_match),
                    "witness_quotient": witness.quotient,
                    "cos_2pi_over_r": witness.cos_2pi_over_r,
                    "lambda2": spec.lambda2,
                    "lambda2_expected": spec.expected,
                    "passed": case_ok,
                }));
            }
        }
        Ok((ok, json!({ "cases": rows })))
    }

    fn cayley_complex(&mut self) -> Result<(bool, Value)> {
        let s5 = cayley::enumerate_sp(5)?;
        let s13 = cayley::enumerate_sp(CAYLEY_P)?;
        let printed = cayley::s5_reference_members().iter().all(|m| s5.contains(m));
        let tables_ok = |sp: &[crate::gaussian::GMatrix], p: usize| {
            let t = cayley::sigma_tables(sp);
            t.sigma.iter().all(|s| s.len() == p * p) && t.closers.iter().all(|c| c.len() == p + 1)
        };
        let sigma_ok = tables_ok(&s5, 5) && tables_ok(&s13, CAYLEY_P as usize);
        let x = self.cayley()?;
        let order_ok = x.order() as u64 == cayley::pgl3_order(CAYLEY_Q);
        let (link, _) = x.identity_link(&cayley::sigma_tables(&x.sp));
        let s = (CAYLEY_P as f64).sqrt();
        let d = (CAYLEY_P + 1) as f64;
        let ev = dense_symmetric_eigenvalues(&link.adjacency_f64());
        let link_dev = ev
            .iter()
            .map(|v| [d, -d, s, -s].iter().map(|t| (v - t).abs()).fold(f64::MAX, f64::min))
            .fold(0.0, f64::max);
        let summary = x.summary();
        let ok = s5.len() == 31
            && printed
            && s13.len() == 183
            && sigma_ok
            && order_ok
            && x.generators_injective()
            && link_dev <= 1e-8;
        Ok((
            ok,
            json!({
                "s5": s5.len(),
                "s5_printed_members_present": printed,
                "s13": s13.len(),
                "sigma_and_closer_sizes": sigma_ok,
                "summary": summary,
                "link_vertices": link.n(),
                "link_degree": link.regular_degree(),
                "link_spectrum_within_1e-8": link_dev <= 1e-8,
            }),
        ))
    }

    fn vertex_geodesic(&mut self) -> Result<(bool, Value)> {
        let seed = self.cfg.seed;
        let radius = 6;
        let ball = self.ball(2, radius)?;
        let dist: Vec<u32> = (0..ball.len() as u32).map(|v| ball.distance(v)).collect();
        let cx = self.complex(2, radius)?;
        let mut ok = true;
        let mut rows = Vec::new();
        for r in 1..=3u32 {
            let interior: Vec<u32> = (0..dist.len() as u32).filter(|&v| dist[v as usize] + r < radius).collect();
            let rep = gvr_check(cx, 2, r, &interior, 100, 10, seed)?;
            ok &= rep.passed() && rep.pairs_checked >= 100;
            rows.push(serde_json::to_value(&rep)?);
        }
        Ok((ok, json!({ "cases": rows })))
    }

    fn lanczos_and_sampler(&mut self) -> Result<(bool, Value)> {
        let (seed, extended) = (self.cfg.seed, self.cfg.extended);
        let mut ok = true;
        let lanczos = if extended {
            let s = am_spectrum_cayley(self.cayley()?, 1, 6, 1e-6)?;
            ok &= s.within_bound && s.residuals.iter().all(|&r| r <= 1e-6);
            serde_json::to_value(&s)?
        } else {
            json!("skipped (extended only)")
        };
        let (x, power) = self.power()?;
        let rep = double_sampler(x, power, 8, 0.2, 0.3, SAMPLER_TRIALS, seed)?;
        ok &= rep.vertex_level.within_target && rep.geodesic_level.within_target;
        Ok((ok, json!({ "lanczos": lanczos, "double_sampler": rep })))
    }

    /// Replays the seeded computations and compares their serialized output.
    fn determinism(&mut self) -> Result<(bool, Value)> {
        let seed = self.cfg.seed;
        let interior: Vec<u32> = {
            let ball = self.ball(2, 6)?;
            (0..ball.len() as u32).filter(|&v| ball.distance(v) + 2 < 6).collect()
        };
        let cx = self.complex(2, 6)?;
        let g1 = serde_json::to_string(&gvr_check(cx, 2, 2, &interior, 100, 10, seed)?)?;
        let g2 = serde_json::to_string(&gvr_check(cx, 2, 2, &interior, 100, 10, seed)?)?;
        let (x, power) = self.power()?;
        let d1 = serde_json::to_string(&double_sampler(x, power, 8, 0.2, 0.3, SAMPLER_TRIALS, seed)?)?;
        let d2 = serde_json::to_string(&double_sampler(x, power, 8, 0.2, 0.3, SAMPLER_TRIALS, seed)?)?;
        let ok = g1 == g2 && d1 == d2;
        Ok((
            ok,
            json!({
                "seed": seed,
                "vertex_geodesic_replay_identical": g1 == g2,
                "double_sampler_replay_identical": d1 == d2,
            }),
        ))
    }
}

fn hall_littlewood_grid() -> Result<(bool, Value)> {
    let mut ok = true;
    let mut failures = Vec::new();
    let mut checked = 0;
    for q in [2u64, 3, 5, 7, 11, 13] {
        for m in 1..=6 {
            let c = hall_littlewood::check(m, q)?;
            checked += 1;
            if !c.passed() {
                ok = false;
                failures.push(serde_json::to_value(&c)?);
            }
        }
    }
    Ok((ok, json!({ "checked": checked, "failures": failures })))
}

/// The deterministic part of a suite run.
pub fn payload(outcomes: &[Outcome]) -> Value {
    json!(outcomes)
}
