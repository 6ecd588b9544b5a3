use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "hdx", version, about = "Free projective planes, Ã₂ building balls and Cayley complexes")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Memory budget for large builds, in MiB.
    #[arg(long, global = true, default_value_t = 4096)]
    pub budget_mb: u64,
    /// Output directory for exported files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Human-readable output instead of a single JSON document.
    #[arg(long, global = true)]
    pub pretty: bool,
}

impl Global {
    pub fn budget_bytes(&self) -> u64 {
        self.budget_mb.saturating_mul(1 << 20)
    }

    pub fn require_seed(&self) -> anyhow::Result<u64> {
        self.seed.context("this command is randomized and needs --seed")
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Free projective planes over finite local rings.
    Pfr {
        #[command(subcommand)]
        action: PfrAction,
    },
    /// Balls in the Ã₂ building of PGL₃ over a local field.
    Ball {
        #[command(subcommand)]
        action: BallAction,
    },
    /// Spheres around a vertex of the building.
    Sphere(SphereArgs),
    /// The Cayley complex X^{p,q} over the Gaussian integers.
    Cayley {
        #[command(subcommand)]
        action: CayleyAction,
    },
    /// Geodesic powers of complexes.
    Power {
        #[command(subcommand)]
        action: PowerAction,
    },
    /// Geodesic walk operators.
    Walk {
        #[command(subcommand)]
        action: WalkAction,
    },
    /// Monte-Carlo sampler experiments.
    Sampler {
        #[command(subcommand)]
        action: SamplerAction,
    },
    /// Runs the acceptance suite and exits nonzero on any failure.
    VerifyAll {
        /// Desk-scale run (every criterion except the full-scale Lanczos check).
        #[arg(long)]
        quick: bool,
        /// Include the full-scale Lanczos check.
        #[arg(long)]
        extended: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RingArg {
    /// `zmod:p^r` or `ff:q^r`.
    #[arg(long)]
    pub ring: String,
}

#[derive(Subcommand, Debug)]
pub enum PfrAction {
    /// Exact and numeric adjacency spectrum.
    Spectrum {
        #[command(flatten)]
        ring: RingArg,
        /// Skip the dense numeric eigensolve.
        #[arg(long)]
        exact_only: bool,
    },
    /// Q_δ and N-table stratification, annihilating polynomial.
    Strata {
        #[command(flatten)]
        ring: RingArg,
    },
    /// Isomorphism test between two free planes.
    Iso {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long)]
        other: String,
        #[arg(long, default_value_t = 600)]
        timeout_secs: u64,
    },
    /// Flag complex P^d_fr summary.
    Flags {
        #[command(flatten)]
        ring: RingArg,
        #[arg(short = 'd', default_value_t = 2)]
        d: usize,
    },
    /// Writes the incidence graph as CSV edge list to `--out`.
    Export {
        #[command(flatten)]
        ring: RingArg,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Residue prime of Q_p.
    #[arg(short = 'p', conflicts_with = "laurent")]
    pub p: Option<u64>,
    /// Use F_q((t)) with this residue field size instead.
    #[arg(long)]
    pub laurent: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum BallAction {
    /// Sphere and stratum census up to the radius.
    Census {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(short = 'r')]
        radius: u32,
    },
    /// Free / unique / geodesic agreement for color-1 paths of length r.
    Paths {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(short = 'r')]
        r: u32,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SphereArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(short = 'r')]
    pub r: u32,
}

#[derive(Subcommand, Debug)]
pub enum CayleyAction {
    /// The generating set S_p as Gaussian-integer pairs.
    Gen {
        #[arg(short = 'p')]
        p: u64,
    },
    /// Closes S_{p,q} in PGL₃(F_q) and writes the binary tables to `--out`
    /// (or the `HDX_DATA_DIR` cache).
    Complex {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'q')]
        q: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum PowerAction {
    /// Link of the ball center in the r-th geodesic power against P²_fr(Z/p^r).
    Link {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'r')]
        r: u32,
    },
    /// Power triangles of X^{p,q} built over the Gaussian integers.
    Cayley {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'r', default_value_t = 2)]
        r: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ComplexSource {
    /// Directory written by `cayley complex`.
    #[arg(long)]
    pub complex: Option<PathBuf>,
    #[arg(short = 'p', default_value_t = 13)]
    pub p: u64,
    #[arg(short = 'q', default_value_t = 5)]
    pub q: u64,
}

#[derive(Subcommand, Debug)]
pub enum WalkAction {
    /// Lanczos top-k of A_m on X^{p,q}.
    AmSpectrum {
        #[command(flatten)]
        source: ComplexSource,
        #[arg(short = 'm', default_value_t = 1)]
        m: u32,
        #[arg(short = 'k', default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Hall–Littlewood specializations for A_m.
    Hl {
        #[arg(short = 'm')]
        m: u32,
        #[arg(short = 'q')]
        q: u64,
    },
    /// Vertex/geodesic incidence counts on a building ball.
    Gvr {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(short = 'r')]
        r: u32,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 10)]
        tests: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum SamplerAction {
    /// Vertices / k-geodesics / K-walks double sampler on X^{p,q}.
    Double {
        #[command(flatten)]
        source: ComplexSource,
        #[arg(short = 'k', default_value_t = 2)]
        k: usize,
        #[arg(short = 'K', default_value_t = 8)]
        big_k: usize,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Bucketed total variation of the r-walk after a few steps.
    Mixing {
        #[command(flatten)]
        source: ComplexSource,
        #[arg(short = 'k', default_value_t = 2)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8")]
        steps: Vec<usize>,
        #[arg(long, default_value_t = 64)]
        buckets: usize,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
    },
}

/// FNV-1a, stable across builds and platforms.
fn config_hash(args: &[String]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in args.join("\0").bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let (ok, results) = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            let report = json!({ "command": argv[1..].join(" "), "error": format!("{e:#}") });
            println!("{report}");
            return ExitCode::from(2);
        }
    };
    let report = json!({
        "command": argv[1..].join(" "),
        "config_hash": config_hash(&argv[1..]),
        "version": env!("CARGO_PKG_VERSION"),
        "results": results,
        "wall_clock_ms": start.elapsed().as_millis() as u64,
        "peak_rss_mb": peak_rss_mb(),
    });
    if cli.global.pretty {
        print_pretty(&report);
    } else {
        println!("{report}");
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// High-water resident set size from `/proc` (Linux only).
fn peak_rss_mb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024)
}

fn print_pretty(report: &Value) {
    if let Some(criteria) = report["results"]["criteria"].as_array() {
        println!("{:>3}  {:<6} {}", "#", "status", "criterion");
        for c in criteria {
            println!(
                "{:>3}  {:<6} {}",
                c["id"],
                c["status"].as_str().unwrap_or("?"),
                c["name"].as_str().unwrap_or("?")
            );
        }
        return;
    }
    println!("{}", serde_json::to_string_pretty(report).unwrap_or_default());
}
