//! `necklace`: builds, validates, iterates, projects and meshes self-similar
//! necklace chains.
//!
//! Exit codes: 0 ok, 1 I/O or format error, 2 bad parameters, 3 validation
//! failed, 4 enumeration budget exceeded.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use config::*;
use necklace_core::chain::{
    build_theorem2_chain, enclosing_similar_torus, regular_chain_from_params, validate_chain_with, Chain,
    RegularChainParams, ValidateOpts,
};
use necklace_core::geometry::MinimizeOpts;
use necklace_core::ifs::{attractor_sample, iterate_cover, moran_cover_sum, similarity_dimension, IfsSystem};
use necklace_core::io::{self, ChainDocument};
use necklace_core::projection::{sweep, PlaneSweep, SweepConfig};
use necklace_core::search::{certified_region_report, scan_with, Range, ScanOpts, SearchGrid};
use necklace_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "necklace", version, about = "Self-similar Antoine's necklaces")]
struct Cli {
    /// RNG seed for attractor sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "NECKLACE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Geometric tolerance relative to the ambient diameter.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bent-link chain from an `(r_B, R_B)` torus.
    BuildChain(BuildChainArgs),
    /// Regular chain from `(R_T, r_T, m, s)`.
    Regular(RegularArgs),
    /// Feasibility scan over `(rho, s, m)`.
    Search(SearchArgs),
    /// Cover level and attractor sample of a chain's similarity system.
    Iterate(IterateArgs),
    /// Per-plane shadow area, box-count slope and connectivity.
    Project(ProjectArgs),
    /// OBJ mesh of a chain's links.
    Mesh(MeshArgs),
}

#[derive(Args, Debug)]
struct BuildChainArgs {
    #[arg(long = "rb")]
    r_b: Option<f64>,
    #[arg(long = "RB")]
    big_r_b: Option<f64>,
    #[arg(long = "A")]
    offset: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args, Debug)]
struct RegularArgs {
    #[arg(long = "R-T")]
    major: Option<f64>,
    #[arg(long = "r-T")]
    minor: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    s: Option<f64>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    rho_lo: Option<f64>,
    #[arg(long)]
    rho_hi: Option<f64>,
    #[arg(long)]
    rho_steps: Option<usize>,
    #[arg(long)]
    s_lo: Option<f64>,
    #[arg(long)]
    s_hi: Option<f64>,
    #[arg(long)]
    s_steps: Option<usize>,
    /// Comma-separated half link counts.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long)]
    grid_n: Option<usize>,
}

#[derive(Args, Debug)]
struct IterateArgs {
    #[arg(long)]
    chain: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    phase: Option<f64>,
    #[arg(long)]
    budget: Option<u128>,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[arg(long)]
    chain: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<Scheme>,
    #[arg(long)]
    planes: Option<usize>,
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long)]
    raster_n: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    connect_depth: Option<usize>,
    #[arg(long)]
    phase: Option<f64>,
}

#[derive(Args, Debug)]
struct MeshArgs {
    #[arg(long)]
    chain: Option<PathBuf>,
    #[arg(long)]
    seg_major: Option<usize>,
    #[arg(long)]
    seg_minor: Option<usize>,
    /// Also mesh the ambient torus.
    #[arg(long)]
    ambient: bool,
}

#[derive(Debug, Clone, Serialize)]
struct Globals {
    seed: u64,
    tol: f64,
    out_dir: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_)
        | Error::PreconditionFailed(_)
        | Error::NotFound(_)
        | Error::NotSimilar { .. }
        | Error::InsufficientData(_) => 2,
        Error::ValidationFailed(_) | Error::NonConvergence { .. } => 3,
        Error::BudgetExceeded { .. } => 4,
        Error::Io(_) | Error::Json(_) | Error::Format(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => serde_json::from_str::<ConfigFile>(&std::fs::read_to_string(p)?)
            .map_err(|e| Error::InvalidParams(format!("config {}: {e}", p.display())))?,
        None => ConfigFile::default(),
    };
    let g = Globals {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        tol: cli.tol.or(file.tol).unwrap_or(1e-9),
        out_dir: cli.out_dir.or(file.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out")),
    };
    if !(g.tol > 0.0 && g.tol < 1e-3) {
        return Err(Error::InvalidParams(format!("tol must lie in (0, 1e-3), got {}", g.tol)));
    }
    match cli.command {
        Command::BuildChain(a) => {
            let mut c = file.build_chain.unwrap_or_default();
            apply!(c, a, r_b, big_r_b);
            if a.offset.is_some() {
                c.offset = a.offset;
            }
            if a.m.is_some() {
                c.m = a.m;
            }
            announce("build-chain", &g, &c)?;
            cmd_build_chain(&g, &c)
        }
        Command::Regular(a) => {
            let mut c = file.regular.unwrap_or_default();
            apply!(c, a, major, minor, m, s);
            announce("regular", &g, &c)?;
            cmd_regular(&g, &c)
        }
        Command::Search(a) => {
            let mut c = file.search.unwrap_or_default();
            apply!(c, a, rho_lo, rho_hi, rho_steps, s_lo, s_hi, s_steps, m, grid_n);
            announce("search", &g, &c)?;
            cmd_search(&g, &c)
        }
        Command::Iterate(a) => {
            let mut c = file.iterate.unwrap_or_default();
            apply!(c, a, lambda, points, depth, phase, budget);
            if a.chain.is_some() {
                c.chain = a.chain;
            }
            announce("iterate", &g, &c)?;
            cmd_iterate(&g, &c)
        }
        Command::Project(a) => {
            let mut c = file.project.unwrap_or_default();
            apply!(c, a, scheme, planes, lambda, raster_n, points, depth, connect_depth, phase);
            if a.chain.is_some() {
                c.chain = a.chain;
            }
            announce("project", &g, &c)?;
            cmd_project(&g, &c)
        }
        Command::Mesh(a) => {
            let mut c = file.mesh.unwrap_or_default();
            apply!(c, a, seg_major, seg_minor);
            c.ambient |= a.ambient;
            if a.chain.is_some() {
                c.chain = a.chain;
            }
            announce("mesh", &g, &c)?;
            cmd_mesh(&g, &c)
        }
    }
}

fn announce<C: Serialize>(command: &str, g: &Globals, c: &C) -> Result<()> {
    let resolved = json!({ "command": command, "globals": g, "params": c });
    println!("config: {}", serde_json::to_string(&resolved)?);
    println!("seed: {}", g.seed);
    Ok(())
}

fn write(g: &Globals, name: &str, contents: &str) -> Result<()> {
    let path = g.out_dir.join(name);
    io::write_atomic(&path, contents.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_chain(path: &Option<PathBuf>) -> Result<Chain> {
    let path: &Path = path
        .as_deref()
        .ok_or_else(|| Error::InvalidParams("--chain is required".into()))?;
    ChainDocument::from_json(&std::fs::read_to_string(path)?)?.to_chain()
}

fn validate_opts(g: &Globals, chain: &Chain) -> ValidateOpts {
    let mut o = ValidateOpts::for_chain(chain);
    o.tol = g.tol * chain.ambient.diameter();
    o
}

fn cmd_build_chain(g: &Globals, c: &BuildChainConfig) -> Result<()> {
    let bent = build_theorem2_chain(c.r_b, c.big_r_b, c.offset, c.m)?;
    let params = json!({
        "r_b": bent.r_b, "R_b": bent.big_r_b, "A": bent.offset,
        "m": bent.m, "links": 2 * bent.m, "psi0": bent.psi0, "psi": bent.psi,
    });
    let verdict = serde_json::to_value(bent.verdict.summary())?;
    let doc = ChainDocument::from_chain(&bent.chain, params.clone(), verdict);
    write(g, "chain.json", &doc.to_json()?)?;

    let enclosing = match enclosing_similar_torus(&bent.chain, c.r_b, c.big_r_b) {
        Ok(t) => {
            let similar = Chain::new(t, bent.chain.links.clone(), bent.chain.kind)?;
            let doc = ChainDocument::from_chain(&similar, params.clone(), serde_json::Value::Null);
            write(g, "chain_similar.json", &doc.to_json()?)?;
            json!({ "R": t.circle.radius, "r": t.tube_radius })
        }
        Err(Error::PreconditionFailed(reason)) => json!({ "skipped": reason }),
        Err(e) => return Err(e),
    };
    let result = json!({ "verdict": bent.verdict, "enclosing": enclosing });
    write(g, "verdict.json", &io::summary_json("build_chain", &params, &result)?)?;
    println!("valid: {} links, psi0 = {}, psi = {}", 2 * bent.m, bent.psi0, bent.psi);
    Ok(())
}

fn cmd_regular(g: &Globals, c: &RegularConfig) -> Result<()> {
    let p = RegularChainParams::new(c.major, c.minor, c.m, c.s)?;
    let chain = regular_chain_from_params(&p)?;
    let verdict = validate_chain_with(&chain, &validate_opts(g, &chain));
    let summary = verdict.summary();
    let doc = ChainDocument::from_chain(&chain, serde_json::to_value(p)?, serde_json::to_value(&summary)?);
    write(g, "chain.json", &doc.to_json()?)?;
    write(g, "verdict.json", &io::summary_json("regular", c, &verdict)?)?;
    if !verdict.passed() {
        return Err(Error::ValidationFailed(summary.failure.unwrap_or_default()));
    }
    println!("valid: {} links, 2ms^2 = {}", 2 * c.m, 2.0 * c.m as f64 * c.s * c.s);
    Ok(())
}

fn cmd_search(g: &Globals, c: &SearchConfig) -> Result<()> {
    let grid = SearchGrid::new(
        Range { lo: c.rho_lo, hi: c.rho_hi, steps: c.rho_steps },
        Range { lo: c.s_lo, hi: c.s_hi, steps: c.s_steps },
        c.m.clone(),
    )?;
    let opts = ScanOpts {
        tol_rel: g.tol,
        minimize: MinimizeOpts { grid_n: c.grid_n, ..MinimizeOpts::default() },
    };
    let cells = scan_with(&grid, &opts)?;
    let report = certified_region_report(&cells);
    write(g, "scan.csv", &io::scan_csv(&cells)?)?;
    write(g, "scan_summary.json", &io::summary_json("search", c, &report)?)?;
    for s in &report.per_m {
        println!("2m = {:>3}: {:>6} valid, {:>6} certified", s.links, s.valid, s.certified);
    }
    if !report.violations.is_empty() {
        return Err(Error::ValidationFailed(format!(
            "{} necessary-condition violations, first: {}",
            report.violations.len(),
            report.violations[0]
        )));
    }
    Ok(())
}

fn system(g: &Globals, chain: &Chain, phase: f64) -> Result<(IfsSystem, bool)> {
    let sys = IfsSystem::from_chain(chain, phase)?;
    let verdict = validate_chain_with(chain, &validate_opts(g, chain));
    let certified = sys.certified(&verdict);
    Ok((sys, certified))
}

fn cmd_iterate(g: &Globals, c: &IterateConfig) -> Result<()> {
    let chain = load_chain(&c.chain)?;
    let (sys, certified) = system(g, &chain, c.phase)?;
    if c.points > 0 && c.depth == 0 {
        return Err(Error::InvalidParams("depth must be >= 1".into()));
    }
    let cover = iterate_cover(&sys, c.lambda, c.budget)?;
    write(g, "cover.csv", &io::cover_csv(&cover)?)?;
    let params = json!({ "lambda": c.lambda, "phase": c.phase });
    write(g, "cover.json", &ChainDocument::from_cover(&cover, params).to_json()?)?;
    if c.points > 0 {
        let pts = attractor_sample(&sys, c.points, c.depth, g.seed);
        write(g, "samples.csv", &io::samples_csv(&pts)?)?;
    }
    let moran = moran_cover_sum(&sys, c.lambda, 2.0, c.budget);
    let result = json!({
        "k": sys.k(),
        "certified": certified,
        "sum_sq": sys.sum_sq(),
        "similarity_dimension": similarity_dimension(&sys, 1e-12),
        "cover_tori": cover.tori.len(),
        "moran_closed_form": moran.closed_form,
        "moran_enumerated": moran.enumerated,
    });
    write(g, "iterate_summary.json", &io::summary_json("iterate", c, &result)?)?;
    println!("{} cover tori, certified: {certified}", cover.tori.len());
    Ok(())
}

fn cmd_project(g: &Globals, c: &ProjectConfig) -> Result<()> {
    let chain = load_chain(&c.chain)?;
    let (sys, certified) = system(g, &chain, c.phase)?;
    let center = sys.ambient.center();
    let planes = match c.scheme {
        Scheme::Default => PlaneSweep::fibonacci_sphere(center, c.planes)?.chain(PlaneSweep::axis_aligned(center)?),
        Scheme::AxisAligned => PlaneSweep::axis_aligned(center)?,
        Scheme::Fibonacci => PlaneSweep::fibonacci_sphere(center, c.planes)?,
    };
    let cfg = SweepConfig {
        lambda: c.lambda,
        raster_n: c.raster_n,
        n_points: c.points,
        depth: c.depth,
        seed: g.seed,
        scales: None,
        connect_depth: c.connect_depth,
    };
    let reports = sweep(&sys, &planes, &cfg)?;
    write(g, "reports.csv", &io::reports_csv(&reports)?)?;
    let max_slope = reports.iter().map(|r| r.box_count_slope).fold(f64::MIN, f64::max);
    let max_components = reports.iter().map(|r| r.component_count).max().unwrap_or(0);
    let result = json!({
        "certified": certified,
        "planes": reports.len(),
        "max_slope": max_slope,
        "max_components": max_components,
    });
    write(g, "project_summary.json", &io::summary_json("project", c, &result)?)?;
    println!("{} planes, max slope {max_slope:.4}, max components {max_components}", reports.len());
    Ok(())
}

fn cmd_mesh(g: &Globals, c: &MeshConfig) -> Result<()> {
    let chain = load_chain(&c.chain)?;
    let mut tori = chain.links.clone();
    if c.ambient {
        tori.insert(0, chain.ambient);
    }
    write(g, "mesh.obj", &io::tori_obj(&tori, c.seg_major, c.seg_minor)?)?;
    println!("{} tori meshed", tori.len());
    Ok(())
}
