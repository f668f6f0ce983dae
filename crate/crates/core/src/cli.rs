//! The `cvrp` command line.
//!
//! Exit codes: 0 success, 1 infeasible solution, 2 usage or solver error,
//! 3 I/O or parse error. `CVRP_THREADS` caps the worker threads.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, BenchConfig};
use crate::error::{Error, Result};
use crate::general::{solve, Algorithm};
use crate::generate::{generate, DemandLaw, GeneratorSpec, Layout};
use crate::io::{emit_native, emit_solution, parse_instance, parse_solution};
use crate::model::{verify_solution, Instance, Point, Solution};
use crate::params::{derive_params, Overrides, Params};
use crate::report::RunReport;
use crate::svg::emit_svg;

const SOLUTION_HELP: &str = "Solution files hold one tour per line. A bare id visits \
a terminal, (id) serves it by an out-and-back excursion from the current route position, \
and @x,y passes through an auxiliary point.";

#[derive(Debug, Parser)]
#[command(name = "cvrp", version, about = "Unsplittable Euclidean vehicle routing", after_help = SOLUTION_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and print a run report.
    Solve(SolveArgs),
    /// Check a solution against an instance.
    Verify(VerifyArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Ratio table of several algorithms over random instances.
    Bench(BenchArgs),
    /// Draw a solution as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args, Clone)]
pub struct ParamArgs {
    /// Accuracy parameter.
    #[arg(long, default_value_t = 0.4)]
    pub epsilon: f64,
    /// Replace the distance ratio C.
    #[arg(long = "override-C")]
    pub override_c: Option<f64>,
    /// Replace the many-tours threshold.
    #[arg(long = "override-gamma")]
    pub override_gamma: Option<f64>,
    /// Replace the rounding granularity.
    #[arg(long = "override-beta")]
    pub override_beta: Option<f64>,
    /// Largest instance solved exactly by the few-tours backend and the exact algorithm.
    #[arg(long = "exact-threshold")]
    pub exact_threshold: Option<usize>,
    /// Largest point set given to the exact TSP.
    #[arg(long = "tsp-exact-threshold")]
    pub tsp_exact_threshold: Option<usize>,
}

impl ParamArgs {
    pub fn params(&self) -> Result<Params> {
        let mut p = derive_params(
            self.epsilon,
            Overrides {
                c: self.override_c,
                gamma: self.override_gamma,
                beta: self.override_beta,
                ..Default::default()
            },
        )?;
        if let Some(t) = self.exact_threshold {
            p.backend_exact_threshold = t;
        }
        if let Some(t) = self.tsp_exact_threshold {
            p.tsp_exact_threshold = t;
        }
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    /// auto, big, many-tours, few-tours, itp or exact.
    #[arg(long, default_value = "auto")]
    pub alg: Algorithm,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the solution here.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Write an SVG plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    /// Include wall time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayoutKind {
    Disk,
    Annulus,
    Clustered,
    Colocated,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "annulus")]
    pub layout: LayoutKind,
    #[arg(long)]
    pub n: usize,
    /// uniform:LO:HI, fixed:D or mixed:P_BIG:EPS.
    #[arg(long, default_value = "uniform:0.05:0.95")]
    pub demand: DemandLaw,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inner radius (annulus).
    #[arg(long, default_value_t = 1.0)]
    pub inner: f64,
    /// Outer radius (annulus), or the radius of disk and cluster layouts.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 3)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0.3)]
    pub spread: f64,
    /// Location of a co-located layout, as x,y.
    #[arg(long, default_value = "1,1")]
    pub at: String,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Sizes as A..B (inclusive) or a comma list.
    #[arg(long, default_value = "6..8")]
    pub n: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated algorithms.
    #[arg(long, default_value = "auto,few-tours,many-tours,itp")]
    pub algs: String,
    /// Probability that a generated terminal is big.
    #[arg(long = "p-big", default_value_t = 0.5)]
    pub p_big: f64,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?)
}

fn load_solution(path: &Path) -> Result<Solution> {
    parse_solution(&read(path)?)
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Io(_) | Error::Parse { .. } | Error::Unsupported(_) | Error::InvalidInstance(_) => 3,
        _ => 2,
    }
}

/// Parses `A..B` (inclusive) or `a,b,c`.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParam(format!("invalid size list '{text}'"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a == 0 || a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let sizes: Vec<usize> = text
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if sizes.contains(&0) {
        return Err(bad());
    }
    Ok(sizes)
}

fn parse_point(text: &str) -> Result<Point> {
    let bad = || Error::InvalidParam(format!("invalid point '{text}'"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    Ok(Point::new(
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

/// Runs the command line with the given arguments and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let threads = std::env::var("CVRP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0);
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok((code, text)) => {
            if out.write_all(text.as_bytes()).is_err() {
                let _ = writeln!(err, "error: cannot write output");
                return 3;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code and standard output text.
fn execute(command: Command) -> Result<(i32, String)> {
    let mut out = String::new();
    let mut put = |text: &str| out.push_str(text);
    let code = match command {
        Command::Solve(a) => {
            let params = a.params.params()?;
            let instance = load_instance(&a.instance)?;
            let start = Instant::now();
            let outcome = solve(&instance, &params, a.alg, a.seed)?;
            let mut report = RunReport::new(&instance, &outcome, a.alg, &params, a.seed);
            if a.timing {
                report.wall_time = Some(start.elapsed().as_secs_f64());
            }
            if !report.feasible {
                let check = verify_solution(&instance, &outcome.solution);
                return Err(Error::Internal(format!("solver produced an infeasible solution\n{check}")));
            }
            if let Some(path) = &a.out {
                write(path, &emit_solution(&outcome.solution))?;
            }
            if let Some(path) = &a.svg {
                emit_svg(&instance, &outcome.solution, path)?;
            }
            put(&if a.json { report.to_json() } else { report.to_text() });
            0
        }
        Command::Verify(a) => {
            let instance = load_instance(&a.instance)?;
            let solution = load_solution(&a.solution)?;
            let check = verify_solution(&instance, &solution);
            let text = if a.json {
                serde_json::to_string_pretty(&check).expect("report serializes") + "\n"
            } else {
                check.to_string()
            };
            put(&text);
            if check.is_feasible() { 0 } else { 1 }
        }
        Command::Gen(a) => {
            let layout = match a.layout {
                LayoutKind::Disk => Layout::UniformDisk { radius: a.radius },
                LayoutKind::Annulus => Layout::Annulus { inner: a.inner, outer: a.radius },
                LayoutKind::Clustered => Layout::Clustered {
                    clusters: a.clusters,
                    radius: a.radius,
                    spread: a.spread,
                },
                LayoutKind::Colocated => Layout::CoLocated { at: parse_point(&a.at)? },
            };
            let instance = generate(&GeneratorSpec {
                layout,
                n: a.n,
                demand: a.demand,
                seed: a.seed,
            })?;
            let text = emit_native(&instance);
            match &a.out {
                Some(path) => write(path, &text)?,
                None => put(&text),
            }
            0
        }
        Command::Bench(a) => {
            let params = a.params.params()?;
            let algorithms: Vec<Algorithm> = a
                .algs
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<_>>()?;
            let table = run_bench(&BenchConfig {
                sizes: parse_sizes(&a.n)?,
                trials: a.trials,
                seed: a.seed,
                algorithms,
                exact_cap: params.backend_exact_threshold,
                params,
                p_big: a.p_big,
            })?;
            put(&if a.json { table.to_json() } else { table.to_text() });
            0
        }
        Command::Plot(a) => {
            let instance = load_instance(&a.instance)?;
            let solution = load_solution(&a.solution)?;
            let check = verify_solution(&instance, &solution);
            if !check.is_feasible() {
                put(&check.to_string());
                return Ok((1, out));
            }
            emit_svg(&instance, &solution, &a.out)?;
            0
        }
    };
    Ok((code, out))
}
