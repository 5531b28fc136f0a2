//! Command-line front end: `construct`, `verify`, `solve` and `sweep`.
//!
//! Exit codes: 0 success, 1 failed verification or I/O trouble,
//! 2 construction failure, 3 parse or configuration error, 4 divergence.

pub mod config;
pub mod sweep;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub use config::RunConfig;
pub use sweep::{run_sweep, Axis};

use crate::error::{FsbpError, Result};
use crate::funcspace::SpaceKind;
use crate::operators::{construct, read_operator_file, verify_report, write_operator_file, FsbpOperatorSet};
use crate::quadrature::GridSpec;
use crate::solvers::run_experiment;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONSTRUCTION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_DIVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fsbp", version, about = "Function-space SBP operators and SAT solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the operators for a space and grid and write them to a file.
    Construct {
        /// e.g. `poly:d=2`, `trig:d=1`, `exp:d=2,alpha=0.1`, `rbf:alpha=1`
        #[arg(long)]
        space: String,
        /// Starting grid of the positive-rule search, e.g. `lobatto:3`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an operator file; exits 0 only if every hard invariant holds.
    Verify {
        file: PathBuf,
        /// Seed for the random integration-by-parts check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run one experiment and write its history and final snapshot.
    Solve {
        /// TOML run configuration; without it `--experiment` picks defaults.
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the `[sweep]` section of a configuration.
    Sweep {
        config: PathBuf,
        /// Overrides `sweep.axis` (`N`, `I`, `dt` or `alpha`).
        #[arg(long)]
        axis: Option<String>,
        /// Overrides `sweep.values`, comma separated.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Output file; defaults to `<dir>/<prefix>_sweep.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// Flags mirroring the most used configuration keys.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, rc: &mut RunConfig) {
        if let Some(e) = &self.experiment {
            rc.experiment = e.clone();
        }
        if self.space.is_some() {
            rc.space.kind = self.space.clone();
        }
        if self.grid.is_some() {
            rc.grid.nodes = self.grid.clone();
        }
        rc.mesh.blocks = self.blocks.or(rc.mesh.blocks);
        rc.time.t_end = self.t_end.or(rc.time.t_end);
        rc.time.dt = self.dt.or(rc.time.dt);
        rc.time.cfl = self.cfl.or(rc.time.cfl);
        if self.out_dir.is_some() {
            rc.output.dir = self.out_dir.clone();
        }
    }
}

/// Exit code of an error surfacing from a command.
pub fn exit_code(err: &FsbpError) -> i32 {
    use FsbpError::*;
    match err {
        Parse(_) | Config(_) | UnknownExperiment(_) | InvalidSat(_) => EXIT_PARSE,
        Divergence { .. } | NonFiniteState { .. } => EXIT_DIVERGENCE,
        Io(_) | ShapeMismatch(_) | EigenNonConvergence => EXIT_FAILED,
        _ => EXIT_CONSTRUCTION,
    }
}

/// `max |uᵀP D1 v + (D1 u)ᵀP v − uᵀB v|` over `trials` random pairs,
/// relative to `‖u‖‖v‖` scaled by the size of `P D1`.
pub fn ibp_residual(set: &FsbpOperatorSet, trials: usize, seed: u64) -> f64 {
    let n = set.n();
    let mut rng = StdRng::seed_from_u64(seed);
    let pd = DMatrix::from_diagonal(&set.p) * &set.d1;
    let scale = pd.amax().max(1.0) * n as f64;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let u = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let lhs = u.dot(&(&pd * &v)) + (&pd * &u).dot(&v);
        let rhs = u.dot(&(&set.b * &v));
        worst = worst.max((lhs - rhs).abs() / (scale * u.amax() * v.amax()));
    }
    worst
}

fn cmd_construct(space: &str, grid: &str, out: &PathBuf) -> Result<i32> {
    let kind: SpaceKind = space.parse()?;
    let grid: GridSpec = grid.parse()?;
    let set = construct(&kind, grid)?;
    write_operator_file(&set, out)?;
    let report = verify_report(&set)?;
    println!("space {} on {} nodes (requested {grid})", set.tag, set.n());
    let weights: Vec<String> = set.p.iter().map(|w| format!("{w:e}")).collect();
    println!("p = [{}]", weights.join(", "));
    println!("sbp identity |Q+Q^T-B|_max = {:e}", report.sbp_residual);
    if let Some(r) = report.exactness_d1 {
        println!("exactness order 1 (F+F') = {r:e}");
    }
    if let Some(r) = report.exactness_d2 {
        println!("exactness order 2 (F) = {r:e}");
    }
    println!("wrote {}", out.display());
    Ok(EXIT_OK)
}

fn cmd_verify(file: &PathBuf, seed: u64) -> Result<i32> {
    let set = read_operator_file(file).map_err(|e| match e {
        FsbpError::Io(io) => FsbpError::Parse(format!("{}: {io}", file.display())),
        other => other,
    })?;
    let report = verify_report(&set)?;
    print!("{report}");
    let ibp = ibp_residual(&set, 100, seed);
    let ibp_ok = ibp <= 1e-10;
    println!("integration by parts on 100 random pairs (seed {seed}) = {ibp:.3e} [{}]", if ibp_ok { "ok" } else { "FAIL" });
    let ok = report.passes() && ibp_ok;
    println!("{}", if ok { "verdict: pass" } else { "verdict: FAIL" });
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn load_config(path: Option<&PathBuf>, overrides: &Overrides) -> Result<RunConfig> {
    let mut rc = match path {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut rc);
    if rc.experiment.trim().is_empty() {
        return Err(FsbpError::Config("no experiment given (config key `experiment` or --experiment)".into()));
    }
    Ok(rc)
}

fn cmd_solve(path: Option<&PathBuf>, overrides: &Overrides) -> Result<i32> {
    let rc = load_config(path, overrides)?;
    let cfg = rc.experiment_config()?;
    let report = match run_experiment(&rc.experiment, &cfg) {
        Ok(r) => r,
        Err(FsbpError::Divergence { step, time }) => {
            eprintln!("diverged at step {step}; last finite time {time:e}");
            return Ok(EXIT_DIVERGENCE);
        }
        Err(e) => return Err(e),
    };
    let dir = rc.output_dir();
    fs::create_dir_all(&dir)?;
    let history = dir.join(format!("{}_history.csv", rc.prefix()));
    let snapshot = dir.join(format!("{}_snapshot.csv", rc.prefix()));
    report.write_files(&history, &snapshot)?;
    println!("{} with {}: {} steps of dt = {:e}", report.experiment, report.scheme, report.steps, report.dt);
    println!("relative mass drift = {:e}", report.mass_drift());
    match report.errors {
        Some(e) => println!("relative errors: 1 = {:e}, 2 = {:e}, inf = {:e}, P = {:e}", e.l1, e.l2, e.linf, e.p),
        None => println!("no reference solution configured"),
    }
    println!("wrote {} and {}", history.display(), snapshot.display());
    Ok(EXIT_OK)
}

fn cmd_sweep(
    path: &PathBuf,
    axis: Option<&String>,
    values: Option<&Vec<f64>>,
    out: Option<&PathBuf>,
    overrides: &Overrides,
) -> Result<i32> {
    let rc = load_config(Some(path), overrides)?;
    let mut sweep = rc.sweep.clone().unwrap_or_default();
    if let Some(a) = axis {
        sweep.axis = a.clone();
    }
    if let Some(v) = values {
        sweep.values = v.clone();
    }
    if sweep.axis.is_empty() {
        return Err(FsbpError::Config("no sweep axis given ([sweep] axis or --axis)".into()));
    }
    let target = match out {
        Some(p) => p.clone(),
        None => {
            let dir = rc.output_dir();
            fs::create_dir_all(&dir)?;
            dir.join(format!("{}_sweep.csv", rc.prefix()))
        }
    };
    let mut buf = Vec::new();
    run_sweep(&rc, &sweep, &mut buf)?;
    let mut file = fs::File::create(&target)?;
    file.write_all(&buf)?;
    println!("wrote {}", target.display());
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Construct { space, grid, out } => cmd_construct(space, grid, out),
        Command::Verify { file, seed } => cmd_verify(file, *seed),
        Command::Solve { config, overrides } => cmd_solve(config.as_ref(), overrides),
        Command::Sweep { config, axis, values, out, overrides } => {
            cmd_sweep(config, axis.as_ref(), values.as_ref(), out.as_ref(), overrides)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
