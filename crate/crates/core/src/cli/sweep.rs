//! Parameter sweeps written as long-format CSV.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{RunConfig, SweepSection};
use crate::error::{FsbpError, Result};
use crate::funcspace::SpaceKind;
use crate::quadrature::GridSpec;
use crate::solvers::{default_grid, run_experiment, ExperimentConfig, WaveOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Nodes per block (for trigonometric spaces also `d = (N − 2)/2`).
    N,
    /// Block count.
    I,
    Dt,
    /// Shape parameter of exponential and Gaussian spaces.
    Alpha,
}

impl std::str::FromStr for Axis {
    type Err = FsbpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "N" | "n" => Ok(Axis::N),
            "I" | "blocks" => Ok(Axis::I),
            "dt" => Ok(Axis::Dt),
            "alpha" => Ok(Axis::Alpha),
            other => Err(FsbpError::Parse(format!("sweep axis `{other}` (N, I, dt or alpha)"))),
        }
    }
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::N => "N",
            Axis::I => "I",
            Axis::Dt => "dt",
            Axis::Alpha => "alpha",
        }
    }

    fn count(value: f64) -> Result<usize> {
        if value >= 1.0 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(FsbpError::Config(format!("sweep value {value} is not a positive integer")))
        }
    }

    /// `cfg` moved to `value` along this axis.
    pub fn apply(self, cfg: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = cfg.clone();
        match self {
            Axis::N => {
                let n = Self::count(value)?;
                if let SpaceKind::Trigonometric(_) = cfg.space {
                    if n < 4 || n % 2 != 0 {
                        return Err(FsbpError::Config(format!("trigonometric grids need even N >= 4, got {n}")));
                    }
                    cfg.space = SpaceKind::Trigonometric((n - 2) / 2);
                }
                let family = cfg.grid.unwrap_or_else(|| default_grid(&cfg.space)).family;
                cfg.grid = Some(GridSpec { family, n });
            }
            Axis::I => cfg.blocks = Self::count(value)?,
            Axis::Dt => cfg.time.dt = Some(value),
            Axis::Alpha => match &mut cfg.space {
                SpaceKind::Exponential { alpha, .. } | SpaceKind::GaussianRbf { alpha, .. } => *alpha = value,
                other => return Err(FsbpError::Config(format!("space `{other}` has no shape parameter"))),
            },
        }
        Ok(cfg)
    }

    /// Observed order from two consecutive points; errors fall as `N`, `I`
    /// grow and as `dt` shrinks.
    fn order(self, (v0, e0): (f64, f64), (v1, e1): (f64, f64)) -> f64 {
        let rate = (e1 / e0).ln() / (v1 / v0).ln();
        match self {
            Axis::N | Axis::I => -rate,
            Axis::Dt => rate,
            Axis::Alpha => f64::NAN,
        }
    }
}

/// A sweep scheme: a space tag, or a wave operator name. A grid set in the
/// configuration is kept, so schemes can be compared on the same nodes.
fn apply_scheme(cfg: &ExperimentConfig, scheme: &str) -> Result<ExperimentConfig> {
    let mut cfg = cfg.clone();
    if let Ok(op) = scheme.parse::<WaveOperator>() {
        cfg.wave_operator = op;
    } else {
        cfg.space = scheme.parse()?;
    }
    Ok(cfg)
}

/// RFC 4180 quoting for fields holding commas or quotes.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const ALL_NORMS: [&str; 4] = ["1", "2", "inf", "P"];

#[derive(Clone, Debug)]
struct Point {
    scheme: String,
    value: f64,
    status: &'static str,
    errors: [f64; 4],
    mass_drift: f64,
    steps: usize,
    runtime: f64,
}

fn run_point(base: &ExperimentConfig, scheme: &str, axis: Axis, value: f64) -> Point {
    let start = Instant::now();
    let outcome = apply_scheme(base, scheme)
        .and_then(|cfg| axis.apply(&cfg, value))
        .and_then(|cfg| run_experiment(cfg.experiment.name(), &cfg));
    let mut point = Point {
        scheme: scheme.to_string(),
        value,
        status: "ok",
        errors: [f64::NAN; 4],
        mass_drift: f64::NAN,
        steps: 0,
        runtime: 0.0,
    };
    match outcome {
        Ok(report) => {
            if let Some(e) = report.errors {
                point.errors = [e.l1, e.l2, e.linf, e.p];
            }
            point.mass_drift = report.mass_drift();
            point.steps = report.steps;
        }
        Err(err) => {
            point.status = if matches!(err, FsbpError::Divergence { .. }) { "diverged" } else { "failed" };
            eprintln!("sweep point {scheme} {}={value}: {err}", axis.name());
        }
    }
    point.runtime = start.elapsed().as_secs_f64();
    point
}

/// Runs every `(scheme, value)` point and writes one row per point and norm.
/// Failed points give NaN rows; the sweep goes on.
pub fn run_sweep(rc: &RunConfig, sweep: &SweepSection, out: &mut impl Write) -> Result<()> {
    let base = rc.experiment_config()?;
    let axis: Axis = sweep.axis.parse()?;
    if sweep.values.is_empty() {
        return Err(FsbpError::Config("sweep.values is empty".into()));
    }
    let norms: Vec<String> = match &sweep.norms {
        Some(n) => n.clone(),
        None => ALL_NORMS.iter().map(|s| s.to_string()).collect(),
    };
    let norm_index: Vec<usize> = norms
        .iter()
        .map(|n| match n.as_str() {
            "1" | "l1" => Ok(0),
            "2" | "l2" => Ok(1),
            "inf" | "linf" => Ok(2),
            "P" | "p" => Ok(3),
            other => Err(FsbpError::Parse(format!("norm `{other}` (1, 2, inf or P)"))),
        })
        .collect::<Result<_>>()?;
    let schemes: Vec<String> = if sweep.schemes.is_empty() {
        vec![match base.wave_operator {
            WaveOperator::Fd(_) if base.experiment == crate::solvers::Experiment::Wave => base.wave_operator.to_string(),
            _ => base.space.to_string(),
        }]
    } else {
        sweep.schemes.clone()
    };
    let jobs: Vec<(&str, f64)> =
        schemes.iter().flat_map(|s| sweep.values.iter().map(move |&v| (s.as_str(), v))).collect();
    // collected in job order, so the file does not depend on scheduling
    let points: Vec<Point> = jobs.par_iter().map(|&(s, v)| run_point(&base, s, axis, v)).collect();

    write!(out, "scheme,axis,value,norm,error,order,mass_drift,steps,status")?;
    if rc.output.runtime {
        write!(out, ",runtime_secs")?;
    }
    writeln!(out)?;
    for (k, p) in points.iter().enumerate() {
        let prev = (k > 0 && points[k - 1].scheme == p.scheme).then(|| &points[k - 1]);
        for (name, &j) in norms.iter().zip(&norm_index) {
            let order = prev.map_or(f64::NAN, |q| axis.order((q.value, q.errors[j]), (p.value, p.errors[j])));
            write!(
                out,
                "{},{},{:e},{},{:e},{:e},{:e},{},{}",
                csv_field(&p.scheme),
                axis.name(),
                p.value,
                name,
                p.errors[j],
                order,
                p.mass_drift,
                p.steps,
                p.status
            )?;
            if rc.output.runtime {
                write!(out, ",{:e}", p.runtime)?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
