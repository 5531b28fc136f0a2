//! The six numerical experiments and their default settings.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use super::advdiff::{AdvDiff1d, AdvDiff2d, Boundary};
use super::burgers::Burgers;
use super::mesh::BlockMesh;
use super::reference::{self, BlockInterpolant, Mode, WaveData};
use super::report::{ErrorNorms, ExperimentReport};
use super::sat::SatCoefficients;
use super::time::{integrate, SolveConfig};
use super::wave::Wave;
use crate::error::{FsbpError, Result};
use crate::funcspace::{Interval, SpaceKind};
use crate::operators::{construct, fd_stencil, periodic_fd_operator, FsbpOperatorSet};
use crate::quadrature::{GridSpec, NodeFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    AdvDiff1dSingle,
    AdvDiff1dMulti,
    AdvDiff2d,
    BoundaryLayer,
    Burgers,
    Wave,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::AdvDiff1dSingle,
        Experiment::AdvDiff1dMulti,
        Experiment::AdvDiff2d,
        Experiment::BoundaryLayer,
        Experiment::Burgers,
        Experiment::Wave,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::AdvDiff1dSingle => "advdiff-1d-single",
            Experiment::AdvDiff1dMulti => "advdiff-1d-multi",
            Experiment::AdvDiff2d => "advdiff-2d",
            Experiment::BoundaryLayer => "boundary-layer",
            Experiment::Burgers => "burgers",
            Experiment::Wave => "wave",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = FsbpError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| FsbpError::UnknownExperiment(s.to_string()))
    }
}

/// Which second-derivative operator the wave problem uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveOperator {
    /// The FSBP operator of the configured space and grid.
    Fsbp,
    /// Circulant central difference of order 2, 4 or 6.
    Fd(usize),
}

impl FromStr for WaveOperator {
    type Err = FsbpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fsbp" => Ok(WaveOperator::Fsbp),
            other => {
                let order = other
                    .strip_prefix("fd")
                    .and_then(|o| o.trim_start_matches(':').parse::<usize>().ok())
                    .ok_or_else(|| FsbpError::Parse(format!("wave operator `{other}` (fsbp, fd2, fd4, fd6)")))?;
                fd_stencil(order)?;
                Ok(WaveOperator::Fd(order))
            }
        }
    }
}

impl fmt::Display for WaveOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveOperator::Fsbp => f.write_str("fsbp"),
            WaveOperator::Fd(o) => write!(f, "fd{o}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeControls {
    pub t_end: f64,
    pub dt: Option<f64>,
    pub cfl: f64,
    pub samples: usize,
}

/// Everything one run needs. [`ExperimentConfig::defaults`] gives the
/// published setting of each experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub space: SpaceKind,
    /// Starting grid for the quadrature search; `None` picks
    /// [`default_grid`].
    pub grid: Option<GridSpec>,
    pub blocks: usize,
    pub domain: (f64, f64),
    /// Advection speeds along x and y.
    pub a: (f64, f64),
    /// Diffusivities along x and y.
    pub eps: (f64, f64),
    /// Wave speed.
    pub c: f64,
    pub sigma1_r: f64,
    /// Defaults to `−ε/2`.
    pub sigma2_r: Option<f64>,
    pub time: TimeControls,
    pub wave_data: WaveData,
    pub wave_operator: WaveOperator,
    pub reference_blocks: usize,
    pub reference_space: SpaceKind,
    pub reference_grid: GridSpec,
    /// Where computed reference solutions are cached.
    pub cache_dir: Option<PathBuf>,
}

/// The smallest usual grid for a space: `N = 2d+2` equidistant points for
/// trigonometric spaces, `d+1` Gauss–Lobatto points for polynomials and
/// `dim + 2` equidistant points otherwise.
pub fn default_grid(space: &SpaceKind) -> GridSpec {
    match *space {
        SpaceKind::Trigonometric(d) => GridSpec { family: NodeFamily::Equidistant, n: 2 * d + 2 },
        SpaceKind::Polynomial(d) => GridSpec { family: NodeFamily::GaussLobatto, n: d + 1 },
        SpaceKind::Exponential { degree, .. } => GridSpec { family: NodeFamily::Equidistant, n: degree + 3 },
        _ => GridSpec { family: NodeFamily::Equidistant, n: 5 },
    }
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let poly2 = SpaceKind::Polynomial(2);
        let lobatto3 = GridSpec { family: NodeFamily::GaussLobatto, n: 3 };
        let base = Self {
            experiment,
            space: poly2.clone(),
            grid: None,
            blocks: 1,
            domain: (-1.0, 1.0),
            a: (1.0, 0.0),
            eps: (0.0, 0.0),
            c: 1.0,
            sigma1_r: 0.0,
            sigma2_r: None,
            time: TimeControls { t_end: 1.0, dt: None, cfl: 0.5, samples: 100 },
            wave_data: WaveData::Sine,
            wave_operator: WaveOperator::Fsbp,
            reference_blocks: 0,
            reference_space: poly2,
            reference_grid: lobatto3,
            cache_dir: None,
        };
        match experiment {
            Experiment::AdvDiff1dSingle => Self {
                space: SpaceKind::Trigonometric(30),
                eps: (1e-5, 0.0),
                time: TimeControls { t_end: 1.0, dt: None, cfl: 0.1, samples: 100 },
                ..base
            },
            Experiment::AdvDiff1dMulti => Self {
                space: SpaceKind::GaussianRbf { alpha: 1.0, growing: false },
                blocks: 10,
                eps: (1e-2, 0.0),
                time: TimeControls { t_end: 0.1, dt: None, cfl: 0.1, samples: 100 },
                ..base
            },
            Experiment::AdvDiff2d => Self {
                space: SpaceKind::GaussianRbf { alpha: 1.0 / 20f64.sqrt(), growing: true },
                blocks: 20,
                domain: (0.0, 1.0),
                a: (1.0, 1.0),
                eps: (1e-4, 1e-4),
                time: TimeControls { t_end: 0.25, dt: None, cfl: 0.1, samples: 100 },
                reference_blocks: 100,
                ..base
            },
            Experiment::BoundaryLayer => Self {
                space: SpaceKind::Exponential { degree: 2, alpha: 0.1 },
                blocks: 20,
                domain: (0.0, 0.5),
                eps: (1e-2, 0.0),
                time: TimeControls { t_end: 0.75, dt: None, cfl: 0.5, samples: 100 },
                ..base
            },
            Experiment::Burgers => Self {
                space: SpaceKind::Exponential { degree: 2, alpha: 1.0 },
                blocks: 30,
                domain: (0.0, 1.0),
                a: (0.0, 0.0),
                eps: (1e-2, 0.0),
                time: TimeControls { t_end: 0.1, dt: None, cfl: 0.1, samples: 100 },
                reference_blocks: 200,
                ..base
            },
            Experiment::Wave => Self {
                space: SpaceKind::Trigonometric(10),
                a: (0.0, 0.0),
                time: TimeControls { t_end: 1.0, dt: Some(1e-4), cfl: 0.5, samples: 100 },
                ..base
            },
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid.unwrap_or_else(|| default_grid(&self.space))
    }

    pub fn domain_interval(&self) -> Result<Interval> {
        Interval::new(self.domain.0, self.domain.1)
    }

    fn sats(&self, a: f64, eps: f64) -> Result<SatCoefficients> {
        SatCoefficients::new(a, eps, self.sigma1_r, self.sigma2_r.unwrap_or(-eps / 2.0))
    }

    fn solve_config(&self, lambda_max: f64, eps: f64, dx: f64) -> SolveConfig {
        SolveConfig {
            t_end: self.time.t_end,
            dt: self.time.dt,
            cfl: self.time.cfl,
            lambda_max,
            eps,
            dx,
            samples: self.time.samples,
        }
    }

    /// The configured operator on the reference element.
    pub fn operator(&self) -> Result<FsbpOperatorSet> {
        construct(&self.space, self.grid())
    }

    /// The same experiment on the reference discretization.
    fn reference_config(&self) -> Self {
        Self {
            space: self.reference_space.clone(),
            grid: Some(self.reference_grid),
            blocks: self.reference_blocks,
            ..self.clone()
        }
    }
}

fn mass_scale(mass0: f64, weights: &[f64], u0: &[f64]) -> f64 {
    let abs: f64 = weights.iter().zip(u0).map(|(w, u)| w * u.abs()).sum();
    mass0.abs().max(abs).max(f64::MIN_POSITIVE)
}

/// Initial data of the two periodic one-dimensional runs.
pub fn advdiff_modes(experiment: Experiment) -> Vec<Mode> {
    match experiment {
        Experiment::AdvDiff1dSingle => vec![
            Mode { amp: 1.0, k: 4.0, sine: false },
            Mode { amp: 0.75, k: 40.0, sine: true },
        ],
        _ => vec![Mode { amp: 1.0, k: 4.0, sine: false }, Mode { amp: 2.0, k: 10.0, sine: true }],
    }
}

/// Sawtooth data on `[0, 1]` with its downward jump at `x = 1/2`.
pub fn burgers_initial(x: f64) -> f64 {
    if x < 0.5 {
        2.0 * x
    } else {
        2.0 * x - 2.0
    }
}

pub fn run_experiment(name: &str, config: &ExperimentConfig) -> Result<ExperimentReport> {
    let experiment: Experiment = name.parse()?;
    let config = ExperimentConfig { experiment, ..config.clone() };
    let start = Instant::now();
    let mut report = match experiment {
        Experiment::AdvDiff1dSingle | Experiment::AdvDiff1dMulti => run_periodic_1d(&config)?,
        Experiment::AdvDiff2d => run_2d(&config)?,
        Experiment::BoundaryLayer => run_boundary_layer(&config)?,
        Experiment::Burgers => run_burgers(&config)?,
        Experiment::Wave => run_wave(&config)?,
    };
    report.experiment = experiment.name().to_string();
    report.runtime_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

struct History {
    report: ExperimentReport,
}

impl History {
    fn new(scheme: String, x: Vec<f64>) -> Self {
        Self { report: ExperimentReport { scheme, x, ..Default::default() } }
    }

    fn record(&mut self, t: f64, mass: f64, energy: f64, errors: Option<ErrorNorms>) {
        self.report.times.push(t);
        self.report.mass.push(mass);
        self.report.energy.push(energy);
        self.report.sample_errors.push(errors);
    }
}

fn run_periodic_1d(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let op = cfg.operator()?;
    let mesh = BlockMesh::uniform(&op, cfg.domain_interval()?, cfg.blocks)?;
    let (a, eps) = (cfg.a.0, cfg.eps.0);
    let rhs_op = AdvDiff1d::new(mesh.clone(), cfg.sats(a, eps)?, Boundary::Periodic)?;
    let modes = advdiff_modes(cfg.experiment);
    let weights = mesh.weights();
    let mut u = mesh.sample(|x| reference::advdiff_modes(&modes, a, eps, x, 0.0));
    let solve = cfg.solve_config(a.abs(), eps, mesh.min_spacing());
    let exact_at = |t: f64| mesh.sample(|x| reference::advdiff_modes(&modes, a, eps, x, t));

    let mut hist = History::new(cfg.space.to_string(), mesh.nodes().to_vec());
    hist.report.mass_scale = mass_scale(mesh.mass(&u), &weights, &u);
    let mut rhs = |s: &[f64], _t: f64, out: &mut [f64]| rhs_op.apply(s, out);
    integrate(&mut rhs, &mut u, &solve, |t, s| {
        let e = ErrorNorms::relative(s, &exact_at(t), &weights);
        hist.record(t, mesh.mass(s), mesh.energy(s), Some(e));
    })?;
    let (steps, dt) = solve.schedule()?;
    hist.report.errors = hist.report.sample_errors.last().copied().flatten();
    hist.report.solution = u;
    hist.report.dt = dt;
    hist.report.steps = steps;
    Ok(hist.report)
}

fn run_boundary_layer(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let op = cfg.operator()?;
    let domain = cfg.domain_interval()?;
    let mesh = BlockMesh::uniform(&op, domain, cfg.blocks)?;
    let (a, eps) = (cfg.a.0, cfg.eps.0);
    let boundary = Boundary::Dirichlet { left: 0.0, right: 1.0 };
    let rhs_op = AdvDiff1d::new(mesh.clone(), cfg.sats(a, eps)?, boundary)?;
    let weights = mesh.weights();
    // linear data joining the boundary values
    let mut u = mesh.sample(|x| (x - domain.left) / domain.width());
    let steady = mesh.sample(|x| reference::boundary_layer_steady(x - domain.left, eps));
    let solve = cfg.solve_config(a.abs(), eps, mesh.min_spacing());

    let mut hist = History::new(cfg.space.to_string(), mesh.nodes().to_vec());
    hist.report.mass_scale = mass_scale(mesh.mass(&u), &weights, &u);
    let mut rhs = |s: &[f64], _t: f64, out: &mut [f64]| rhs_op.apply(s, out);
    integrate(&mut rhs, &mut u, &solve, |t, s| {
        let e = ErrorNorms::relative(s, &steady, &weights);
        hist.record(t, mesh.mass(s), mesh.energy(s), Some(e));
    })?;
    let (steps, dt) = solve.schedule()?;
    hist.report.errors = hist.report.sample_errors.last().copied().flatten();
    hist.report.solution = u;
    hist.report.dt = dt;
    hist.report.steps = steps;
    Ok(hist.report)
}

/// Final Burgers state on the configured mesh, without error evaluation.
fn solve_burgers(cfg: &ExperimentConfig) -> Result<(BlockMesh, ExperimentReport)> {
    let op = cfg.operator()?;
    let mesh = BlockMesh::uniform(&op, cfg.domain_interval()?, cfg.blocks)?;
    let eps = cfg.eps.0;
    let rhs_op = Burgers::new(mesh.clone(), eps)?;
    let weights = mesh.weights();
    let mut u = mesh.sample(burgers_initial);
    let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let solve = cfg.solve_config(umax, eps, mesh.min_spacing());

    let mut hist = History::new(cfg.space.to_string(), mesh.nodes().to_vec());
    hist.report.mass_scale = mass_scale(mesh.mass(&u), &weights, &u);
    let mut rhs = |s: &[f64], _t: f64, out: &mut [f64]| rhs_op.apply(s, out);
    integrate(&mut rhs, &mut u, &solve, |t, s| hist.record(t, mesh.mass(s), mesh.energy(s), None))?;
    let (steps, dt) = solve.schedule()?;
    hist.report.solution = u;
    hist.report.dt = dt;
    hist.report.steps = steps;
    Ok((mesh, hist.report))
}

fn cache_file(cfg: &ExperimentConfig) -> Option<PathBuf> {
    let dir = cfg.cache_dir.as_ref()?;
    let name = format!(
        "{}-ref-{}-{}-I{}-eps{:e}-t{:e}-cfl{:e}.csv",
        cfg.experiment,
        cfg.space,
        cfg.grid(),
        cfg.blocks,
        cfg.eps.0,
        cfg.time.t_end,
        cfg.time.cfl
    )
    .replace([':', ',', '='], "_");
    Some(dir.join(name))
}

fn read_cached(path: &PathBuf, len: usize) -> Option<Vec<f64>> {
    let text = fs::read_to_string(path).ok()?;
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).and_then(|v| v.trim().parse().ok()))
        .collect::<Option<_>>()?;
    (values.len() == len).then_some(values)
}

/// The fine Burgers solution, read from the cache when present.
pub fn burgers_reference(cfg: &ExperimentConfig) -> Result<(BlockMesh, Vec<f64>)> {
    let rcfg = cfg.reference_config();
    let mesh = BlockMesh::uniform(&rcfg.operator()?, rcfg.domain_interval()?, rcfg.blocks)?;
    let path = cache_file(&rcfg);
    if let Some(values) = path.as_ref().and_then(|p| read_cached(p, mesh.len())) {
        return Ok((mesh, values));
    }
    let (mesh, report) = solve_burgers(&rcfg)?;
    if let Some(path) = path {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut out = std::io::BufWriter::new(fs::File::create(&path)?);
        report.write_snapshot(&mut out)?;
        out.flush()?;
    }
    Ok((mesh, report.solution))
}

fn run_burgers(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (mesh, mut report) = solve_burgers(cfg)?;
    if cfg.reference_blocks > 0 {
        let (ref_mesh, ref_values) = burgers_reference(cfg)?;
        let interp = BlockInterpolant::new(&ref_mesh);
        let at_nodes = interp.eval_many(&ref_values, mesh.nodes())?;
        report.errors = Some(ErrorNorms::relative(&report.solution, &at_nodes, &mesh.weights()));
    }
    Ok(report)
}

/// Final 2D state on the configured mesh.
fn solve_2d(cfg: &ExperimentConfig) -> Result<(BlockMesh, ExperimentReport)> {
    let op = cfg.operator()?;
    let mesh = BlockMesh::uniform(&op, cfg.domain_interval()?, cfg.blocks)?;
    let rhs_op = AdvDiff2d::new(
        AdvDiff1d::new(mesh.clone(), cfg.sats(cfg.a.0, cfg.eps.0)?, Boundary::Periodic)?,
        AdvDiff1d::new(mesh.clone(), cfg.sats(cfg.a.1, cfg.eps.1)?, Boundary::Periodic)?,
    );
    let xs = mesh.nodes().to_vec();
    let mut u: Vec<f64> = xs
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| reference::gaussian_2d(x, y, 0.0, (0.0, 0.0), (0.0, 0.0), (0.25, 0.25))))
        .collect();
    let w1 = mesh.weights();
    let weights: Vec<f64> = w1.iter().flat_map(|wy| w1.iter().map(move |wx| wx * wy)).collect();
    let solve = cfg.solve_config(cfg.a.0.abs() + cfg.a.1.abs(), cfg.eps.0 + cfg.eps.1, mesh.min_spacing());

    let mut hist = History::new(cfg.space.to_string(), xs.clone());
    hist.report.y = Some(xs);
    hist.report.mass_scale = mass_scale(rhs_op.mass(&u), &weights, &u);
    let mut rhs = |s: &[f64], _t: f64, out: &mut [f64]| rhs_op.apply(s, out);
    integrate(&mut rhs, &mut u, &solve, |t, s| hist.record(t, rhs_op.mass(s), rhs_op.energy(s), None))?;
    let (steps, dt) = solve.schedule()?;
    hist.report.solution = u;
    hist.report.dt = dt;
    hist.report.steps = steps;
    Ok((mesh, hist.report))
}

/// The fine 2D reference solution on its own mesh.
pub fn reference_2d(cfg: &ExperimentConfig) -> Result<(BlockMesh, Vec<f64>)> {
    let (mesh, report) = solve_2d(&cfg.reference_config())?;
    Ok((mesh, report.solution))
}

fn run_2d(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (mesh, mut report) = solve_2d(cfg)?;
    if cfg.reference_blocks > 0 {
        let (ref_mesh, ref_values) = reference_2d(cfg)?;
        let interp = BlockInterpolant::new(&ref_mesh);
        let at_nodes = interp.eval_tensor(&ref_values, mesh.nodes(), mesh.nodes())?;
        let w1 = mesh.weights();
        let weights: Vec<f64> = w1.iter().flat_map(|wy| w1.iter().map(move |wx| wx * wy)).collect();
        report.errors = Some(ErrorNorms::relative(&report.solution, &at_nodes, &weights));
    }
    Ok(report)
}

/// Second-derivative operator, nodes and weights of a wave run.
pub fn wave_operator(cfg: &ExperimentConfig) -> Result<(nalgebra::DMatrix<f64>, Vec<f64>, Vec<f64>)> {
    let domain = cfg.domain_interval()?;
    match cfg.wave_operator {
        WaveOperator::Fsbp => {
            let op = cfg.operator()?.map_to_block(domain);
            let d2 = op.d2().clone();
            Ok((d2, op.nodes.clone(), op.p.iter().copied().collect()))
        }
        WaveOperator::Fd(order) => {
            let n = cfg.grid().n;
            let d2 = periodic_fd_operator(&fd_stencil(order)?, n, domain)?;
            let dx = domain.width() / n as f64;
            let nodes = (0..n).map(|k| domain.left + k as f64 * dx).collect();
            Ok((d2, nodes, vec![dx; n]))
        }
    }
}

fn run_wave(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (d2, nodes, weights) = wave_operator(cfg)?;
    let n = nodes.len();
    let (c, data) = (cfg.c, cfg.wave_data);
    let wave = Wave::new(d2, c)?;
    let mut state: Vec<f64> = nodes
        .iter()
        .map(|&x| reference::wave_exact(data, c, x, 0.0))
        .chain(nodes.iter().map(|&x| reference::wave_exact_velocity(data, c, x, 0.0)))
        .collect();
    let min_dx = nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let solve = cfg.solve_config(c.abs(), 0.0, min_dx);
    let mass = |u: &[f64]| u.iter().zip(&weights).map(|(u, w)| u * w).sum::<f64>();
    let energy = |u: &[f64]| u.iter().zip(&weights).map(|(u, w)| u * u * w).sum::<f64>();
    let exact_at = |t: f64| nodes.iter().map(|&x| reference::wave_exact(data, c, x, t)).collect::<Vec<_>>();

    let scheme = match cfg.wave_operator {
        WaveOperator::Fsbp => cfg.space.to_string(),
        other => other.to_string(),
    };
    let mut hist = History::new(scheme, nodes.clone());
    hist.report.mass_scale = mass_scale(mass(&state[..n]), &weights, &state[..n]);
    let mut rhs = |s: &[f64], _t: f64, out: &mut [f64]| wave.apply(s, out);
    integrate(&mut rhs, &mut state, &solve, |t, s| {
        let u = &s[..n];
        let e = ErrorNorms::relative(u, &exact_at(t), &weights);
        hist.record(t, mass(u), energy(u), Some(e));
    })?;
    let (steps, dt) = solve.schedule()?;
    state.truncate(n);
    hist.report.errors = hist.report.sample_errors.last().copied().flatten();
    hist.report.solution = state;
    hist.report.dt = dt;
    hist.report.steps = steps;
    Ok(hist.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("nope".parse::<Experiment>(), Err(FsbpError::UnknownExperiment(_))));
        assert!(matches!(
            run_experiment("nope", &ExperimentConfig::defaults(Experiment::Wave)),
            Err(FsbpError::UnknownExperiment(_))
        ));
        assert_eq!("fd6".parse::<WaveOperator>().unwrap(), WaveOperator::Fd(6));
        assert!("fd8".parse::<WaveOperator>().is_err());
    }

    #[test]
    fn default_grids() {
        assert_eq!(default_grid(&SpaceKind::Trigonometric(30)).to_string(), "equi:62");
        assert_eq!(default_grid(&SpaceKind::Polynomial(60)).to_string(), "lobatto:61");
        assert_eq!(default_grid(&SpaceKind::Exponential { degree: 2, alpha: 0.1 }).to_string(), "equi:5");
    }

    #[test]
    fn wave_f1_is_exact_for_the_trigonometric_operator() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Wave);
        cfg.space = SpaceKind::Trigonometric(5);
        cfg.time.dt = Some(1e-4);
        cfg.time.t_end = 0.1;
        let r = run_experiment("wave", &cfg).unwrap();
        assert!(r.errors.unwrap().p < 1e-8, "{:?}", r.errors);
    }
}
