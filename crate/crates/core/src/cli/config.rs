//! TOML run configuration.
//!
//! ```toml
//! experiment = "boundary-layer"
//! seed = 7
//!
//! [space]
//! kind = "exp:d=2,alpha=0.1"
//!
//! [grid]
//! nodes = "equi:5"
//!
//! [mesh]
//! domain = [0.0, 0.5]
//! blocks = 20
//!
//! [physics]
//! a = 1.0            # or [a1, a2]
//! eps = 1e-2
//!
//! [time]
//! t_end = 0.75
//! cfl = 0.5
//!
//! [output]
//! dir = "out"
//!
//! [sweep]
//! axis = "I"
//! values = [5, 10, 20, 40]
//! schemes = ["poly:d=2", "exp:d=2,alpha=0.1"]
//! ```
//! Every key except `experiment` is optional; missing keys take the
//! experiment's defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{FsbpError, Result};
use crate::funcspace::SpaceKind;
use crate::quadrature::GridSpec;
use crate::solvers::{Experiment, ExperimentConfig, WaveData, WaveOperator};

/// A scalar applied to both directions or an explicit `[x, y]` pair.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Pair {
    One(f64),
    Two([f64; 2]),
}

impl Pair {
    fn split(self, experiment: Experiment) -> (f64, f64) {
        match self {
            Pair::Two([x, y]) => (x, y),
            Pair::One(v) if experiment == Experiment::AdvDiff2d => (v, v),
            Pair::One(v) => (v, 0.0),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub kind: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nodes: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub domain: Option<[f64; 2]>,
    pub blocks: Option<usize>,
    pub dimensions: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub a: Option<Pair>,
    pub eps: Option<Pair>,
    pub c: Option<f64>,
    pub sigma1_r: Option<f64>,
    pub sigma2_r: Option<f64>,
    pub wave_data: Option<String>,
    pub wave_operator: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub cfl: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    pub blocks: Option<usize>,
    pub space: Option<String>,
    pub grid: Option<String>,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// File name prefix; defaults to the experiment name.
    pub prefix: Option<String>,
    /// Adds a wall-clock column to sweep files (they stop being reproducible).
    #[serde(default)]
    pub runtime: bool,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// `N`, `I`, `dt` or `alpha`.
    pub axis: String,
    pub values: Vec<f64>,
    /// Space tags, or for the wave problem also `fsbp`/`fd2`/`fd4`/`fd6`.
    /// Empty means the configured scheme only.
    #[serde(default)]
    pub schemes: Vec<String>,
    /// Subset of `1`, `2`, `inf`, `P`.
    pub norms: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    /// Seed of the randomized operator self-checks.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub space: SpaceSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub physics: PhysicsSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub reference: ReferenceSection,
    #[serde(default)]
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
}

fn parse<T: FromStr<Err = FsbpError>>(v: &Option<String>) -> Result<Option<T>> {
    v.as_deref().map(str::parse).transpose()
}

impl FromStr for RunConfig {
    type Err = FsbpError;

    fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| FsbpError::Parse(e.to_string()))
    }
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| FsbpError::Parse(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment.parse()
    }

    /// Defaults of the experiment overlaid with every key that is set.
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let experiment = self.experiment()?;
        let mut cfg = ExperimentConfig::defaults(experiment);
        if let Some(space) = parse::<SpaceKind>(&self.space.kind)? {
            cfg.space = space;
        }
        cfg.grid = parse::<GridSpec>(&self.grid.nodes)?.or(cfg.grid);
        let m = &self.mesh;
        if let Some([l, r]) = m.domain {
            cfg.domain = (l, r);
        }
        cfg.blocks = m.blocks.unwrap_or(cfg.blocks);
        let dims = if experiment == Experiment::AdvDiff2d { 2 } else { 1 };
        if let Some(d) = m.dimensions {
            if d != dims {
                return Err(FsbpError::Config(format!("{} is {dims}-dimensional, config says {d}", experiment.name())));
            }
        }
        let p = &self.physics;
        if let Some(a) = p.a {
            cfg.a = a.split(experiment);
        }
        if let Some(eps) = p.eps {
            cfg.eps = eps.split(experiment);
        }
        cfg.c = p.c.unwrap_or(cfg.c);
        cfg.sigma1_r = p.sigma1_r.unwrap_or(cfg.sigma1_r);
        cfg.sigma2_r = p.sigma2_r.or(cfg.sigma2_r);
        cfg.wave_data = parse::<WaveData>(&p.wave_data)?.unwrap_or(cfg.wave_data);
        cfg.wave_operator = parse::<WaveOperator>(&p.wave_operator)?.unwrap_or(cfg.wave_operator);
        let t = &self.time;
        cfg.time.t_end = t.t_end.unwrap_or(cfg.time.t_end);
        cfg.time.dt = t.dt.or(cfg.time.dt);
        cfg.time.cfl = t.cfl.unwrap_or(cfg.time.cfl);
        cfg.time.samples = t.samples.unwrap_or(cfg.time.samples);
        let r = &self.reference;
        cfg.reference_blocks = r.blocks.unwrap_or(cfg.reference_blocks);
        cfg.reference_space = parse::<SpaceKind>(&r.space)?.unwrap_or(cfg.reference_space);
        cfg.reference_grid = parse::<GridSpec>(&r.grid)?.unwrap_or(cfg.reference_grid);
        cfg.cache_dir = r.cache_dir.clone().or(cfg.cache_dir);
        validate(&cfg)?;
        Ok(cfg)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn prefix(&self) -> String {
        self.output.prefix.clone().unwrap_or_else(|| self.experiment.trim().to_string())
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    let bad = |msg: String| Err(FsbpError::Config(msg));
    if cfg.blocks == 0 {
        return bad("mesh.blocks must be at least 1".into());
    }
    if !(cfg.domain.1 > cfg.domain.0) {
        return bad(format!("mesh.domain [{}, {}] is empty", cfg.domain.0, cfg.domain.1));
    }
    if cfg.eps.0 < 0.0 || cfg.eps.1 < 0.0 {
        return bad("physics.eps must be nonnegative".into());
    }
    if !(cfg.time.t_end > 0.0) {
        return bad("time.t_end must be positive".into());
    }
    if cfg.time.dt.is_some_and(|dt| !(dt > 0.0)) || !(cfg.time.cfl > 0.0) {
        return bad("time.dt and time.cfl must be positive".into());
    }
    Ok(())
}
