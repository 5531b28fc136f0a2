//! Multi-block SAT semi-discretizations, time integration and the
//! numerical experiments built on them.

mod advdiff;
mod burgers;
mod experiment;
mod mesh;
pub mod reference;
mod report;
mod sat;
mod time;
mod wave;

pub use advdiff::{advdiff_rhs_1d, advdiff_rhs_2d, AdvDiff1d, AdvDiff2d, Boundary};
pub use burgers::{burgers_rhs, entropy_conservative_flux, Burgers};
pub use experiment::{
    advdiff_modes, burgers_initial, burgers_reference, default_grid, reference_2d, run_experiment, wave_operator,
    Experiment, ExperimentConfig, TimeControls, WaveOperator,
};
pub use mesh::BlockMesh;
pub use reference::{BlockInterpolant, WaveData};
pub use report::{ErrorNorms, ExperimentReport};
pub use sat::SatCoefficients;
pub use time::{integrate, ssprk33_step, SolveConfig, Ssprk33};
pub use wave::{wave_rhs, Wave};

/// Caps the global worker pool at `FSBP_THREADS` when that variable is set.
/// Has no effect once the pool exists.
pub fn configure_threads() {
    if let Some(n) = std::env::var("FSBP_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}
