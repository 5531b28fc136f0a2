//! Three-stage, third-order SSP Runge–Kutta integration and the step-size rule.

use crate::error::{FsbpError, Result};

/// Time controls for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub t_end: f64,
    /// Fixed step; when absent the step follows the CFL rule below.
    pub dt: Option<f64>,
    pub cfl: f64,
    /// Largest characteristic speed (summed over directions in 2D).
    pub lambda_max: f64,
    /// Diffusivity (summed over directions in 2D).
    pub eps: f64,
    /// Smallest node spacing.
    pub dx: f64,
    /// Number of diagnostic samples after the initial one.
    pub samples: usize,
}

impl SolveConfig {
    /// `Δt = c_cfl / (λ_max/Δx + ε/Δx²)` unless a fixed step is set.
    pub fn nominal_dt(&self) -> Result<f64> {
        let dt = match self.dt {
            Some(dt) => dt,
            None => self.cfl / (self.lambda_max / self.dx + self.eps / (self.dx * self.dx)),
        };
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FsbpError::Config(format!("time step must be positive and finite, got {dt}")));
        }
        Ok(dt)
    }

    /// Step count and the step shortened so the run ends exactly at `t_end`.
    pub fn schedule(&self) -> Result<(usize, f64)> {
        if !(self.t_end > 0.0) {
            return Err(FsbpError::Config(format!("end time must be positive, got {}", self.t_end)));
        }
        let dt = self.nominal_dt()?;
        let steps = (self.t_end / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok((steps, self.t_end / steps as f64))
    }
}

fn check_finite(u: &[f64], step: usize, time: f64) -> Result<()> {
    if u.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(FsbpError::Divergence { step, time })
    }
}

/// Reusable stage buffers for [`ssprk33_step`].
#[derive(Debug, Default)]
pub struct Ssprk33 {
    k: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    pub steps_taken: usize,
}

impl Ssprk33 {
    pub fn new(len: usize) -> Self {
        Self { k: vec![0.0; len], u1: vec![0.0; len], u2: vec![0.0; len], steps_taken: 0 }
    }

    /// Advances `u` from `t` to `t + dt` in place.
    pub fn step<F>(&mut self, rhs: &mut F, u: &mut [f64], t: f64, dt: f64) -> Result<()>
    where
        F: FnMut(&[f64], f64, &mut [f64]),
    {
        if !(dt > 0.0) {
            return Err(FsbpError::Config(format!("time step must be positive, got {dt}")));
        }
        let n = u.len();
        for buf in [&mut self.k, &mut self.u1, &mut self.u2] {
            buf.resize(n, 0.0);
        }
        rhs(u, t, &mut self.k);
        for i in 0..n {
            self.u1[i] = u[i] + dt * self.k[i];
        }
        rhs(&self.u1, t + dt, &mut self.k);
        for i in 0..n {
            self.u2[i] = 0.75 * u[i] + 0.25 * (self.u1[i] + dt * self.k[i]);
        }
        rhs(&self.u2, t + 0.5 * dt, &mut self.k);
        for i in 0..n {
            u[i] = u[i] / 3.0 + 2.0 / 3.0 * (self.u2[i] + dt * self.k[i]);
        }
        self.steps_taken += 1;
        check_finite(u, self.steps_taken, t)
    }
}

/// One SSPRK(3,3) step in Shu–Osher form.
pub fn ssprk33_step<F>(mut rhs: F, u: &[f64], t: f64, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], f64, &mut [f64]),
{
    check_finite(u, 0, t)?;
    let mut out = u.to_vec();
    Ssprk33::new(u.len()).step(&mut rhs, &mut out, t, dt)?;
    Ok(out)
}

/// Integrates from `t = 0` to `config.t_end`, calling `observe(t, u)` at
/// the start and at `config.samples` roughly uniform times including the end.
pub fn integrate<F, O>(rhs: &mut F, u: &mut [f64], config: &SolveConfig, mut observe: O) -> Result<()>
where
    F: FnMut(&[f64], f64, &mut [f64]),
    O: FnMut(f64, &[f64]),
{
    let (steps, dt) = config.schedule()?;
    let samples = config.samples.max(1).min(steps);
    let mut stepper = Ssprk33::new(u.len());
    observe(0.0, u);
    let mut next_sample = 1;
    for k in 0..steps {
        let t = k as f64 * dt;
        stepper.step(rhs, u, t, dt).map_err(|e| match e {
            FsbpError::Divergence { .. } => FsbpError::Divergence { step: k + 1, time: t },
            other => other,
        })?;
        // sample j is taken after step ceil(j·steps/samples)
        if (k + 1) * samples >= next_sample * steps {
            let time = if k + 1 == steps { config.t_end } else { (k + 1) as f64 * dt };
            observe(time, u);
            next_sample += 1;
        }
    }
    Ok(())
}
