//! `u_tt = c² u_xx` as the first-order system `[u; v]' = [v; c² D2 u]`.

use nalgebra::DMatrix;

use super::advdiff::gemv;
use crate::error::{FsbpError, Result};

#[derive(Clone, Debug)]
pub struct Wave {
    d2: DMatrix<f64>,
    c: f64,
}

impl Wave {
    pub fn new(d2: DMatrix<f64>, c: f64) -> Result<Self> {
        if !d2.is_square() {
            return Err(FsbpError::ShapeMismatch(format!("D2 is {}×{}", d2.nrows(), d2.ncols())));
        }
        Ok(Self { d2, c })
    }

    /// Points per field; the state holds `u` followed by `v`.
    pub fn n(&self) -> usize {
        self.d2.nrows()
    }

    pub fn apply(&self, state: &[f64], out: &mut [f64]) {
        let n = self.n();
        let (u, v) = state.split_at(n);
        let (du, dv) = out.split_at_mut(n);
        du.copy_from_slice(v);
        gemv(dv, self.c * self.c, &self.d2, u, 0.0);
    }
}

/// Checked one-shot form of [`Wave::apply`].
pub fn wave_rhs(d2: &DMatrix<f64>, u: &[f64], v: &[f64], c: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if u.len() != d2.nrows() || v.len() != d2.nrows() {
        return Err(FsbpError::ShapeMismatch(format!(
            "u has {}, v has {} entries, D2 is {}×{}",
            u.len(),
            v.len(),
            d2.nrows(),
            d2.ncols()
        )));
    }
    let wave = Wave::new(d2.clone(), c)?;
    let state: Vec<f64> = u.iter().chain(v).copied().collect();
    let mut out = vec![0.0; state.len()];
    wave.apply(&state, &mut out);
    let dv = out.split_off(u.len());
    Ok((out, dv))
}
