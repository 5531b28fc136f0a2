//! Skew-symmetric split-form discretization of `u_t + (u²/2)_x = ε u_xx`
//! on a periodic block mesh.

use super::advdiff::{gemv, AdvDiff1d, Boundary};
use super::mesh::BlockMesh;
use super::sat::SatCoefficients;
use crate::error::{FsbpError, Result};

/// Two-point flux `(a² + ab + b²)/6`, which makes the split form conserve
/// `∫u²/2` across block interfaces.
pub fn entropy_conservative_flux(a: f64, b: f64) -> f64 {
    (a * a + a * b + b * b) / 6.0
}

#[derive(Clone, Debug)]
pub struct Burgers {
    viscous: AdvDiff1d,
    eps: f64,
    p_inv: Vec<f64>,
}

impl Burgers {
    /// Viscous coupling uses the advection–diffusion SATs with `a = 0`.
    pub fn new(mesh: BlockMesh, eps: f64) -> Result<Self> {
        let sats = SatCoefficients::standard(0.0, eps)?;
        let p_inv = mesh.op().p_inv().iter().copied().collect();
        let viscous = AdvDiff1d::new(mesh, sats, Boundary::Periodic)?;
        Ok(Self { viscous, eps, p_inv })
    }

    pub fn mesh(&self) -> &BlockMesh {
        self.viscous.mesh()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        self.viscous.apply(u, out);
        let mesh = self.viscous.mesh();
        let (n, blocks) = (mesh.n(), mesh.block_count());
        let d1 = mesh.d1();
        let mut sq = vec![0.0; n];
        let mut du = vec![0.0; n];
        for (i, (ub, ob)) in u.chunks(n).zip(out.chunks_mut(n)).enumerate() {
            for k in 0..n {
                sq[k] = ub[k] * ub[k];
            }
            gemv(&mut du, 1.0, d1, ub, 0.0);
            gemv(ob, -1.0 / 3.0, d1, &sq, 1.0);
            for k in 0..n {
                ob[k] -= ub[k] * du[k] / 3.0;
            }
            let prev = if i == 0 { blocks - 1 } else { i - 1 };
            let next = if i + 1 == blocks { 0 } else { i + 1 };
            let (first, last) = (ub[0], ub[n - 1]);
            let f_left = entropy_conservative_flux(u[prev * n + n - 1], first);
            let f_right = entropy_conservative_flux(last, u[next * n]);
            ob[0] += self.p_inv[0] * (f_left - 0.5 * first * first);
            ob[n - 1] -= self.p_inv[n - 1] * (f_right - 0.5 * last * last);
        }
    }
}

/// Checked one-shot form of [`Burgers::apply`].
pub fn burgers_rhs(mesh: &BlockMesh, state: &[f64], eps: f64) -> Result<Vec<f64>> {
    mesh.check_len(state.len())?;
    if let Some(k) = state.iter().position(|v| !v.is_finite()) {
        return Err(FsbpError::NonFiniteState { index: k });
    }
    let op = Burgers::new(mesh.clone(), eps)?;
    let mut out = vec![0.0; state.len()];
    op.apply(state, &mut out);
    Ok(out)
}
