//! Multi-block SAT discretization of `u_t + a u_x = ε u_xx` in one and two
//! dimensions.

use nalgebra::{DMatrix, DVectorView, DVectorViewMut};
use rayon::prelude::*;

use super::mesh::BlockMesh;
use super::sat::SatCoefficients;
use crate::error::{FsbpError, Result};

/// `y ← α M x + β y` on slices.
pub(crate) fn gemv(y: &mut [f64], alpha: f64, m: &DMatrix<f64>, x: &[f64], beta: f64) {
    let mut yv = DVectorViewMut::from_slice(y, m.nrows());
    let xv = DVectorView::from_slice(x, m.ncols());
    yv.gemv(alpha, m, &xv, beta);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    /// Block `I` couples to block 1.
    Periodic,
    /// Weakly imposed `u(left) = g_L`, `u(right) = g_R`.
    Dirichlet { left: f64, right: f64 },
}

/// Right-hand side `−a D1 u + ε D2 u + P⁻¹ 𝕊` on every block of a mesh.
#[derive(Clone, Debug)]
pub struct AdvDiff1d {
    mesh: BlockMesh,
    sats: SatCoefficients,
    boundary: Boundary,
    volume: DMatrix<f64>,
    p_inv: Vec<f64>,
    d1_first: Vec<f64>,
    d1_last: Vec<f64>,
}

impl AdvDiff1d {
    pub fn new(mesh: BlockMesh, sats: SatCoefficients, boundary: Boundary) -> Result<Self> {
        sats.validate()?;
        let d1 = mesh.d1();
        let n = mesh.n();
        let volume = d1 * (-sats.a) + mesh.d2() * sats.eps;
        let p_inv = mesh.op().p_inv().iter().copied().collect();
        let d1_first = d1.row(0).iter().copied().collect();
        let d1_last = d1.row(n - 1).iter().copied().collect();
        Ok(Self { mesh, sats, boundary, volume, p_inv, d1_first, d1_last })
    }

    pub fn mesh(&self) -> &BlockMesh {
        &self.mesh
    }

    pub fn sats(&self) -> &SatCoefficients {
        &self.sats
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    /// Writes the right-hand side of `u` into `out`. Both slices hold
    /// `I·N` values, block after block.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.mesh.n();
        let blocks = self.mesh.block_count();
        debug_assert_eq!(u.len(), n * blocks);
        let traces: Vec<(f64, f64)> =
            u.chunks(n).map(|b| (dot(&self.d1_first, b), dot(&self.d1_last, b))).collect();
        let s = &self.sats;
        for (i, (ub, ob)) in u.chunks(n).zip(out.chunks_mut(n)).enumerate() {
            gemv(ob, 1.0, &self.volume, ub, 0.0);
            let (dl, dr) = traces[i];
            let prev = if i == 0 { blocks - 1 } else { i - 1 };
            let next = if i + 1 == blocks { 0 } else { i + 1 };

            match (self.boundary, i == 0) {
                (Boundary::Dirichlet { left, .. }, true) => {
                    let jump = ub[0] - left;
                    ob[0] -= self.p_inv[0] * s.a.max(0.0) * jump;
                    self.add_adjoint(ob, &self.d1_first, s.eps * jump);
                }
                _ => {
                    let up = &u[prev * n..(prev + 1) * n];
                    let jump = ub[0] - up[n - 1];
                    let djump = dl - traces[prev].1;
                    ob[0] += self.p_inv[0] * (s.sigma1_l * jump + s.sigma2_l * djump);
                    self.add_adjoint(ob, &self.d1_first, s.sigma3_l * jump);
                }
            }
            match (self.boundary, i + 1 == blocks) {
                (Boundary::Dirichlet { right, .. }, true) => {
                    let jump = ub[n - 1] - right;
                    ob[n - 1] += self.p_inv[n - 1] * s.a.min(0.0) * jump;
                    self.add_adjoint(ob, &self.d1_last, -s.eps * jump);
                }
                _ => {
                    let un = &u[next * n..(next + 1) * n];
                    let jump = ub[n - 1] - un[0];
                    let djump = dr - traces[next].0;
                    ob[n - 1] += self.p_inv[n - 1] * (s.sigma1_r * jump + s.sigma2_r * djump);
                    self.add_adjoint(ob, &self.d1_last, s.sigma3_r * jump);
                }
            }
        }
    }

    /// `out += P⁻¹ (D1ᵀ e) · weight` where `row` is the matching row of `D1`.
    fn add_adjoint(&self, out: &mut [f64], row: &[f64], weight: f64) {
        for k in 0..out.len() {
            out[k] += self.p_inv[k] * row[k] * weight;
        }
    }
}

/// Checked one-shot form of [`AdvDiff1d::apply`].
pub fn advdiff_rhs_1d(
    mesh: &BlockMesh,
    sats: SatCoefficients,
    state: &[f64],
    periodic: bool,
) -> Result<Vec<f64>> {
    mesh.check_len(state.len())?;
    let boundary = if periodic { Boundary::Periodic } else { Boundary::Dirichlet { left: 0.0, right: 0.0 } };
    let op = AdvDiff1d::new(mesh.clone(), sats, boundary)?;
    let mut out = vec![0.0; state.len()];
    op.apply(state, &mut out);
    Ok(out)
}

/// Tensor-product discretization on a rectangle. The state is stored row
/// by row: index `j·nx + i` holds the value at `(x_i, y_j)`.
#[derive(Clone, Debug)]
pub struct AdvDiff2d {
    x: AdvDiff1d,
    y: AdvDiff1d,
}

impl AdvDiff2d {
    pub fn new(x: AdvDiff1d, y: AdvDiff1d) -> Self {
        Self { x, y }
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn x(&self) -> &AdvDiff1d {
        &self.x
    }

    pub fn y(&self) -> &AdvDiff1d {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies the x-operator along every row and the y-operator along every
    /// column and sums the two.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx(), self.ny());
        debug_assert_eq!(u.len(), nx * ny);
        out.par_chunks_mut(nx).zip(u.par_chunks(nx)).for_each(|(o, row)| self.x.apply(row, o));
        let mut cols = vec![0.0; nx * ny];
        cols.par_chunks_mut(ny).enumerate().for_each_init(
            || vec![0.0; ny],
            |line, (i, col_out)| {
                for j in 0..ny {
                    line[j] = u[j * nx + i];
                }
                self.y.apply(line, col_out);
            },
        );
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            for (i, v) in row.iter_mut().enumerate() {
                *v += cols[i * ny + j];
            }
        });
    }

    /// Sum of `u_ij p_i p_j` over the grid.
    pub fn mass(&self, u: &[f64]) -> f64 {
        let (px, py) = (self.x.mesh().weights(), self.y.mesh().weights());
        u.chunks(self.nx()).zip(&py).map(|(row, wy)| wy * dot(row, &px)).sum()
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let (px, py) = (self.x.mesh().weights(), self.y.mesh().weights());
        u.chunks(self.nx())
            .zip(&py)
            .map(|(row, wy)| wy * row.iter().zip(&px).map(|(v, w)| v * v * w).sum::<f64>())
            .sum()
    }
}

/// Checked one-shot form of [`AdvDiff2d::apply`].
pub fn advdiff_rhs_2d(
    mesh_x: &BlockMesh,
    mesh_y: &BlockMesh,
    sats_x: SatCoefficients,
    sats_y: SatCoefficients,
    state: &[f64],
) -> Result<Vec<f64>> {
    let (nx, ny) = (mesh_x.len(), mesh_y.len());
    if mesh_x.block_count() != mesh_y.block_count() || mesh_x.n() != mesh_y.n() {
        return Err(FsbpError::ShapeMismatch("2D layout needs I×I blocks of N×N nodes".into()));
    }
    if state.len() != nx * ny {
        return Err(FsbpError::ShapeMismatch(format!("state has {} entries, grid has {nx}×{ny}", state.len())));
    }
    let op = AdvDiff2d::new(
        AdvDiff1d::new(mesh_x.clone(), sats_x, Boundary::Periodic)?,
        AdvDiff1d::new(mesh_y.clone(), sats_y, Boundary::Periodic)?,
    );
    let mut out = vec![0.0; state.len()];
    op.apply(state, &mut out);
    Ok(out)
}
