//! Reference solutions: closed forms and piecewise interpolants of fine
//! block-mesh solutions.

use std::f64::consts::PI;

use super::mesh::BlockMesh;
use crate::error::{FsbpError, Result};
use crate::funcspace::Interval;

/// Barycentric weights of the nodes `x`.
fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| 1.0 / (0..x.len()).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
        .collect()
}

/// Lagrange basis values of the nodes `x` at `t`.
fn lagrange_row(x: &[f64], w: &[f64], t: f64, out: &mut [f64]) {
    if let Some(j) = x.iter().position(|&xj| xj == t) {
        out.fill(0.0);
        out[j] = 1.0;
        return;
    }
    let mut sum = 0.0;
    for j in 0..x.len() {
        out[j] = w[j] / (t - x[j]);
        sum += out[j];
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
}

/// Blockwise Lagrange interpolation on the nodes of a [`BlockMesh`].
#[derive(Clone, Debug)]
pub struct BlockInterpolant {
    domain: Interval,
    blocks: usize,
    /// Nodes of one block on the reference element.
    local: Vec<f64>,
    element: Interval,
    weights: Vec<f64>,
}

impl BlockInterpolant {
    pub fn new(mesh: &BlockMesh) -> Self {
        let op = mesh.op();
        let element = Interval::reference();
        let local: Vec<f64> = op.nodes.iter().map(|&x| op.element.map_point(&element, x)).collect();
        let weights = barycentric_weights(&local);
        Self { domain: mesh.domain(), blocks: mesh.block_count(), local, element, weights }
    }

    pub fn n(&self) -> usize {
        self.local.len()
    }

    /// Block index and Lagrange weights for the point `x` (wrapped
    /// periodically into the domain).
    fn locate(&self, x: f64, row: &mut [f64]) -> usize {
        let w = self.domain.width();
        let mut s = (x - self.domain.left) / w;
        s -= s.floor();
        let h = 1.0 / self.blocks as f64;
        let block = ((s / h) as usize).min(self.blocks - 1);
        let xi = self.element.left + self.element.width() * (s / h - block as f64);
        lagrange_row(&self.local, &self.weights, xi.clamp(-1.0, 1.0), row);
        block
    }

    pub fn eval(&self, values: &[f64], x: f64) -> f64 {
        let n = self.n();
        let mut row = vec![0.0; n];
        let b = self.locate(x, &mut row);
        (0..n).map(|k| row[k] * values[b * n + k]).sum()
    }

    pub fn eval_many(&self, values: &[f64], xs: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.blocks * self.n() {
            return Err(FsbpError::ShapeMismatch("interpolated values do not match the mesh".into()));
        }
        Ok(xs.iter().map(|&x| self.eval(values, x)).collect())
    }

    /// Tensor interpolation of a row-major grid (`values[j·nx + i]` at
    /// `(x_i, y_j)`, both axes on this block layout) at the points
    /// `xs × ys`, returned row-major as well.
    pub fn eval_tensor(&self, values: &[f64], xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let nx = self.blocks * n;
        if values.len() != nx * nx {
            return Err(FsbpError::ShapeMismatch("interpolated grid does not match the mesh".into()));
        }
        let locate_all = |pts: &[f64]| -> Vec<(usize, Vec<f64>)> {
            pts.iter()
                .map(|&p| {
                    let mut row = vec![0.0; n];
                    let b = self.locate(p, &mut row);
                    (b, row)
                })
                .collect()
        };
        let (lx, ly) = (locate_all(xs), locate_all(ys));
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for (by, wy) in &ly {
            for (bx, wx) in &lx {
                let mut acc = 0.0;
                for (q, wyq) in wy.iter().enumerate() {
                    let row = &values[(by * n + q) * nx + bx * n..];
                    acc += wyq * (0..n).map(|k| wx[k] * row[k]).sum::<f64>();
                }
                out.push(acc);
            }
        }
        Ok(out)
    }
}

/// A Fourier mode `amp · {sin, cos}(kπ(x − at)) · e^{−ε(kπ)²t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub amp: f64,
    pub k: f64,
    pub sine: bool,
}

/// Exact periodic solution of `u_t + a u_x = ε u_xx` for data given as a
/// sum of modes.
pub fn advdiff_modes(modes: &[Mode], a: f64, eps: f64, x: f64, t: f64) -> f64 {
    modes
        .iter()
        .map(|m| {
            let w = m.k * PI;
            let arg = w * (x - a * t);
            m.amp * (-eps * w * w * t).exp() * if m.sine { arg.sin() } else { arg.cos() }
        })
        .sum()
}

/// `(e^{x/ε} − 1)/(e^{1/(2ε)} − 1)`, the steady state on `[0, 1/2]`,
/// evaluated without overflow.
pub fn boundary_layer_steady(x: f64, eps: f64) -> f64 {
    let top = (x - 0.5) / eps;
    top.exp() * (-(-x / eps).exp_m1()) / (-(-0.5 / eps).exp_m1())
}

/// Periodic heat-kernel solution for the advected Gaussian
/// `exp(−200[(x−x0)² + (y−y0)²])` on the unit square.
pub fn gaussian_2d(x: f64, y: f64, t: f64, a: (f64, f64), eps: (f64, f64), center: (f64, f64)) -> f64 {
    let axis = |p: f64, a: f64, eps: f64, c: f64| {
        let spread = 1.0 + 800.0 * eps * t;
        let mut sum = 0.0;
        for m in -3i32..=3 {
            let d = p - c - a * t - m as f64;
            sum += (-200.0 * d * d / spread).exp();
        }
        sum / spread.sqrt()
    };
    axis(x, a.0, eps.0, center.0) * axis(y, a.1, eps.1, center.1)
}

/// Initial data of the wave problem: `f` travels left, `g` right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveData {
    /// `sin(πx)`
    Sine,
    /// `exp(100 sin(πx))`
    SharpExp,
    /// `x²` extended periodically from `[−1, 1]`
    Parabola,
}

impl std::str::FromStr for WaveData {
    type Err = FsbpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f1" | "sine" => Ok(WaveData::Sine),
            "f2" | "sharp-exp" => Ok(WaveData::SharpExp),
            "f3" | "parabola" => Ok(WaveData::Parabola),
            other => Err(FsbpError::Parse(format!("unknown wave data `{other}` (f1, f2 or f3)"))),
        }
    }
}

impl std::fmt::Display for WaveData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WaveData::Sine => "f1",
            WaveData::SharpExp => "f2",
            WaveData::Parabola => "f3",
        })
    }
}

fn wrap(x: f64) -> f64 {
    (x + 1.0).rem_euclid(2.0) - 1.0
}

impl WaveData {
    pub fn f(&self, x: f64) -> f64 {
        match self {
            WaveData::Sine => (PI * x).sin(),
            WaveData::SharpExp => (100.0 * (PI * x).sin()).exp(),
            WaveData::Parabola => wrap(x).powi(2),
        }
    }

    pub fn df(&self, x: f64) -> f64 {
        match self {
            WaveData::Sine => PI * (PI * x).cos(),
            WaveData::SharpExp => 100.0 * PI * (PI * x).cos() * (100.0 * (PI * x).sin()).exp(),
            WaveData::Parabola => 2.0 * wrap(x),
        }
    }
}

/// `g(x) = cos²(2πx)`
fn wave_g(x: f64) -> f64 {
    (2.0 * PI * x).cos().powi(2)
}

fn wave_dg(x: f64) -> f64 {
    -2.0 * PI * (4.0 * PI * x).sin()
}

/// `u(x, t) = f(x + ct) + g(x − ct)`
pub fn wave_exact(data: WaveData, c: f64, x: f64, t: f64) -> f64 {
    data.f(x + c * t) + wave_g(x - c * t)
}

/// `u_t(x, t) = c f'(x + ct) − c g'(x − ct)`
pub fn wave_exact_velocity(data: WaveData, c: f64, x: f64, t: f64) -> f64 {
    c * data.df(x + c * t) - c * wave_dg(x - c * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::SpaceKind;
    use crate::operators::construct;

    #[test]
    fn interpolation_reproduces_block_polynomials() {
        let op = construct(&SpaceKind::Polynomial(2), "lobatto:3".parse().unwrap()).unwrap();
        let mesh = BlockMesh::uniform(&op, Interval::new(0.0, 1.0).unwrap(), 5).unwrap();
        let f = |x: f64| 3.0 * x * x - x + 0.5;
        let values = mesh.sample(f);
        let interp = BlockInterpolant::new(&mesh);
        for x in [0.0, 0.013, 0.2, 0.37, 0.99] {
            assert!((interp.eval(&values, x) - f(x)).abs() < 1e-13);
        }
        // wrapped periodically
        assert!((interp.eval(&values, 1.37) - f(0.37)).abs() < 1e-12);
        let grid: Vec<f64> = mesh.nodes().iter().flat_map(|&y| mesh.nodes().iter().map(move |&x| f(x) * y)).collect();
        let out = interp.eval_tensor(&grid, &[0.3, 0.7], &[0.1, 0.5]).unwrap();
        for (k, (x, y)) in [(0.3, 0.1), (0.7, 0.1), (0.3, 0.5), (0.7, 0.5)].iter().enumerate() {
            assert!((out[k] - f(*x) * y).abs() < 1e-13);
        }
    }

    #[test]
    fn steady_state_meets_boundary_values() {
        for eps in [1e-1, 1e-2, 1e-3] {
            assert!(boundary_layer_steady(0.0, eps).abs() < 1e-15);
            assert!((boundary_layer_steady(0.5, eps) - 1.0).abs() < 1e-15);
        }
        let eps: f64 = 0.1;
        let naive = ((0.3 / eps).exp() - 1.0) / ((0.5 / eps).exp() - 1.0);
        assert!((boundary_layer_steady(0.3, eps) - naive).abs() < 1e-14);
    }

    #[test]
    fn heat_kernel_starts_at_the_gaussian() {
        let u = gaussian_2d(0.3, 0.2, 0.0, (1.0, 1.0), (1e-4, 1e-4), (0.25, 0.25));
        let want = (-200.0 * (0.05f64.powi(2) + 0.05f64.powi(2))).exp();
        assert!((u - want).abs() < 1e-15);
    }

    #[test]
    fn wave_data_is_periodic_and_consistent() {
        for d in [WaveData::Sine, WaveData::SharpExp, WaveData::Parabola] {
            assert!((d.f(-1.0) - d.f(1.0)).abs() <= 1e-12 * d.f(0.5).abs().max(1.0));
            let h = 1e-6;
            let x = 0.3;
            let fd = (d.f(x + h) - d.f(x - h)) / (2.0 * h);
            assert!((fd - d.df(x)).abs() < 1e-5 * d.df(x).abs().max(1.0));
        }
        assert_eq!(WaveData::Parabola.f(1.5), 0.25);
        assert_eq!("f2".parse::<WaveData>().unwrap(), WaveData::SharpExp);
    }
}
