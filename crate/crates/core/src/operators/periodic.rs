use nalgebra::DMatrix;

use crate::error::{FsbpError, Result};
use crate::funcspace::Interval;

/// Central second-derivative stencils of orders 2, 4 and 6.
pub fn fd_stencil(order: usize) -> Result<Vec<f64>> {
    match order {
        2 => Ok(vec![1.0, -2.0, 1.0]),
        4 => Ok(vec![-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0]),
        6 => Ok(vec![1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0]),
        _ => Err(FsbpError::Config(format!("no periodic FD stencil of order {order} (use 2, 4 or 6)"))),
    }
}

/// Circulant second-derivative matrix on `n` periodic points of `element`
/// (the right endpoint is identified with the left, `Δx = |element| / n`).
pub fn periodic_fd_operator(stencil: &[f64], n: usize, element: Interval) -> Result<DMatrix<f64>> {
    if stencil.len() % 2 == 0 {
        return Err(FsbpError::Config("periodic stencil must have odd length".into()));
    }
    if n <= stencil.len() {
        return Err(FsbpError::Config(format!(
            "periodic grid of {n} points too small for a {}-point stencil",
            stencil.len()
        )));
    }
    let dx = element.width() / n as f64;
    let half = stencil.len() / 2;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for (k, &c) in stencil.iter().enumerate() {
            let j = (i + n + k - half) % n;
            m[(i, j)] += c / (dx * dx);
        }
    }
    Ok(m)
}
