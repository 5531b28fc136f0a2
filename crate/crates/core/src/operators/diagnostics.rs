use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};

use super::FsbpOperatorSet;
use crate::error::{FsbpError, Result};
use crate::funcspace::{nodal_derivatives, FunctionSpace};
use crate::linalg;

/// Principal-angle bound under which two subspaces count as equal.
const ANGLE_TOL: f64 = 1e-6;

/// `‖Q + Qᵀ − B‖_max`.
pub fn sbp_identity_residual(set: &FsbpOperatorSet) -> f64 {
    (&set.q + set.q.transpose() - &set.b).amax()
}

/// Size of the terms in `D f − f^(k)`: `max(1, ‖f^(k)‖_∞ + ‖D‖_∞ ‖f‖_∞)`.
/// Rounding in `D f` grows with `‖D‖`, which is large on fine grids.
pub(crate) fn residual_scale(d: &DMatrix<f64>, f: &[f64], fk: &[f64]) -> f64 {
    let norm = d.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let amax = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (amax(fk) + norm * amax(f)).max(1.0)
}

/// Per basis element of `space`: `‖D_k f − f^(k)‖_∞` and the same divided
/// by [`residual_scale`].
pub fn exactness_residuals(set: &FsbpOperatorSet, space: &FunctionSpace, order: usize) -> Result<Vec<(f64, f64)>> {
    let d = match order {
        1 => &set.d1,
        2 => set.d2.as_ref().ok_or(FsbpError::MissingSecondDerivative)?,
        _ => return Err(FsbpError::Config(format!("exactness order must be 1 or 2, got {order}"))),
    };
    if !space.element().approx_eq(&set.element) {
        return Err(FsbpError::ElementMismatch);
    }
    let f = nodal_derivatives(space, &set.nodes, 0);
    let fk = nodal_derivatives(space, &set.nodes, order);
    let defect = d * &f - &fk;
    Ok((0..space.dim())
        .map(|k| {
            let abs = defect.column(k).amax();
            (abs, abs / residual_scale(d, f.column(k).as_slice(), fk.column(k).as_slice()))
        })
        .collect())
}

/// `max_f ‖D_k f − f^(k)‖_∞` over the basis of `space`.
pub fn verify_exactness(set: &FsbpOperatorSet, space: &FunctionSpace, order: usize) -> Result<f64> {
    Ok(exactness_residuals(set, space, order)?.iter().map(|r| r.0).fold(0.0, f64::max))
}

#[derive(Clone, Debug)]
pub struct NullspaceReport {
    pub operator: String,
    /// Orthonormal columns spanning the numerical nullspace.
    pub basis: DMatrix<f64>,
    /// Orthonormal nodal basis of the continuous nullspace.
    pub expected: DMatrix<f64>,
    pub max_angle: f64,
    pub consistent: bool,
    /// Orthonormal directions in the numerical nullspace orthogonal to the
    /// expected one.
    pub extra: DMatrix<f64>,
}

impl NullspaceReport {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The first extra direction, shifted along `𝟏` to vanish at the first
    /// node and scaled to end in 1. `None` without extra directions or when
    /// the nullspace lacks the constants.
    pub fn normalized_extra(&self) -> Option<Vec<f64>> {
        let n = self.basis.nrows();
        if self.extra.ncols() == 0 || n == 0 {
            return None;
        }
        let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        let residual = &ones - &self.basis * (self.basis.transpose() * &ones);
        if residual.amax() > 1e-6 {
            return None;
        }
        let w = self.extra.column(0);
        let shifted: Vec<f64> = w.iter().map(|&x| x - w[0]).collect();
        let last = shifted[n - 1];
        if last.abs() < 1e-12 {
            return None;
        }
        Some(shifted.iter().map(|x| x / last).collect())
    }
}

/// Numerical nullspace of `matrix` (singular values `≤ tol · σ_max`),
/// compared against the span of the columns of `expected`.
pub fn nullspace(operator: &str, matrix: &DMatrix<f64>, tol: f64, expected: &DMatrix<f64>) -> NullspaceReport {
    let basis = linalg::null_space(matrix, tol);
    let expected = linalg::orthonormal_columns(expected, 1e-10);
    let in_basis = if expected.ncols() == 0 {
        0.0
    } else {
        let proj = &expected - &basis * (basis.transpose() * &expected);
        proj.amax()
    };
    let consistent = basis.ncols() == expected.ncols() && linalg::max_principal_angle(&basis, &expected) <= ANGLE_TOL;
    let max_angle = if basis.ncols() == expected.ncols() {
        linalg::max_principal_angle(&basis, &expected)
    } else {
        in_basis.min(1.0).asin().max(if consistent { 0.0 } else { std::f64::consts::FRAC_PI_2 })
    };
    let remainder = &basis - &expected * (expected.transpose() * &basis);
    let extra = if remainder.amax() > 1e-6 {
        linalg::orthonormal_columns(&remainder, 1e-6)
    } else {
        DMatrix::zeros(basis.nrows(), 0)
    };
    NullspaceReport { operator: operator.to_string(), basis, expected, max_angle, consistent, extra }
}

/// Nodal values on `nodes` of the functions `f ∈ F` with `f^(order) ≡ 0`.
pub fn continuous_nullspace(space: &FunctionSpace, nodes: &[f64], order: usize) -> DMatrix<f64> {
    let grid = space.element().linspace((8 * space.dim()).max(64));
    let mut samples = nodal_derivatives(space, &grid, order);
    let mut scales = vec![1.0; space.dim()];
    for (k, mut col) in samples.column_iter_mut().enumerate() {
        let s = col.amax();
        if s > 0.0 {
            col /= s;
            scales[k] = s;
        }
    }
    let coeffs = linalg::null_space(&samples, 1e-10);
    let v = nodal_derivatives(space, nodes, 0);
    let mut unscaled = coeffs.clone();
    for (k, mut row) in unscaled.row_iter_mut().enumerate() {
        row /= scales[k];
    }
    v * unscaled
}

/// Nullspace reports of `D1` and `D2` against the continuous nullspaces of
/// `∂x` and `∂xx` restricted to `space`.
pub fn operator_nullspaces(
    set: &FsbpOperatorSet,
    space: &FunctionSpace,
    tol: f64,
) -> Result<(NullspaceReport, NullspaceReport)> {
    let d2 = set.d2.as_ref().ok_or(FsbpError::MissingSecondDerivative)?;
    let e1 = continuous_nullspace(space, &set.nodes, 1);
    let e2 = continuous_nullspace(space, &set.nodes, 2);
    Ok((nullspace("D1", &set.d1, tol, &e1), nullspace("D2", d2, tol, &e2)))
}

/// Short description of a nodal subspace: `{1}`, `{1,x}` or its dimension.
pub fn describe_span(basis: &DMatrix<f64>, nodes: &[f64]) -> String {
    let n = nodes.len();
    let ones = DMatrix::from_element(n, 1, 1.0);
    let mut linear = DMatrix::from_element(n, 2, 1.0);
    for (i, &x) in nodes.iter().enumerate() {
        linear[(i, 1)] = x;
    }
    let matches = |m: &DMatrix<f64>| {
        let m = linalg::orthonormal_columns(m, 1e-10);
        m.ncols() == basis.ncols() && linalg::max_principal_angle(basis, &m) <= ANGLE_TOL
    };
    if basis.ncols() == 0 {
        "{0}".to_string()
    } else if matches(&ones) {
        "{1}".to_string()
    } else if matches(&linear) {
        "{1,x}".to_string()
    } else {
        let contains_one = (&ones - basis * (basis.transpose() * &ones)).amax() <= 1e-6 * (n as f64).sqrt();
        if contains_one {
            let extra: Vec<String> = (1..basis.ncols()).map(|k| format!("v{k}")).collect();
            format!("{{1,{}}}", extra.join(","))
        } else {
            format!("dim {}", basis.ncols())
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_real: f64,
    pub max_imag: f64,
    pub spectral_radius: f64,
}

/// All eigenvalues of a square matrix through a real Schur decomposition.
pub fn spectrum(matrix: &DMatrix<f64>) -> Result<SpectrumReport> {
    if !matrix.is_square() {
        return Err(FsbpError::ShapeMismatch(format!(
            "spectrum needs a square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let n = matrix.nrows();
    let schur = matrix.clone().try_schur(f64::EPSILON, 1000 * n.max(1)).ok_or(FsbpError::EigenNonConvergence)?;
    let eigenvalues: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    let max_real = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let max_imag = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(SpectrumReport { eigenvalues, max_real, max_imag, spectral_radius })
}

/// Everything `verify` checks on one operator set.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub sbp_residual: f64,
    pub min_weight: f64,
    /// `‖D1 − P⁻¹Q‖_max / max(1, ‖D1‖_max)`.
    pub d1_definition: f64,
    /// `‖D2 − P⁻¹(BD1 − D1ᵀPD1)‖_max / max(1, ‖D2‖_max)`.
    pub d2_definition: f64,
    /// Largest mismatch of the first and last rows of `BS` and `BD1`.
    pub boundary_rows: f64,
    pub exactness_d1: Option<f64>,
    pub exactness_d2: Option<f64>,
    pub nullspaces: Option<(NullspaceReport, NullspaceReport)>,
    pub spectrum_d2: Option<SpectrumReport>,
    pub nodes: Vec<f64>,
}

impl VerifyReport {
    /// Hard invariants only; nullspace consistency is informational.
    pub fn passes(&self) -> bool {
        self.sbp_residual <= 1e-12
            && self.min_weight > 0.0
            && self.d1_definition <= 1e-12
            && self.d2_definition <= 1e-10
            && self.boundary_rows <= 1e-12
            && self.exactness_d1.is_none_or(|r| r <= 1e-10)
            && self.exactness_d2.is_none_or(|r| r <= 1e-8)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        writeln!(f, "sbp identity |Q+Q^T-B|_max = {:.3e} [{}]", self.sbp_residual, mark(self.sbp_residual <= 1e-12))?;
        writeln!(f, "min P weight = {:.6e} [{}]", self.min_weight, mark(self.min_weight > 0.0))?;
        writeln!(f, "D1 = P^-1 Q defect = {:.3e} [{}]", self.d1_definition, mark(self.d1_definition <= 1e-12))?;
        writeln!(f, "D2 definition defect = {:.3e} [{}]", self.d2_definition, mark(self.d2_definition <= 1e-10))?;
        writeln!(f, "boundary rows BS vs BD1 = {:.3e} [{}]", self.boundary_rows, mark(self.boundary_rows <= 1e-12))?;
        match self.exactness_d1 {
            Some(r) => writeln!(f, "exactness order 1 (F+F') = {r:.3e} [{}]", mark(r <= 1e-10))?,
            None => writeln!(f, "exactness order 1: no space known")?,
        }
        match self.exactness_d2 {
            Some(r) => writeln!(f, "exactness order 2 (F) = {r:.3e} [{}]", mark(r <= 1e-8))?,
            None => writeln!(f, "exactness order 2: no space known")?,
        }
        if let Some((n1, n2)) = &self.nullspaces {
            let verdict = if n1.consistent && n2.consistent { "consistent" } else { "inconsistent" };
            writeln!(
                f,
                "nullspace(D1)={}, nullspace(D2)={}: {verdict}",
                describe_span(&n1.basis, &self.nodes),
                describe_span(&n2.basis, &self.nodes)
            )?;
            for rep in [n1, n2] {
                let state = if rep.consistent { "consistent" } else { "inconsistent" };
                write!(f, "  {}: dim {} expected {} -> {state}", rep.operator, rep.dim(), rep.expected.ncols())?;
                if let Some(v) = rep.normalized_extra() {
                    let entries: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
                    write!(f, "; extra vector [{}]", entries.join(", "))?;
                }
                writeln!(f)?;
            }
        }
        if let Some(s) = &self.spectrum_d2 {
            writeln!(
                f,
                "spectrum(D2): max Re = {:.3e}, max |Im| = {:.3e}, radius = {:.6e}",
                s.max_real, s.max_imag, s.spectral_radius
            )?;
        }
        Ok(())
    }
}

/// Runs every diagnostic on `set`. Exactness and nullspace checks need the
/// spaces; `exactness`/`target` default to those stored in the set.
pub fn verify_report(set: &FsbpOperatorSet) -> Result<VerifyReport> {
    let p_inv = DMatrix::from_diagonal(&set.p_inv());
    let d1_scale = set.d1.amax().max(1.0);
    let d1_definition = (&set.d1 - &p_inv * &set.q).amax() / d1_scale;
    let d2_definition = match &set.d2 {
        Some(d2) => {
            let rebuilt = &p_inv * (&set.b * &set.s - set.d1.transpose() * set.p_matrix() * &set.d1);
            (d2 - rebuilt).amax() / d2.amax().max(1.0)
        }
        None => 0.0,
    };
    let n = set.n();
    let bs = &set.b * &set.s;
    let bd = &set.b * &set.d1;
    let boundary_rows = (bs.row(0) - bd.row(0)).amax().max((bs.row(n - 1) - bd.row(n - 1)).amax()) / d1_scale;
    let relative = |space: &FunctionSpace, order| -> Result<f64> {
        Ok(exactness_residuals(set, space, order)?.iter().map(|r| r.1).fold(0.0, f64::max))
    };
    let exactness_d1 = set.exactness_space.as_ref().map(|g| relative(g, 1)).transpose()?;
    let exactness_d2 = match (&set.target_space, &set.d2) {
        (Some(space), Some(_)) => Some(relative(space, 2)?),
        _ => None,
    };
    let nullspaces = match (&set.target_space, &set.d2) {
        (Some(space), Some(_)) => Some(operator_nullspaces(set, space, 1e-8)?),
        _ => None,
    };
    let spectrum_d2 = set.d2.as_ref().map(spectrum).transpose()?;
    Ok(VerifyReport {
        sbp_residual: sbp_identity_residual(set),
        min_weight: set.p.min(),
        d1_definition,
        d2_definition,
        boundary_rows,
        exactness_d1,
        exactness_d2,
        nullspaces,
        spectrum_d2,
        nodes: set.nodes.clone(),
    })
}
