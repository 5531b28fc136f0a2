use nalgebra::{DMatrix, DVector};

use super::{boundary_matrix, FsbpOperatorSet};
use crate::error::{FsbpError, Result};
use crate::funcspace::{nodal_derivatives, quadrature_target, vandermonde, with_derivatives, FunctionSpace, SpaceKind};
use crate::linalg;
use crate::quadrature::{find_positive_rule, GridSpec, QuadratureRule, PINV_CUTOFF};

/// Residual bound on `Q_A V = P V' − ½ B V` (columns scaled to unit size).
const QA_TOL: f64 = 1e-10;
/// Bound on `D2 f − f''`, relative to the size of its terms, accepted by
/// [`build_second_derivative`].
const D2_TOL: f64 = 1e-8;
/// Largest grid for which the vectorized system `C q = y` is solved directly.
const VECTORIZED_MAX_N: usize = 16;

/// How the antisymmetric part `Q_A` is recovered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QaRoute {
    /// Minimal-norm solution of `C q = y` for the strictly lower entries.
    Vectorized,
    /// The same minimal-norm solution written in closed form through the
    /// thin SVD of `V`; cheap for large grids.
    Projected,
    Auto,
}

/// Minimal-norm antisymmetric `X` with `X V = R`.
pub fn solve_antisymmetric(v: &DMatrix<f64>, r: &DMatrix<f64>, route: QaRoute) -> DMatrix<f64> {
    let n = v.nrows();
    let route = match route {
        QaRoute::Auto if n <= VECTORIZED_MAX_N => QaRoute::Vectorized,
        QaRoute::Auto => QaRoute::Projected,
        other => other,
    };
    match route {
        QaRoute::Vectorized => solve_vectorized(v, r),
        _ => solve_projected(v, r),
    }
}

fn lower_index(n: usize) -> Vec<(usize, usize)> {
    let mut idx = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for i in j + 1..n {
            idx.push((i, j));
        }
    }
    idx
}

fn solve_vectorized(v: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, l) = v.shape();
    let idx = lower_index(n);
    // row (i, k) of C q = y is entry (i, k) of Q_A V = R
    let mut c = DMatrix::zeros(n * l, idx.len());
    for (col, &(i, j)) in idx.iter().enumerate() {
        for k in 0..l {
            c[(i * l + k, col)] += v[(j, k)];
            c[(j * l + k, col)] -= v[(i, k)];
        }
    }
    let y = DVector::from_fn(n * l, |row, _| r[(row / l, row % l)]);
    let q = linalg::min_norm_solve(&c, &y, PINV_CUTOFF);
    let mut qa = DMatrix::zeros(n, n);
    for (col, &(i, j)) in idx.iter().enumerate() {
        qa[(i, j)] = q[col];
        qa[(j, i)] = -q[col];
    }
    qa
}

fn solve_projected(v: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    let n = v.nrows();
    let svd = crate::linalg::svd(v.clone(), true, true);
    let smax = svd.singular_values.max();
    let u_full = svd.u.expect("requested U");
    let vt_full = svd.v_t.expect("requested V^T");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > PINV_CUTOFF * smax)
        .collect();
    let u = DMatrix::from_fn(n, keep.len(), |i, j| u_full[(i, keep[j])]);
    // M = R W Σ⁻¹, so that X U = M
    let m = DMatrix::from_fn(n, keep.len(), |i, j| {
        let k = keep[j];
        let s = svd.singular_values[k];
        (0..r.ncols()).map(|c| r[(i, c)] * vt_full[(k, c)]).sum::<f64>() / s
    });
    let mtu = m.transpose() * &u;
    let x = &m * u.transpose() - &u * m.transpose() + &u * mtu * u.transpose();
    (&x - x.transpose()) * 0.5
}

/// `D1` exact on `F ⊕ F'`, ready for the second-derivative stage on `F`.
pub fn build_first_derivative(space: &FunctionSpace, rule: &QuadratureRule) -> Result<FsbpOperatorSet> {
    let g = with_derivatives(space)?;
    build_first_derivative_on(&g, space, rule, QaRoute::Auto)
}

/// `D1` exact on an explicitly given space `g`; `target` is recorded as the
/// space `D2` is meant for. With `g = F` instead of `F ⊕ F'` this yields the
/// operators whose second derivative loses exactness when `F' ⊄ F`.
pub fn build_first_derivative_on(
    g: &FunctionSpace,
    target: &FunctionSpace,
    rule: &QuadratureRule,
    route: QaRoute,
) -> Result<FsbpOperatorSet> {
    if !rule.element.approx_eq(&g.element()) || !rule.element.approx_eq(&target.element()) {
        return Err(FsbpError::ElementMismatch);
    }
    let n = rule.len();
    let (mut v, mut dv) = vandermonde(g, &rule.nodes)?;
    let b = boundary_matrix(n);
    let p = DVector::from_vec(rule.weights.clone());
    let mut r = DMatrix::from_diagonal(&p) * &dv - &b * &v * 0.5;
    for k in 0..g.dim() {
        let s = v.column(k).amax().max(r.column(k).amax());
        if s > 0.0 {
            v.column_mut(k).scale_mut(1.0 / s);
            dv.column_mut(k).scale_mut(1.0 / s);
            r.column_mut(k).scale_mut(1.0 / s);
        }
    }
    let qa = solve_antisymmetric(&v, &r, route);
    let defect = &qa * &v - &r;
    for (k, h) in g.basis().iter().enumerate() {
        let scale = super::diagnostics::residual_scale(&qa, v.column(k).as_slice(), r.column(k).as_slice());
        let residual = defect.column(k).amax() / scale;
        if !(residual <= QA_TOL) {
            return Err(FsbpError::ConstructionInexact { label: h.label().to_string(), residual });
        }
    }
    let q = qa + &b * 0.5;
    let p_inv = p.map(|w| 1.0 / w);
    let d1 = DMatrix::from_diagonal(&p_inv) * &q;
    Ok(FsbpOperatorSet {
        nodes: rule.nodes.clone(),
        p,
        q,
        b,
        s: d1.clone(),
        d1,
        d2: None,
        element: rule.element,
        exactness_space: Some(g.clone()),
        target_space: Some(target.clone()),
        tag: target.tag(),
    })
}

/// `P⁻¹(B S − D1ᵀ P D1)` without any exactness check.
pub fn assemble_second_derivative(set: &FsbpOperatorSet) -> DMatrix<f64> {
    let p = set.p_matrix();
    let inner = &set.b * &set.s - set.d1.transpose() * p * &set.d1;
    DMatrix::from_diagonal(&set.p_inv()) * inner
}

/// Fills in `D2` and checks it is exact on the target space.
pub fn build_second_derivative(set: &FsbpOperatorSet) -> Result<FsbpOperatorSet> {
    let d2 = assemble_second_derivative(set);
    if let Some(target) = &set.target_space {
        let f = nodal_derivatives(target, &set.nodes, 0);
        let f2 = nodal_derivatives(target, &set.nodes, 2);
        let defect = &d2 * &f - &f2;
        for (k, h) in target.basis().iter().enumerate() {
            let scale = super::diagnostics::residual_scale(&d2, f.column(k).as_slice(), f2.column(k).as_slice());
            let residual = defect.column(k).amax() / scale;
            if !(residual <= D2_TOL) {
                return Err(FsbpError::SecondDerivativeInexact { label: h.label().to_string(), residual });
            }
        }
    }
    Ok(FsbpOperatorSet { d2: Some(d2), ..set.clone() })
}

/// Full pipeline on the reference element: positive rule for
/// `([F ⊕ F']²)'` starting at the requested grid, then `D1` and `D2`.
pub fn construct(kind: &SpaceKind, grid: GridSpec) -> Result<FsbpOperatorSet> {
    let space = FunctionSpace::from_kind(kind, crate::funcspace::Interval::reference())?;
    let g = with_derivatives(&space)?;
    let target = quadrature_target(&g)?;
    let rule = find_positive_rule(&target, grid.family, grid.n)?;
    let set = build_first_derivative_on(&g, &space, &rule, QaRoute::Auto)?;
    build_second_derivative(&set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::NodeFamily;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_operator_is_the_lobatto_operator() {
        let set = construct(&SpaceKind::Polynomial(2), "lobatto:3".parse().unwrap()).unwrap();
        let d1 = [[-1.5, 2.0, -0.5], [-0.5, 0.0, 0.5], [0.5, -2.0, 1.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(set.d1[(i, j)], d1[i][j], epsilon = 1e-12);
                assert_abs_diff_eq!(set.d2()[(i, j)], [1.0, -2.0, 1.0][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn both_routes_agree() {
        let cases = [
            (SpaceKind::Trigonometric(1), "equi:4"),
            (SpaceKind::Exponential { degree: 2, alpha: 1.0 }, "equi:5"),
            (SpaceKind::GaussianRbf { alpha: 1.0, growing: false }, "equi:5"),
            (SpaceKind::Polynomial(3), "equi:7"),
            (SpaceKind::Trigonometric(3), "equi:8"),
        ];
        for (kind, grid) in cases {
            let space = FunctionSpace::from_kind(&kind, crate::funcspace::Interval::reference()).unwrap();
            let g = with_derivatives(&space).unwrap();
            let grid: GridSpec = grid.parse().unwrap();
            let rule = find_positive_rule(&quadrature_target(&g).unwrap(), grid.family, grid.n).unwrap();
            let a = build_first_derivative_on(&g, &space, &rule, QaRoute::Vectorized).unwrap();
            let b = build_first_derivative_on(&g, &space, &rule, QaRoute::Projected).unwrap();
            assert!((&a.q - &b.q).amax() < 1e-11, "{kind}: {}", (&a.q - &b.q).amax());
        }
    }

    #[test]
    fn element_mismatch_is_rejected() {
        let space = FunctionSpace::polynomial(1);
        let rule = QuadratureRule {
            nodes: vec![0.0, 1.0],
            weights: vec![0.5, 0.5],
            element: crate::funcspace::Interval::new(0.0, 1.0).unwrap(),
        };
        assert!(matches!(build_first_derivative(&space, &rule), Err(FsbpError::ElementMismatch)));
    }

    #[test]
    fn inexact_rule_is_reported() {
        // trapezoidal weights on 3 points cannot support a P_2-exact operator
        let space = FunctionSpace::polynomial(2);
        let rule = QuadratureRule {
            nodes: vec![-1.0, 0.0, 1.0],
            weights: vec![0.5, 1.0, 0.5],
            element: crate::funcspace::Interval::reference(),
        };
        assert!(matches!(
            build_first_derivative(&space, &rule),
            Err(FsbpError::ConstructionInexact { .. })
        ));
    }

    #[test]
    fn lobatto_family_is_used_for_large_polynomial_degree() {
        let set = construct(&SpaceKind::Polynomial(20), GridSpec { family: NodeFamily::GaussLobatto, n: 21 }).unwrap();
        assert_eq!(set.n(), 21);
        let ones = DVector::from_element(21, 1.0);
        assert!((&set.d1 * ones).amax() < 1e-10);
    }
}
