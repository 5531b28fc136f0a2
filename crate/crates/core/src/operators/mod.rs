//! First- and second-derivative FSBP operator sets and their diagnostics.

mod construct;
mod diagnostics;
mod io;
mod periodic;

pub use construct::{
    assemble_second_derivative, build_first_derivative, build_first_derivative_on, build_second_derivative,
    construct, solve_antisymmetric, QaRoute,
};
pub use diagnostics::{
    continuous_nullspace, exactness_residuals, nullspace, operator_nullspaces, sbp_identity_residual, spectrum, verify_exactness,
    verify_report, NullspaceReport, SpectrumReport, VerifyReport,
};
pub use io::{read_operator, read_operator_file, write_operator, write_operator_file};
pub use periodic::{fd_stencil, periodic_fd_operator};

use nalgebra::{DMatrix, DVector};

use crate::funcspace::{FunctionSpace, Interval};

/// The matrices of a diagonal-norm FSBP operator on one element.
///
/// `d2` stays `None` until [`build_second_derivative`] has run.
#[derive(Clone, Debug)]
pub struct FsbpOperatorSet {
    pub nodes: Vec<f64>,
    /// Diagonal of the norm matrix `P`.
    pub p: DVector<f64>,
    pub q: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub d1: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub d2: Option<DMatrix<f64>>,
    pub element: Interval,
    /// The space `D1` is exact on (normally `F ⊕ F'`).
    pub exactness_space: Option<FunctionSpace>,
    /// The space `D2` is exact on.
    pub target_space: Option<FunctionSpace>,
    /// Space tag written to operator files.
    pub tag: String,
}

impl FsbpOperatorSet {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn p_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.p)
    }

    pub fn p_inv(&self) -> DVector<f64> {
        self.p.map(|w| 1.0 / w)
    }

    /// `D2`, panicking if the second-derivative stage has not been built.
    pub fn d2(&self) -> &DMatrix<f64> {
        self.d2.as_ref().expect("second-derivative operator not built")
    }

    /// Affine copy on `block`: nodes mapped, `P·J`, `D1/J`, `S/J`, `D2/J²`
    /// with `J = |block| / |element|`; `Q` and `B` are unchanged.
    pub fn map_to_block(&self, block: Interval) -> FsbpOperatorSet {
        let j = block.width() / self.element.width();
        FsbpOperatorSet {
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if i == 0 {
                        block.left
                    } else if i + 1 == self.n() {
                        block.right
                    } else {
                        self.element.map_point(&block, x)
                    }
                })
                .collect(),
            p: &self.p * j,
            q: self.q.clone(),
            b: self.b.clone(),
            d1: &self.d1 / j,
            s: &self.s / j,
            d2: self.d2.as_ref().map(|d2| d2 / (j * j)),
            element: block,
            exactness_space: self.exactness_space.as_ref().map(|s| s.mapped(block)),
            target_space: self.target_space.as_ref().map(|s| s.mapped(block)),
            tag: self.tag.clone(),
        }
    }
}

/// `B = diag(-1, 0, …, 0, 1)`.
pub fn boundary_matrix(n: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(n, n);
    if n > 0 {
        b[(0, 0)] = -1.0;
        b[(n - 1, n - 1)] = 1.0;
    }
    b
}

/// Free-function form of [`FsbpOperatorSet::map_to_block`].
pub fn map_to_block(set: &FsbpOperatorSet, block: Interval) -> FsbpOperatorSet {
    set.map_to_block(block)
}
