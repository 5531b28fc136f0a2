use thiserror::Error;

pub type Result<T> = std::result::Result<T, FsbpError>;

#[derive(Debug, Error)]
pub enum FsbpError {
    #[error("invalid interval [{left}, {right}]")]
    InvalidInterval { left: f64, right: f64 },

    #[error("function space basis is linearly dependent: rank {rank} < dim {dim}")]
    DependentBasis { rank: usize, dim: usize },

    #[error("basis function `{label}` leaves double-precision range on the element (|f|, |f'| or |f''| up to {magnitude:e})")]
    BasisOutOfRange { label: String, magnitude: f64 },

    #[error("function space must contain at least one basis function")]
    EmptySpace,

    #[error("basis function `{label}` has no derivative of order {order}")]
    DerivativeUnavailable { label: String, order: usize },

    #[error("basis function `{label}`: {which} disagrees with finite differences (rel. error {error:e})")]
    InconsistentDerivative { label: String, which: &'static str, error: f64 },

    #[error("function spaces live on different elements")]
    ElementMismatch,

    #[error("node {index} ({value}) lies outside the element [{left}, {right}]")]
    NodeOutsideElement { index: usize, value: f64, left: f64, right: f64 },

    #[error("nodes must be strictly increasing (violated at index {index})")]
    NodesNotIncreasing { index: usize },

    #[error("grid must contain both element endpoints")]
    MissingEndpoints,

    #[error("moment of `{label}` did not converge (error estimate {estimate:e})")]
    MomentNonConvergence { label: String, estimate: f64 },

    #[error("quadrature weights not positive on {n} nodes (min weight {min_weight:e})")]
    NonPositiveWeights { n: usize, min_weight: f64 },

    #[error("quadrature inexact on {n} nodes: residual {residual:e} for `{label}`")]
    InexactQuadrature { n: usize, label: String, residual: f64 },

    #[error("no positive exact rule up to N = {cap}; try a different node family")]
    RuleNotFound { cap: usize },

    #[error("operator construction inexact: residual {residual:e} for basis `{label}`")]
    ConstructionInexact { label: String, residual: f64 },

    #[error("second-derivative operator not exact: residual {residual:e} for basis `{label}`")]
    SecondDerivativeInexact { label: String, residual: f64 },

    #[error("first-derivative operator missing the second-derivative stage")]
    MissingSecondDerivative,

    #[error("eigenvalue iteration did not converge")]
    EigenNonConvergence,

    #[error("invalid SAT coefficients: {0}")]
    InvalidSat(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("solution diverged at step {step} (last finite time {time})")]
    Divergence { step: usize, time: f64 },

    #[error("state value at index {index} is not finite")]
    NonFiniteState { index: usize },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
