//! Summation-by-parts operators exact on general function spaces.
//!
//! The crate builds first- and second-derivative SBP operators whose
//! exactness space is an arbitrary finite span of smooth functions
//! (polynomials, trigonometric, exponential or Gaussian radial bases),
//! checks their defining identities, and uses them in multi-block SAT
//! discretizations of advection-diffusion, Burgers and wave problems.

pub mod cli;
pub mod error;
pub mod funcspace;
pub mod linalg;
pub mod operators;
pub mod quadrature;
pub mod solvers;

pub use error::{FsbpError, Result};
pub use funcspace::{FunctionSpace, Interval, SpaceKind};
pub use operators::FsbpOperatorSet;
pub use quadrature::QuadratureRule;
