//! Foundation numerics: Gauss rules, a tridiagonal eigensolver, adaptive
//! Runge–Kutta integration, small dense linear algebra and double-double
//! arithmetic.

pub mod double_double;
pub mod eigen;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod scalar;

use thiserror::Error;

pub use double_double::DoubleDouble;
pub use eigen::tridiagonal_eigen_first_components;
pub use linalg::{dense_solve, dense_solve_det};
pub use ode::{ode_solve, ode_solve_with, DenseSolution, OdeOptions};
pub use quadrature::{
    gauss_jacobi_rule, gauss_legendre_rule, gauss_rule_from_recurrence, integrate_adaptive,
    integrate_edge_smoothed, integrate_edge_smoothed_gaps, IntegrationResult, QuadratureRule,
};
pub use scalar::Real;

/// Alias used where the extended scalar appears in public signatures.
pub type ExtendedReal = DoubleDouble;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("adaptive quadrature did not converge (estimated error {error:e}, worst near {worst_point})")]
    QuadratureNoConvergence { worst_point: f64, error: f64 },
    #[error("step size underflow at t = {t} (possible singularity)")]
    StepSizeUnderflow { t: f64 },
    #[error("integration stopped at t = {t} after {steps} steps without reaching the endpoint")]
    TooManySteps { t: f64, steps: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("non-finite value encountered in {what}")]
    NonFinite { what: &'static str },
}
