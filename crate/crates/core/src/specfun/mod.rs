//! Special functions (Gamma, Airy Ai, Bessel J) and the classical sine, Airy
//! and Bessel kernels.

pub mod airy;
pub mod bessel;
pub mod gamma;
pub mod kernels;

use thiserror::Error;

pub use airy::airy_ai;
pub use bessel::{bessel_j, bessel_j_prime};
pub use gamma::{gamma, ln_gamma};
pub use kernels::{classical_kernel, ClassicalKernelTag};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("domain error: {0}")]
    Domain(String),
}
