//! Numerical kernels used by the frame bound estimator.

pub mod banded;
pub mod dd;
pub mod jacobi;
pub mod lanczos;
