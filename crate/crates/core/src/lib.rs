//! Sampling sets, annihilating functions and Gabor frame diagnostics for Gaussian
//! shift-invariant spaces in one and two variables.

pub mod error;
pub mod experiments;
pub mod frame;
pub mod gabor;
pub mod geometry;
pub mod linalg;
pub mod annihilator;
pub mod points;
pub mod series;
pub mod trajectory;

pub use error::{Error, Result};
