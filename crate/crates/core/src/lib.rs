//! Multiscale total-variation estimation for linear inverse problems.
//!
//! The library reconstructs a function of bounded variation from noisy,
//! indirect observations by minimizing discrete total variation subject to a
//! simultaneous box constraint on all wavelet-vaguelette coefficients of the
//! residual. It ships the building blocks (grids and phantoms, Daubechies
//! tensor wavelets, forward operators with their vaguelette dictionaries,
//! observation simulation, a primal-dual solver) together with Monte-Carlo
//! experiment drivers that measure empirical convergence rates and related
//! diagnostics.

pub mod cli;
pub mod experiments;
pub mod grids;
pub mod io;
pub mod noise;
pub mod operators;
pub mod solver;
pub mod wavelets;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{field}`: {message}")]
    InvalidArgument { field: &'static str, message: String },

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument { field, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
