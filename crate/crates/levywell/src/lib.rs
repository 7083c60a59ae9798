//! Fractional quantum mechanics of a particle in an infinite square well,
//! built on the momentum-representation Levy kernel.
//!
//! The crate computes the free fractional kernel in real and imaginary
//! time, the quantum Riesz operator by two independent routes, the in-well
//! propagator as a sign-alternating image sum and as an eigenfunction sum,
//! the eigen-spectrum with parity-resolved closed forms, spectral and
//! kernel-matrix time evolution, and a residual diagnostic that measures
//! how well the zero-extended well eigenfunctions satisfy the stationary
//! fractional equation under the genuinely nonlocal operator.
//!
//! Every quantity is cross-checked by at least two numerical routes; the
//! `verify` module bundles those checks, and the CLI (`levywell verify`)
//! runs them as a reproducible table.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod freekernel;
pub mod grid;
pub mod params;
pub mod quad;
pub mod residual;
pub mod riesz;
pub mod verify;
pub mod well;

pub use error::{Error, Result};
pub use grid::{inner_product, Grid, WaveFunction};
pub use params::FractionalParams;
