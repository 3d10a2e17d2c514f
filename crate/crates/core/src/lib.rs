//! Numerical laboratory for the caloron correspondence between Chern-Simons
//! theory on a circle bundle `M -> Σ` and caloron BF theory on `Σ`.

pub mod caloron;
pub mod cli;
pub mod error;
pub mod field_io;
pub mod functionals;
pub mod gauge;
pub mod gerbe;
pub mod lie;
pub mod localization;
pub mod loops;
pub mod manifold;
pub mod sampling;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
