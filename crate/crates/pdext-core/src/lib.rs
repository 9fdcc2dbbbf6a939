//! Numerical toolkit for locally defined positive definite functions on an
//! interval and their extensions: grid certification, Pólya spline
//! extensions, Bochner transforms of spectral measures, Mercer operator
//! spectra, RKHS norms and membership diagnostics, Shannon sampling, and
//! Gaussian process covariance simulation.

pub mod bochner;
pub mod error;
pub mod gp;
pub mod mercer;
pub mod model;
pub mod pdcheck;
pub mod polya;
pub mod quad;
pub mod rkhs;

pub use error::{Error, Result};
