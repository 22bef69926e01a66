//! Finite-geometry pseudorandom graphs, exact structural and spectral
//! checks, container counting, transference and Ramsey lower-bound
//! certificates.

pub mod certify;
pub mod containers;
pub mod error;
pub mod geometry;
pub mod gf;
pub mod graph;
pub mod io;
pub mod spectral;
pub mod transfer;

pub use error::{Error, Result};
pub use gf::{FieldElement, FieldSpec};
pub use graph::{ForbiddenPattern, Graph, LinearHypergraph};
pub use spectral::{Scalar, SpectralReport};

/// Double-precision spectral report.
pub type Spectrum = SpectralReport<f64>;
/// Single-precision spectral report.
pub type Spectrum32 = SpectralReport<f32>;
