//! Numerical conformal maps of planar domains onto the disk, annuli and
//! rectangles via least-squares Laplace solvers.

pub mod basis;
pub mod diagnostics;
pub mod geometry;
pub mod laplace;
pub mod linalg;
pub mod maps;
pub mod rational;
pub mod render;

pub use num_complex::Complex64;

/// Crate version recorded in result files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
