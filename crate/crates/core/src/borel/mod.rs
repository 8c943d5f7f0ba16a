//! Borel-plane solution of the standard-form Riccati equation on a characteristics grid.

mod grid;
mod standard;
mod zspace;

pub use grid::{apply_i, convolve, integral_equation_residual, tau_recursion, BorelField, ConvergenceReport, GridParams, Tri};
pub use standard::{standard_form, CoeffSource, PointCoeffs, StandardFormCoeffs};
pub use zspace::successive_approx_check;
