//! Independent oracles for the resummed solutions: direct ODE integration, transfer matrices, residuals, remainder fits.

mod compare;
mod oracle;

pub use compare::{compare_exact, remainder_scan, resummed_riccati_residual, CompareReport, RemainderScan, RiccatiResidual};
pub use oracle::{direct_solve, path_integral_p, transfer_matrix, OdeOracleResult, OracleSample, TransferMatrix};
