//! Exact WKB analysis of `ħ²ψ″ + pħψ′ + qψ = 0`.
//!
//! The pipeline runs from exact formal series through trajectory geometry and the
//! Borel-plane recursion to Laplace-resummed exact solutions, with direct ODE
//! integration as an independent check.

pub mod borel;
pub mod coeffield;
pub mod error;

pub use error::{Result, WkbError};
pub mod formal;
pub mod geometry;
pub mod laplace;
pub mod ode;
pub mod problems;
pub mod quad;
pub mod validate;
