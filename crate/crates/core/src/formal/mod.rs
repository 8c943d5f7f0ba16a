//! Formal WKB series: characteristic roots, odd/even parts, Borel coefficients, Gevrey probe.

mod numeric;
mod problem;
mod roots;
mod wkb;

pub use numeric::{numeric_root_jets, numeric_roots};
pub use problem::{ExactData, ProblemSpec};
pub use roots::{
    characteristic_data, even_part_residual, log_derivative_series, odd_even, riccati_residual, wkb_recursion,
    CharacteristicData, FormalRoots,
};
pub use wkb::{
    borel_coefficients, euler_series, field_json, formal_borel, formal_wkb, gevrey_probe, roots_json, series_exp, FormalWkb,
    GevreyFit,
};
