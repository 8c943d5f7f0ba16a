//! Built-in problems and the reduction to Schrödinger form.

mod catalog;
mod schrodinger;

pub use catalog::{builtin, builtin_exprs, catalog, entry, resolve_params, ExpectedCritical, Fixture, ParamInfo, ProblemCatalogEntry};
pub use schrodinger::{to_schrodinger, SchrodingerForm};
