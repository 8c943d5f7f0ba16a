//! Laplace resummation of the Borel data into exact characteristic roots, WKB solutions and monodromy.

mod euler;
mod exact;
mod transform;

pub use euler::{euler_laplace, euler_reference, richardson_coefficients};
pub use exact::{exact_wkb, monodromy, wronskian, ExactRoot, Monodromy, PsiTable, RootSample};
pub use transform::{
    fit_exponential_type, fitted_simpson, laplace_transform, laplace_with_fit, moments, ExpFit, LaplaceOptions, LaplaceValue,
};
