use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WkbError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field elements refer to different discriminants")]
    MismatchedDiscriminant,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("coefficient is not polynomial in h")]
    NonPolynomialInH,
    #[error("coefficient is not a rational function of x")]
    NotRational,
    #[error("discriminant D0 vanishes identically")]
    DegenerateDiscriminant,
    #[error("pole encountered at x = {0}")]
    Pole(Complex64),
    #[error("turning point encountered at x = {0}")]
    TurningPoint(Complex64),
    #[error("path passes too close to a critical point near x = {0}")]
    PathTooClose(Complex64),
    #[error("quadrature did not converge (error estimate {0:e})")]
    Quadrature(f64),
    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("inadmissible flow line from x = {x}: {reason}")]
    InadmissibleFlow { x: Complex64, reason: String },
    #[error("Borel series diverged after {terms} terms (last ratio {ratio:.3})")]
    Divergence { terms: usize, ratio: f64 },
    #[error("Borel series not converged within {terms} terms (last term {last:e})")]
    NotConverged { terms: usize, last: f64 },
    #[error("hbar = {hbar} lies outside the Borel disc (Re(e^(i theta)/hbar) = {c:.4} <= {bound:.4})")]
    OutsideBorelDisc { hbar: Complex64, c: f64, bound: f64 },
    #[error("Laplace tail bound {bound:e} exceeds tolerance {tol:e}; increase xi_max")]
    TailTooLarge { bound: f64, tol: f64 },
    #[error("trajectory is not closed")]
    NotClosed,
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires rational coefficients")]
    RequiresRational,
}

pub type Result<T> = std::result::Result<T, WkbError>;
