//! Exact arithmetic over ℚ(x)(√D₀), coefficient parsing and Taylor jets.

mod expr;
mod field;
mod jet;
mod poly;
mod rational;

pub use expr::{parse_coeff, CoeffExpr, LowerTarget};
pub use field::{eval_field, log_derivative_half, CompiledField, FieldElement, Sign};
pub use jet::Jet;
pub use poly::Poly;
#[allow(unused_imports)]
pub(crate) use poly::{rat, rat_to_f64};
pub use rational::{CompiledRational, RationalFunction};

use num_complex::Complex64;

use crate::error::Result;

/// One ħ-coefficient of p or q: exact rational, or an analytic expression in x.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Rational(RationalFunction, CompiledRational),
    Analytic(CoeffExpr),
}

impl PartialEq for Coefficient {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Coefficient::Rational(a, _), Coefficient::Rational(b, _)) => a == b,
            (Coefficient::Analytic(a), Coefficient::Analytic(b)) => a == b,
            _ => false,
        }
    }
}

impl Coefficient {
    pub fn rational(r: RationalFunction) -> Self {
        let c = r.compile();
        Coefficient::Rational(r, c)
    }

    pub fn as_rational(&self) -> Option<&RationalFunction> {
        match self {
            Coefficient::Rational(r, _) => Some(r),
            Coefficient::Analytic(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Rational(r, _) if r.is_zero())
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        match self {
            Coefficient::Rational(_, c) => c.eval(x),
            Coefficient::Analytic(e) => e.eval(x, Complex64::new(0.0, 0.0)),
        }
    }

    pub fn jet(&self, x: Complex64, n: usize) -> Jet {
        match self {
            Coefficient::Rational(_, c) => {
                let v = Jet::variable(x - c.center, n);
                Jet::poly(&c.num, &v).div(&Jet::poly(&c.den, &v))
            }
            Coefficient::Analytic(e) => e.jet(x, n),
        }
    }

    pub fn to_expr(&self) -> CoeffExpr {
        match self {
            Coefficient::Rational(r, _) => CoeffExpr::from_rational(r),
            Coefficient::Analytic(e) => e.clone(),
        }
    }
}

/// Lower an expression to ħ-coefficients, exact wherever possible.
pub fn lower_coefficients(e: &CoeffExpr) -> Result<Vec<Coefficient>> {
    if e.is_rational() {
        return Ok(e.lower()?.into_iter().map(Coefficient::rational).collect());
    }
    let parts = e.lower_analytic()?;
    Ok(parts
        .into_iter()
        .map(|c| match c.lower() {
            Ok(mut v) if v.len() <= 1 => {
                Coefficient::rational(v.pop().unwrap_or_else(RationalFunction::zero))
            }
            _ => Coefficient::Analytic(c),
        })
        .collect())
}
