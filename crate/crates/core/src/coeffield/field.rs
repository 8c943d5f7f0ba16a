use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use super::rational::{CompiledRational, RationalFunction};
use crate::error::{Result, WkbError};

/// Exact element `a + b·√D₀` of the quadratic extension over ℚ(x).
#[derive(Clone, Debug)]
pub struct FieldElement {
    pub a: RationalFunction,
    pub b: RationalFunction,
    d0: Arc<RationalFunction>,
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b && (Arc::ptr_eq(&self.d0, &o.d0) || self.d0 == o.d0)
    }
}

/// Sign selecting `±` the principal square root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl FieldElement {
    pub fn new(a: RationalFunction, b: RationalFunction, d0: &Arc<RationalFunction>) -> Self {
        FieldElement { a, b, d0: d0.clone() }
    }

    pub fn from_rational(a: RationalFunction, d0: &Arc<RationalFunction>) -> Self {
        Self::new(a, RationalFunction::zero(), d0)
    }

    pub fn zero(d0: &Arc<RationalFunction>) -> Self {
        Self::from_rational(RationalFunction::zero(), d0)
    }

    pub fn one(d0: &Arc<RationalFunction>) -> Self {
        Self::from_rational(RationalFunction::one(), d0)
    }

    /// The element `√D₀`.
    pub fn sqrt_d0(d0: &Arc<RationalFunction>) -> Self {
        Self::new(RationalFunction::zero(), RationalFunction::one(), d0)
    }

    pub fn d0(&self) -> &Arc<RationalFunction> {
        &self.d0
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.d0, &o.d0) || self.d0 == o.d0 {
            Ok(())
        } else {
            Err(WkbError::MismatchedDiscriminant)
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self::new(&self.a + &o.a, &self.b + &o.b, &self.d0))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self::new(&self.a - &o.a, &self.b - &o.b, &self.d0))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let bd = &self.b * &o.b;
        let a = &(&self.a * &o.a) + &(&bd * &self.d0);
        let b = &(&self.a * &o.b) + &(&self.b * &o.a);
        Ok(Self::new(a, b, &self.d0))
    }

    /// Norm `a² − b²D₀`.
    pub fn norm(&self) -> RationalFunction {
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &self.d0)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -&self.b, &self.d0)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(WkbError::DivisionByZero);
        }
        let ninv = n.inverse()?;
        Ok(Self::new(&self.a * &ninv, &(-&self.b) * &ninv, &self.d0))
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        if o.b.is_zero() {
            let inv = o.a.inverse()?;
            return Ok(Self::new(&self.a * &inv, &self.b * &inv, &self.d0));
        }
        self.try_mul(&o.inverse()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(self.a.scale(q), self.b.scale(q), &self.d0)
    }

    pub fn mul_rational(&self, r: &RationalFunction) -> Self {
        Self::new(&self.a * r, &self.b * r, &self.d0)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b, &self.d0)
    }

    pub fn derivative(&self) -> Self {
        // ∂(b√D₀) = (b' + b·D₀'/(2D₀))√D₀
        let b_part = if self.b.is_zero() {
            RationalFunction::zero()
        } else {
            let dlog = log_derivative_half(&self.d0);
            &self.b.derivative() + &(&self.b * &dlog)
        };
        Self::new(self.a.derivative(), b_part, &self.d0)
    }

    /// `a(x) + r·b(x)` for a caller-supplied value `r` of √D₀(x).
    pub fn eval_with_sqrt(&self, x: Complex64, r: Complex64) -> Complex64 {
        let a = if self.a.is_zero() { Complex64::new(0.0, 0.0) } else { self.a.eval(x) };
        if self.b.is_zero() {
            return a;
        }
        a + r * self.b.eval(x)
    }

    pub fn compile(&self) -> CompiledField {
        CompiledField {
            a: (!self.a.is_zero()).then(|| self.a.compile()),
            b: (!self.b.is_zero()).then(|| self.b.compile()),
            d0: self.d0.compile(),
        }
    }

    /// As [`FieldElement::compile`], expanded about x = c.
    pub fn compile_at(&self, c: f64) -> CompiledField {
        CompiledField {
            a: (!self.a.is_zero()).then(|| self.a.compile_at(c)),
            b: (!self.b.is_zero()).then(|| self.b.compile_at(c)),
            d0: self.d0.compile_at(c),
        }
    }
}

/// `D₀′/(2D₀)`, the logarithmic derivative of √D₀.
pub fn log_derivative_half(d0: &RationalFunction) -> RationalFunction {
    let q = (&d0.derivative() / d0).expect("D0 nonzero");
    q.scale(&BigRational::new(1.into(), 2.into()))
}

/// Evaluate with the branch `±principal√D₀(x)`.
pub fn eval_field(e: &FieldElement, x: Complex64, branch: Sign) -> Result<Complex64> {
    let a = if e.a.is_zero() {
        Complex64::new(0.0, 0.0)
    } else {
        let d = e.a.denom().eval(x);
        if d.norm() == 0.0 {
            return Err(WkbError::Pole(x));
        }
        e.a.numer().eval(x) / d
    };
    if e.b.is_zero() {
        return Ok(a);
    }
    let d = e.b.denom().eval(x);
    if d.norm() == 0.0 {
        return Err(WkbError::Pole(x));
    }
    let dv = e.d0.eval(x);
    if dv.norm() == 0.0 {
        return Err(WkbError::TurningPoint(x));
    }
    Ok(a + branch.value() * dv.sqrt() * e.b.numer().eval(x) / d)
}

/// Floating-point copy of a field element.
#[derive(Clone, Debug)]
pub struct CompiledField {
    a: Option<CompiledRational>,
    b: Option<CompiledRational>,
    d0: CompiledRational,
}

impl CompiledField {
    pub fn eval_with_sqrt(&self, x: Complex64, r: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        if let Some(a) = &self.a {
            v += a.eval(x);
        }
        if let Some(b) = &self.b {
            v += r * b.eval(x);
        }
        v
    }

    pub fn d0(&self, x: Complex64) -> Complex64 {
        self.d0.eval(x)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})*sqrt(D0)", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffield::poly::{rat, Poly};

    fn d0(c: &[i64]) -> Arc<RationalFunction> {
        Arc::new(RationalFunction::from_poly(Poly::from_i64(c)))
    }

    #[test]
    fn sqrt_derivative_rule() {
        let d = d0(&[0, 4]);
        let s = FieldElement::sqrt_d0(&d);
        let ds = s.derivative();
        let expect = RationalFunction::new(Poly::from_i64(&[1]), Poly::from_i64(&[0, 2])).unwrap();
        assert!(ds.a.is_zero());
        assert_eq!(ds.b, expect);
    }

    #[test]
    fn inverse_of_one_plus_sqrt() {
        let d = d0(&[0, 1]);
        let e = FieldElement::one(&d).try_add(&FieldElement::sqrt_d0(&d)).unwrap();
        let inv = e.inverse().unwrap();
        let c = RationalFunction::new(Poly::from_i64(&[1]), Poly::from_i64(&[1, -1])).unwrap();
        assert_eq!(inv.a, c);
        assert_eq!(inv.b, -&c);
        assert_eq!(e.try_mul(&inv).unwrap(), FieldElement::one(&d));
    }

    #[test]
    fn airy_lambda_values() {
        let d = d0(&[0, 4]);
        let half = rat(1, 2);
        let lp = FieldElement::sqrt_d0(&d).scale(&half);
        let lm = lp.neg();
        let x = Complex64::new(1.0, 0.0);
        assert!((eval_field(&lp, x, Sign::Plus).unwrap() - 1.0).norm() < 1e-15);
        assert!((eval_field(&lm, x, Sign::Plus).unwrap() + 1.0).norm() < 1e-15);
        let prod = lp.try_mul(&lm).unwrap();
        assert!(prod.b.is_zero());
        assert_eq!(prod.a, RationalFunction::from_poly(Poly::from_i64(&[0, -1])));
    }

    #[test]
    fn branch_minus_is_conjugate() {
        let d = d0(&[1, 0, 1]);
        let e = FieldElement::new(RationalFunction::x(), RationalFunction::from_int(3), &d);
        let x = Complex64::new(0.4, -1.3);
        let m = eval_field(&e, x, Sign::Minus).unwrap();
        let c = eval_field(&e.conjugate(), x, Sign::Plus).unwrap();
        assert!((m - c).norm() < 1e-14);
    }
}
