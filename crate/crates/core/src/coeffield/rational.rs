use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{horner, Poly};
use crate::error::WkbError;

/// Reduced quotient of polynomials with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self, WkbError> {
        if den.is_zero() {
            return Err(WkbError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RationalFunction { num, den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        let l = den.lead();
        if l.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = l.recip();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn zero() -> Self {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RationalFunction { num: Poly::one(), den: Poly::one() }
    }

    pub fn x() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    pub fn constant(q: BigRational) -> Self {
        Self::from_poly(Poly::constant(q))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_poly(Poly::from_i64(&[v]))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.scale(q), den: self.den.clone() }
    }

    pub fn inverse(&self) -> Result<Self, WkbError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn powi(&self, n: i32) -> Result<Self, WkbError> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let k = n.unsigned_abs();
        Ok(RationalFunction { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn derivative(&self) -> Self {
        if self.den.degree() == Some(0) {
            return RationalFunction { num: self.num.derivative(), den: self.den.clone() };
        }
        // (n/d)' = (n'd - nd')/d^2, with d' shared factor removed via gcd(d, d')
        let dp = self.den.derivative();
        let g = Poly::gcd(&self.den, &dp);
        let d_g = self.den.div_exact(&g);
        let dp_g = dp.div_exact(&g);
        let top = &(&self.num.derivative() * &d_g) - &(&self.num * &dp_g);
        Self::reduce(top, &self.den * &d_g)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.num.eval(x) / self.den.eval(x)
    }

    pub fn eval_rational(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval_rational(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_rational(x) / d)
        }
    }

    pub fn compile(&self) -> CompiledRational {
        CompiledRational { num: self.num.to_f64(), den: self.den.to_f64(), center: 0.0 }
    }

    /// Compiled in powers of (x − c), which avoids cancellation in high-degree numerators near c.
    pub fn compile_at(&self, c: f64) -> CompiledRational {
        let cr = BigRational::from_float(c).unwrap_or_else(BigRational::zero);
        CompiledRational { num: self.num.taylor_shift(&cr).to_f64(), den: self.den.taylor_shift(&cr).to_f64(), center: c }
    }
}

/// Floating-point copy of a rational function for fast repeated evaluation.
#[derive(Clone, Debug, Default)]
pub struct CompiledRational {
    /// Coefficients in powers of (x − center).
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub center: f64,
}

impl CompiledRational {
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let u = x - self.center;
        horner(&self.num, u) / horner(&self.den, u)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RationalFunction::reduce(&self.num + &o.num, self.den.clone());
        }
        let g = Poly::gcd(&self.den, &o.den);
        if g.is_one() {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            return RationalFunction::reduce(num, &self.den * &o.den);
        }
        let b = self.den.div_exact(&g);
        let d = o.den.div_exact(&g);
        let num = &(&self.num * &d) + &(&o.num * &b);
        RationalFunction::reduce(num, &(&b * &d) * &g)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        let g1 = Poly::gcd(&self.num, &o.den);
        let g2 = Poly::gcd(&o.num, &self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), o.den.clone())
        } else {
            (self.num.div_exact(&g1), o.den.div_exact(&g1))
        };
        let (c, b) = if g2.is_one() {
            (o.num.clone(), self.den.clone())
        } else {
            (o.num.div_exact(&g2), self.den.div_exact(&g2))
        };
        let num = &a * &c;
        let den = &b * &d;
        let l = den.lead();
        if l.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = l.recip();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }
}

impl Div for &RationalFunction {
    type Output = Result<RationalFunction, WkbError>;
    fn div(self, o: &RationalFunction) -> Result<RationalFunction, WkbError> {
        Ok(self * &o.inverse()?)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffield::poly::rat;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_i64(n), Poly::from_i64(d)).unwrap()
    }

    #[test]
    fn reduces_common_factor() {
        let r = rf(&[-1, 0, 1], &[-2, 2]);
        assert_eq!(r.numer(), &Poly::from_coeffs(vec![rat(1, 2), rat(1, 2)]));
        assert!(r.denom().is_one());
    }

    #[test]
    fn arithmetic_matches_evaluation() {
        let a = rf(&[1, 2], &[3, 0, 1]);
        let b = rf(&[0, 1], &[-1, 1]);
        let z = Complex64::new(0.3, 0.7);
        let s = &a + &b;
        let p = &a * &b;
        let q = (&a / &b).unwrap();
        assert!((s.eval(z) - (a.eval(z) + b.eval(z))).norm() < 1e-13);
        assert!((p.eval(z) - a.eval(z) * b.eval(z)).norm() < 1e-13);
        assert!((q.eval(z) - a.eval(z) / b.eval(z)).norm() < 1e-13);
    }

    #[test]
    fn derivative_of_quotient() {
        let r = rf(&[1], &[0, 1]);
        assert_eq!(r.derivative(), rf(&[-1], &[0, 0, 1]));
    }

    #[test]
    fn evaluates_at_two() {
        let r = rf(&[1, 1], &[-1, 1]);
        assert_eq!(r.eval_rational(&rat(2, 1)), Some(rat(3, 1)));
    }
}
