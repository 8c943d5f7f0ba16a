use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::coeffield::{lower_coefficients, CoeffExpr, Coefficient};
use crate::error::Result;
use crate::formal::ProblemSpec;
use crate::quad::integrate;

/// ħ²φ″ = Qφ with φ = exp((1/2ħ)∫p)ψ and Q = ¼p² + ½ħ∂ₓp − q.
#[derive(Clone, Debug)]
pub struct SchrodingerForm {
    pub name: String,
    /// ħ-coefficients of Q.
    pub potential: Vec<Coefficient>,
    /// ħ-coefficients of the original p (the exponent integrand).
    pub p: Vec<Coefficient>,
}

fn series(coeffs: &[Coefficient]) -> CoeffExpr {
    let mut acc = CoeffExpr::Num(BigRational::from_integer(BigInt::from(0)));
    for (k, c) in coeffs.iter().enumerate() {
        let term = match k {
            0 => c.to_expr(),
            _ => CoeffExpr::Mul(Box::new(c.to_expr()), Box::new(CoeffExpr::Pow(Box::new(CoeffExpr::H), k as i32))),
        };
        acc = CoeffExpr::Add(Box::new(acc), Box::new(term));
    }
    acc
}

fn num(n: i64, d: i64) -> Box<CoeffExpr> {
    Box::new(CoeffExpr::Num(BigRational::new(BigInt::from(n), BigInt::from(d))))
}

pub fn to_schrodinger(spec: &ProblemSpec) -> Result<SchrodingerForm> {
    let p = series(spec.p_coeffs());
    let q = series(spec.q_coeffs());
    let quarter_p2 = CoeffExpr::Mul(num(1, 4), Box::new(CoeffExpr::Pow(Box::new(p.clone()), 2)));
    let half_hdp = CoeffExpr::Mul(num(1, 2), Box::new(CoeffExpr::Mul(Box::new(CoeffExpr::H), Box::new(p.derivative()))));
    let big_q = CoeffExpr::Sub(Box::new(CoeffExpr::Add(Box::new(quarter_p2), Box::new(half_hdp))), Box::new(q));
    Ok(SchrodingerForm { name: spec.name.clone(), potential: lower_coefficients(&big_q)?, p: spec.p_coeffs().to_vec() })
}

impl SchrodingerForm {
    pub fn potential_eval(&self, x: Complex64, hbar: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for c in &self.potential {
            acc += c.eval(x) * pw;
            pw *= hbar;
        }
        acc
    }

    /// The equation ħ²φ″ + (−Q)φ = 0; fails when Q₀ ≡ 0.
    pub fn problem(&self) -> Result<ProblemSpec> {
        let q = self
            .potential
            .iter()
            .map(|c| match c {
                Coefficient::Rational(r, _) => Coefficient::rational(-r),
                Coefficient::Analytic(e) => Coefficient::Analytic(CoeffExpr::Neg(Box::new(e.clone()))),
            })
            .collect();
        ProblemSpec::new(&format!("{}_schrodinger", self.name), vec![], q)
    }

    /// (1/2ħ)∫ₓ₀ˣ p dx along the straight segment.
    pub fn exponent(&self, x0: Complex64, x: Complex64, hbar: Complex64) -> Result<Complex64> {
        let d = x - x0;
        let int = integrate(
            |t| {
                let y = x0 + d * t;
                let mut acc = Complex64::new(0.0, 0.0);
                let mut pw = Complex64::new(1.0, 0.0);
                for c in &self.p {
                    acc += c.eval(y) * pw;
                    pw *= hbar;
                }
                acc * d
            },
            0.0,
            1.0,
            1e-13,
            1e-300,
        )?;
        Ok(int / (2.0 * hbar))
    }

    /// ψ = exp(−(1/2ħ)∫ₓ₀ˣp)φ.
    pub fn map_back(&self, phi: Complex64, x0: Complex64, x: Complex64, hbar: Complex64) -> Result<Complex64> {
        Ok(phi * (-self.exponent(x0, x, hbar)?).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(f: &SchrodingerForm) -> Vec<Complex64> {
        let x = Complex64::new(0.7, 0.2);
        let h = Complex64::new(0.3, 0.1);
        f.potential.iter().map(|c| c.eval(x)).chain([f.potential_eval(x, h)]).collect()
    }

    #[test]
    fn identity_on_schrodinger_form() {
        let s = ProblemSpec::from_exprs("a", "0", "-x").unwrap();
        let f = to_schrodinger(&s).unwrap();
        let v = values(&f);
        assert_eq!(f.potential.len(), 1);
        assert!((v[0] - Complex64::new(0.7, 0.2)).norm() < 1e-15);
        assert_eq!(f.problem().unwrap().q_coeffs()[0], s.q_coeffs()[0]);
    }

    #[test]
    fn constant_p() {
        let s = ProblemSpec::from_exprs("c", "2", "0").unwrap();
        let f = to_schrodinger(&s).unwrap();
        assert_eq!(f.potential.len(), 1);
        assert!((values(&f)[0] - 1.0).norm() < 1e-15);
        let e = f.exponent(Complex64::new(0.0, 0.0), Complex64::new(1.5, 0.0), Complex64::new(0.5, 0.0)).unwrap();
        assert!((e - 3.0).norm() < 1e-13);
    }

    #[test]
    fn linear_h_p() {
        // p = 2xħ: Q₂ = x² + 1.
        let s = ProblemSpec::from_exprs("d", "2*x*h", "-1").unwrap();
        let f = to_schrodinger(&s).unwrap();
        let x = Complex64::new(0.7, 0.2);
        assert_eq!(f.potential.len(), 3);
        assert!((f.potential[0].eval(x) - 1.0).norm() < 1e-15);
        assert!(f.potential[1].eval(x).norm() < 1e-15);
        assert!((f.potential[2].eval(x) - (x * x + 1.0)).norm() < 1e-14);
    }
}
