use std::sync::Arc;

use num_complex::Complex64;

use crate::coeffield::{
    lower_coefficients, parse_coeff, Coefficient, CompiledRational, Jet, RationalFunction,
};
use crate::error::{Result, WkbError};

/// The equation `ħ²ψ″ + pħψ′ + qψ = 0` with p, q polynomial in ħ.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub name: String,
    p: Vec<Coefficient>,
    q: Vec<Coefficient>,
    /// Period in x for coefficients that are periodic (closure is tested modulo this).
    pub period: Option<Complex64>,
    exact: Option<ExactData>,
}

/// Exact data available when every coefficient is rational.
#[derive(Clone, Debug)]
pub struct ExactData {
    pub p: Vec<RationalFunction>,
    pub q: Vec<RationalFunction>,
    pub d0: Arc<RationalFunction>,
    d0_compiled: CompiledRational,
    d0_prime: CompiledRational,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl ProblemSpec {
    pub fn new(name: &str, p: Vec<Coefficient>, q: Vec<Coefficient>) -> Result<Self> {
        let mut p = p;
        let mut q = q;
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        while q.last().is_some_and(|c| c.is_zero()) {
            q.pop();
        }
        let all_rational = p.iter().chain(q.iter()).all(|c| c.as_rational().is_some());
        let exact = if all_rational {
            let pr: Vec<RationalFunction> = p.iter().map(|c| c.as_rational().unwrap().clone()).collect();
            let qr: Vec<RationalFunction> = q.iter().map(|c| c.as_rational().unwrap().clone()).collect();
            let p0 = pr.first().cloned().unwrap_or_else(RationalFunction::zero);
            let q0 = qr.first().cloned().unwrap_or_else(RationalFunction::zero);
            let d0 = &(&p0 * &p0) - &q0.scale(&crate::coeffield::rat(4, 1));
            if d0.is_zero() {
                return Err(WkbError::DegenerateDiscriminant);
            }
            let d0_compiled = d0.compile();
            let d0_prime = d0.derivative().compile();
            Some(ExactData { p: pr, q: qr, d0: Arc::new(d0), d0_compiled, d0_prime })
        } else {
            None
        };
        let spec = ProblemSpec { name: name.to_string(), p, q, period: None, exact };
        if spec.exact.is_none() {
            let probes = [0.37, 1.21, -0.83, 2.9];
            if probes.iter().all(|&t| spec.d0(Complex64::new(t, 0.13)).norm() < 1e-14) {
                return Err(WkbError::DegenerateDiscriminant);
            }
        }
        Ok(spec)
    }

    /// Build from coefficient expressions in the `x`, `h` grammar.
    pub fn from_exprs(name: &str, p: &str, q: &str) -> Result<Self> {
        let pc = lower_coefficients(&parse_coeff(p)?)?;
        let qc = lower_coefficients(&parse_coeff(q)?)?;
        Self::new(name, pc, qc)
    }

    pub fn with_period(mut self, period: Complex64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact(&self) -> Option<&ExactData> {
        self.exact.as_ref()
    }

    pub fn require_exact(&self) -> Result<&ExactData> {
        self.exact.as_ref().ok_or(WkbError::RequiresRational)
    }

    pub fn p_coeffs(&self) -> &[Coefficient] {
        &self.p
    }

    pub fn q_coeffs(&self) -> &[Coefficient] {
        &self.q
    }

    /// Highest ħ-degree among p and q.
    pub fn hbar_degree(&self) -> usize {
        self.p.len().max(self.q.len()).saturating_sub(1)
    }

    pub fn p_jet(&self, k: usize, x: Complex64, n: usize) -> Jet {
        self.p.get(k).map_or_else(|| Jet::constant(czero(), n), |c| c.jet(x, n))
    }

    pub fn q_jet(&self, k: usize, x: Complex64, n: usize) -> Jet {
        self.q.get(k).map_or_else(|| Jet::constant(czero(), n), |c| c.jet(x, n))
    }

    pub fn p_k(&self, k: usize, x: Complex64) -> Complex64 {
        self.p.get(k).map_or(czero(), |c| c.eval(x))
    }

    pub fn q_k(&self, k: usize, x: Complex64) -> Complex64 {
        self.q.get(k).map_or(czero(), |c| c.eval(x))
    }

    /// p(x, ħ).
    pub fn p_eval(&self, x: Complex64, hbar: Complex64) -> Complex64 {
        self.p.iter().rev().fold(czero(), |acc, c| acc * hbar + c.eval(x))
    }

    /// q(x, ħ).
    pub fn q_eval(&self, x: Complex64, hbar: Complex64) -> Complex64 {
        self.q.iter().rev().fold(czero(), |acc, c| acc * hbar + c.eval(x))
    }

    pub fn d0(&self, x: Complex64) -> Complex64 {
        match &self.exact {
            Some(e) => e.d0_compiled.eval(x),
            None => {
                let p0 = self.p_k(0, x);
                p0 * p0 - 4.0 * self.q_k(0, x)
            }
        }
    }

    /// (D₀(x), D₀′(x)).
    pub fn d0_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        match &self.exact {
            Some(e) => (e.d0_compiled.eval(x), e.d0_prime.eval(x)),
            None => {
                let j = self.d0_jet(x, 2);
                (j.c[0], j.c[1])
            }
        }
    }

    pub fn d0_jet(&self, x: Complex64, n: usize) -> Jet {
        let p0 = self.p_jet(0, x, n);
        let q0 = self.q_jet(0, x, n);
        &(&p0 * &p0) - &q0.scale(Complex64::new(4.0, 0.0))
    }

    /// λ_α(x) = (p₀ + ε√D₀)/2 for the given value `r` of ε√D₀.
    pub fn lambda(&self, x: Complex64, r: Complex64) -> Complex64 {
        0.5 * (self.p_k(0, x) + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_discriminant() {
        let s = ProblemSpec::from_exprs("airy", "0", "-x").unwrap();
        assert!(s.is_rational());
        assert!((s.d0(Complex64::new(2.0, 0.0)) - 8.0).norm() < 1e-15);
    }

    #[test]
    fn degenerate_discriminant_rejected() {
        let e = ProblemSpec::from_exprs("deg", "2*3", "9").unwrap_err();
        assert_eq!(e, WkbError::DegenerateDiscriminant);
    }

    #[test]
    fn trig_problem_uses_jets() {
        let s = ProblemSpec::from_exprs("m", "0", "2*(2 - cos(x))").unwrap();
        assert!(!s.is_rational());
        let x = Complex64::new(0.3, 0.0);
        let (d, dp) = s.d0_with_derivative(x);
        assert!((d - 8.0 * (x.cos() - 2.0)).norm() < 1e-13);
        assert!((dp + 8.0 * x.sin()).norm() < 1e-13);
    }
}
