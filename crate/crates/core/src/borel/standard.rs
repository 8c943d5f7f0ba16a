use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::coeffield::{log_derivative_half, CompiledField, FieldElement, RationalFunction, Sign};
use crate::error::Result;
use crate::formal::{numeric_root_jets, FormalRoots, ProblemSpec};

/// Exact coefficients of the standard-form equation for T, where s_α = λ_α + ħs_α⁽¹⁾ + ε_α√D₀·T.
///
/// `big_b0[k−1]`, `big_b1[k−1]` are the ħᵏ coefficients (k ≥ 1) of B₀, B₁.
#[derive(Clone, Debug)]
pub struct StandardFormCoeffs {
    pub alpha: Sign,
    pub b0: FieldElement,
    pub b1: FieldElement,
    pub big_b0: Vec<FieldElement>,
    pub big_b1: Vec<FieldElement>,
}

fn coeff(c: &[RationalFunction], k: usize, d0: &Arc<RationalFunction>) -> FieldElement {
    FieldElement::from_rational(c.get(k).cloned().unwrap_or_else(RationalFunction::zero), d0)
}

pub fn standard_form(spec: &ProblemSpec, roots: &FormalRoots, alpha: Sign) -> Result<StandardFormCoeffs> {
    let ex = spec.require_exact()?;
    let d0 = &ex.d0;
    let s = roots.coeffs(alpha);
    let lambda = &s[0];
    let s1 = &s[1];
    let eps = BigRational::from_integer(BigInt::from(alpha.value() as i64));
    let inv_d0 = FieldElement::from_rational(d0.inverse()?, d0);
    let inv_er = FieldElement::new(RationalFunction::zero(), d0.inverse()?.scale(&eps), d0);
    let p1 = coeff(&ex.p, 1, d0);
    let b0 = coeff(&ex.q, 2, d0)
        .try_sub(&coeff(&ex.p, 2, d0).try_mul(lambda)?)?
        .try_add(&s1.try_mul(s1)?)?
        .try_sub(&s1.derivative())?
        .try_sub(&p1.try_mul(s1)?)?
        .try_mul(&inv_d0)?;
    let dlog = FieldElement::from_rational(log_derivative_half(d0), d0);
    let b1 = s1.scale(&BigRational::from_integer(2.into())).try_sub(&p1)?.try_sub(&dlog)?.try_mul(&inv_er)?;
    let deg = spec.hbar_degree();
    let mut big_b0 = Vec::new();
    let mut big_b1 = Vec::new();
    for k in 1..deg {
        let c0 = coeff(&ex.q, k + 2, d0)
            .try_sub(&coeff(&ex.p, k + 2, d0).try_mul(lambda)?)?
            .try_sub(&coeff(&ex.p, k + 1, d0).try_mul(s1)?)?
            .try_mul(&inv_d0)?;
        big_b0.push(c0);
        big_b1.push(coeff(&ex.p, k + 1, d0).try_mul(&inv_er)?.neg());
    }
    while big_b0.last().is_some_and(|c| c.is_zero()) && big_b1.last().is_some_and(|c| c.is_zero()) {
        big_b0.pop();
        big_b1.pop();
    }
    Ok(StandardFormCoeffs { alpha, b0, b1, big_b0, big_b1 })
}

/// Standard-form data at one point: b₀, b₁ and the ξ-Taylor coefficients of β₀, β₁.
#[derive(Clone, Debug, Default)]
pub struct PointCoeffs {
    pub b0: Complex64,
    pub b1: Complex64,
    pub beta0: Vec<Complex64>,
    pub beta1: Vec<Complex64>,
}

impl PointCoeffs {
    /// Taylor coefficients Bₖ ↦ ξ^{k−1}/(k−1)!.
    fn borel(c: &[Complex64]) -> Vec<Complex64> {
        let mut f = 1.0;
        c.iter()
            .enumerate()
            .map(|(i, v)| {
                if i > 0 {
                    f *= i as f64;
                }
                v / f
            })
            .collect()
    }

    pub fn beta0_at(&self, xi: Complex64) -> Complex64 {
        horner(&self.beta0, xi)
    }

    pub fn beta1_at(&self, xi: Complex64) -> Complex64 {
        horner(&self.beta1, xi)
    }
}

fn horner(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, v| acc * x + v)
}

/// Where standard-form coefficients come from: compiled exact expressions or the numeric jet recursion.
#[derive(Clone, Debug)]
pub enum CoeffSource {
    Exact { alpha: Sign, b0: CompiledField, b1: CompiledField, big_b0: Vec<CompiledField>, big_b1: Vec<CompiledField> },
    Numeric { alpha: Sign, spec: Arc<ProblemSpec> },
}

impl CoeffSource {
    pub fn exact(c: &StandardFormCoeffs) -> Self {
        CoeffSource::Exact {
            alpha: c.alpha,
            b0: c.b0.compile(),
            b1: c.b1.compile(),
            big_b0: c.big_b0.iter().map(|f| f.compile()).collect(),
            big_b1: c.big_b1.iter().map(|f| f.compile()).collect(),
        }
    }

    /// Exact when the coefficients are rational, numeric otherwise.
    pub fn for_spec(spec: &Arc<ProblemSpec>, alpha: Sign) -> Result<Self> {
        if spec.is_rational() {
            let roots = crate::formal::wkb_recursion(spec, 1)?;
            Ok(Self::exact(&standard_form(spec, &roots, alpha)?))
        } else {
            Ok(CoeffSource::Numeric { alpha, spec: spec.clone() })
        }
    }

    pub fn alpha(&self) -> Sign {
        match self {
            CoeffSource::Exact { alpha, .. } | CoeffSource::Numeric { alpha, .. } => *alpha,
        }
    }

    /// Coefficients at `x`, with `r` the value of √D₀(x) on the frame's branch.
    pub fn at(&self, x: Complex64, r: Complex64) -> PointCoeffs {
        match self {
            CoeffSource::Exact { b0, b1, big_b0, big_b1, .. } => PointCoeffs {
                b0: b0.eval_with_sqrt(x, r),
                b1: b1.eval_with_sqrt(x, r),
                beta0: PointCoeffs::borel(&big_b0.iter().map(|f| f.eval_with_sqrt(x, r)).collect::<Vec<_>>()),
                beta1: PointCoeffs::borel(&big_b1.iter().map(|f| f.eval_with_sqrt(x, r)).collect::<Vec<_>>()),
            },
            CoeffSource::Numeric { alpha, spec } => {
                let jets = numeric_root_jets(spec, x, r, *alpha, 1, 1);
                let lambda = jets[0].value();
                let s1 = jets[1].value();
                let ds1 = jets[1].derivative_value(1);
                let (d, dd) = spec.d0_with_derivative(x);
                let er = r * alpha.value();
                let p1 = spec.p_k(1, x);
                let b0 = (spec.q_k(2, x) - spec.p_k(2, x) * lambda + s1 * s1 - ds1 - p1 * s1) / d;
                let b1 = (2.0 * s1 - p1 - dd / (2.0 * d)) / er;
                let deg = spec.hbar_degree();
                let mut big_b0 = Vec::new();
                let mut big_b1 = Vec::new();
                for k in 1..deg {
                    big_b0.push((spec.q_k(k + 2, x) - spec.p_k(k + 2, x) * lambda - spec.p_k(k + 1, x) * s1) / d);
                    big_b1.push(-spec.p_k(k + 1, x) / er);
                }
                while big_b0.last().is_some_and(|c| c.norm() == 0.0) && big_b1.last().is_some_and(|c| c.norm() == 0.0) {
                    big_b0.pop();
                    big_b1.pop();
                }
                PointCoeffs { b0, b1, beta0: PointCoeffs::borel(&big_b0), beta1: PointCoeffs::borel(&big_b1) }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::wkb_recursion;

    #[test]
    fn airy_standard_form() {
        let s = ProblemSpec::from_exprs("airy", "0", "-x").unwrap();
        let roots = wkb_recursion(&s, 3).unwrap();
        for alpha in [Sign::Plus, Sign::Minus] {
            let c = standard_form(&s, &roots, alpha).unwrap();
            let one = Complex64::new(1.0, 0.0);
            assert!((c.b0.eval_with_sqrt(one, 2.0 * one) - 5.0 / 64.0).norm() < 1e-15);
            assert!(c.b1.is_zero());
            assert!(c.big_b0.is_empty() && c.big_b1.is_empty());
            // s⁽²⁾ = −ε√D₀·b₀
            let er = FieldElement::sqrt_d0(&roots.d0).scale(&BigRational::from_integer(BigInt::from(alpha.value() as i64)));
            assert_eq!(roots.coeffs(alpha)[2], er.try_mul(&c.b0).unwrap().neg());
        }
    }

    #[test]
    fn numeric_matches_exact() {
        let s = Arc::new(ProblemSpec::from_exprs("w", "h*x", "-(x^2 - 4) - 2*h + h^3*x").unwrap());
        let x = Complex64::new(3.0, 0.5);
        let r = s.d0(x).sqrt();
        for alpha in [Sign::Plus, Sign::Minus] {
            let e = CoeffSource::for_spec(&s, alpha).unwrap().at(x, r);
            let n = CoeffSource::Numeric { alpha, spec: s.clone() }.at(x, r);
            assert!((e.b0 - n.b0).norm() < 1e-13);
            assert!((e.b1 - n.b1).norm() < 1e-13);
            assert_eq!(e.beta0.len(), n.beta0.len());
            for (a, b) in e.beta0.iter().zip(&n.beta0).chain(e.beta1.iter().zip(&n.beta1)) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }
}
