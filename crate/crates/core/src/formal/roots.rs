use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::problem::ProblemSpec;
use crate::coeffield::{rat, FieldElement, RationalFunction, Sign};
use crate::error::Result;

/// D₀ and the leading characteristic roots λ± = (p₀ ± √D₀)/2.
#[derive(Clone, Debug)]
pub struct CharacteristicData {
    pub d0: Arc<RationalFunction>,
    pub lambda_plus: FieldElement,
    pub lambda_minus: FieldElement,
}

pub fn characteristic_data(spec: &ProblemSpec) -> Result<CharacteristicData> {
    let ex = spec.require_exact()?;
    let d0 = ex.d0.clone();
    let half = rat(1, 2);
    let p0 = ex.p.first().cloned().unwrap_or_else(RationalFunction::zero).scale(&half);
    let root = RationalFunction::constant(half);
    let lambda_plus = FieldElement::new(p0.clone(), root.clone(), &d0);
    let lambda_minus = FieldElement::new(p0, -&root, &d0);
    Ok(CharacteristicData { d0, lambda_plus, lambda_minus })
}

/// Exact coefficients s±⁽⁰⁾ … s±⁽ᴷ⁾ of the formal characteristic roots.
#[derive(Clone, Debug)]
pub struct FormalRoots {
    pub order: usize,
    pub d0: Arc<RationalFunction>,
    pub plus: Vec<FieldElement>,
    pub minus: Vec<FieldElement>,
}

impl FormalRoots {
    pub fn coeffs(&self, alpha: Sign) -> &[FieldElement] {
        match alpha {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }
}

fn field_coeff(c: &[RationalFunction], k: usize, d0: &Arc<RationalFunction>) -> FieldElement {
    FieldElement::from_rational(c.get(k).cloned().unwrap_or_else(RationalFunction::zero), d0)
}

fn recursion_one(spec: &ProblemSpec, lambda: &FieldElement, alpha: Sign, order: usize) -> Result<Vec<FieldElement>> {
    let ex = spec.require_exact()?;
    let d0 = &ex.d0;
    // 1/(ε√D₀) = ε√D₀/D₀
    let inv_root = FieldElement::new(
        RationalFunction::zero(),
        ex.d0.inverse()?.scale(&BigRational::from_integer(BigInt::from(alpha.value() as i64))),
        d0,
    );
    let mut s = vec![lambda.clone()];
    for k in 1..=order {
        let mut acc = s[k - 1].derivative();
        for i in 1..k {
            acc = acc.try_sub(&s[i].try_mul(&s[k - i])?)?;
        }
        for i in 1..=k {
            let p = field_coeff(&ex.p, i, d0);
            if !p.is_zero() {
                acc = acc.try_add(&p.try_mul(&s[k - i])?)?;
            }
        }
        acc = acc.try_sub(&field_coeff(&ex.q, k, d0))?;
        s.push(acc.try_mul(&inv_root)?);
    }
    Ok(s)
}

/// Solve the Riccati recursion exactly to order K for both roots.
pub fn wkb_recursion(spec: &ProblemSpec, order: usize) -> Result<FormalRoots> {
    let cd = characteristic_data(spec)?;
    let plus = recursion_one(spec, &cd.lambda_plus, Sign::Plus, order)?;
    let minus = recursion_one(spec, &cd.lambda_minus, Sign::Minus, order)?;
    Ok(FormalRoots { order, d0: cd.d0, plus, minus })
}

/// Coefficients of ħ∂ₓŝ − (ŝ² − p̂ŝ + q̂) through ħᴷ for the order-K truncation.
pub fn riccati_residual(spec: &ProblemSpec, s: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let ex = spec.require_exact()?;
    let d0 = &ex.d0;
    let k_max = s.len() - 1;
    let mut out = Vec::with_capacity(k_max + 1);
    for m in 0..=k_max {
        let mut r = if m > 0 { s[m - 1].derivative() } else { FieldElement::zero(d0) };
        for i in 0..=m {
            r = r.try_sub(&s[i].try_mul(&s[m - i])?)?;
            let p = field_coeff(&ex.p, i, d0);
            if !p.is_zero() {
                r = r.try_add(&p.try_mul(&s[m - i])?)?;
            }
        }
        r = r.try_sub(&field_coeff(&ex.q, m, d0))?;
        out.push(r);
    }
    Ok(out)
}

/// Odd and even parts ŝ_od = (ŝ₊ − ŝ₋)/2, ŝ_ev = (ŝ₊ + ŝ₋)/2.
pub fn odd_even(roots: &FormalRoots) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
    let half = rat(1, 2);
    let mut od = Vec::new();
    let mut ev = Vec::new();
    for (a, b) in roots.plus.iter().zip(&roots.minus) {
        od.push(a.try_sub(b)?.scale(&half));
        ev.push(a.try_add(b)?.scale(&half));
    }
    Ok((od, ev))
}

/// Logarithmic derivative ∂ₓ log ŝ as a formal series in ħ (same length as the input).
pub fn log_derivative_series(s: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let s0 = &s[0];
    let inv0 = s0.inverse()?;
    let u: Vec<FieldElement> = s.iter().map(|c| c.try_mul(&inv0)).collect::<Result<_>>()?;
    // log(1+u) = Σ L_n ħⁿ with n·L_n = n·u_n − Σ_{k=1}^{n−1} k·L_k·u_{n−k}
    let mut l: Vec<FieldElement> = vec![FieldElement::zero(s0.d0())];
    for n in 1..s.len() {
        let mut acc = u[n].scale(&BigRational::from_integer(BigInt::from(n)));
        for k in 1..n {
            let t = l[k].try_mul(&u[n - k])?.scale(&BigRational::from_integer(BigInt::from(k)));
            acc = acc.try_sub(&t)?;
        }
        l.push(acc.scale(&rat(1, n as i64)));
    }
    let mut out = vec![s0.derivative().try_mul(&inv0)?];
    for ln in l.iter().skip(1) {
        out.push(ln.derivative());
    }
    Ok(out)
}

/// Coefficients of ŝ_ev − ½ħ∂ₓlog ŝ_od − ½p̂ through ħᴷ.
pub fn even_part_residual(spec: &ProblemSpec, roots: &FormalRoots) -> Result<Vec<FieldElement>> {
    let ex = spec.require_exact()?;
    let (od, ev) = odd_even(roots)?;
    let dlog = log_derivative_series(&od)?;
    let half = rat(1, 2);
    let mut out = Vec::new();
    for m in 0..ev.len() {
        let mut r = ev[m].try_sub(&field_coeff(&ex.p, m, &roots.d0).scale(&half))?;
        if m > 0 {
            r = r.try_sub(&dlog[m - 1].scale(&half))?;
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffield::Poly;

    fn airy() -> ProblemSpec {
        ProblemSpec::from_exprs("airy", "0", "-x").unwrap()
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_i64(n), Poly::from_i64(d)).unwrap()
    }

    #[test]
    fn airy_low_orders() {
        let r = wkb_recursion(&airy(), 3).unwrap();
        let quarter = rf(&[1], &[0, 4]);
        for s in [&r.plus, &r.minus] {
            assert_eq!(s[1].a, quarter);
            assert!(s[1].b.is_zero());
        }
        // s⁽²⁾ = ∓5/(32 x^{5/2}) = ∓(5/(64x³))·2√x
        let b2 = RationalFunction::new(Poly::from_i64(&[5]), Poly::from_i64(&[0, 0, 0, 64])).unwrap();
        assert!(r.plus[2].a.is_zero());
        assert_eq!(r.plus[2].b, -&b2);
        assert_eq!(r.minus[2].b, b2);
        let c3 = r.plus[3].a.clone();
        assert_eq!(c3, rf(&[15], &[0, 0, 0, 0, 64]));
    }

    #[test]
    fn constant_potential_has_no_corrections() {
        let s = ProblemSpec::from_exprs("const", "0", "-1").unwrap();
        let r = wkb_recursion(&s, 6).unwrap();
        assert!(r.plus.iter().skip(1).all(|c| c.is_zero()));
        assert!(r.minus.iter().skip(1).all(|c| c.is_zero()));
    }

    #[test]
    fn residual_and_even_identity_vanish() {
        let s = ProblemSpec::from_exprs("t", "x", "x^2 + h*x - 1").unwrap();
        let r = wkb_recursion(&s, 5).unwrap();
        assert!(riccati_residual(&s, &r.plus).unwrap().iter().all(|c| c.is_zero()));
        assert!(even_part_residual(&s, &r).unwrap().iter().all(|c| c.is_zero()));
    }
}
