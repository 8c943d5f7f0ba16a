use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use super::roots::FormalRoots;
use crate::coeffield::{FieldElement, Sign};
use crate::error::{Result, WkbError};
use crate::geometry::LiouvilleFrame;

/// Numeric tables of the formal WKB solution ψ̂_α = exp(−(1/ħ)Φ_α) Σ Ψ⁽ⁿ⁾ħⁿ, normalised at x₀.
#[derive(Clone, Debug, Serialize)]
pub struct FormalWkb {
    pub alpha: Sign,
    pub x0: Complex64,
    pub xgrid: Vec<Complex64>,
    /// Φ_α(x) = ∫ₓ₀ˣ λ_α.
    pub exponent: Vec<Complex64>,
    /// `psi[i][n]` is Ψ⁽ⁿ⁾ at `xgrid[i]`, n = 0 … K−1.
    pub psi: Vec<Vec<Complex64>>,
}

/// exp of a power series with `a[0] = 0`: n·eₙ = Σ k·aₖ·e_{n−k}.
pub fn series_exp(a: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); a.len()];
    if a.is_empty() {
        return e;
    }
    e[0] = Complex64::new(1.0, 0.0);
    for n in 1..a.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            acc += a[k] * e[n - k] * k as f64;
        }
        e[n] = acc / n as f64;
    }
    e
}

/// Ψ_α⁽ⁿ⁾ on `xgrid` by path quadrature of Ŝ_α = Σ s_α⁽ᵏ⁺¹⁾ħᵏ along straight segments from x₀.
pub fn formal_wkb(roots: &FormalRoots, frame: &LiouvilleFrame, alpha: Sign, xgrid: &[Complex64]) -> Result<FormalWkb> {
    let coeffs = roots.coeffs(alpha);
    let k_max = roots.order;
    if k_max == 0 {
        return Err(WkbError::InvalidParameter("formal_wkb needs K >= 1".into()));
    }
    let x0 = frame.x0();
    let compiled: Vec<_> = coeffs.iter().map(|c| c.compile_at(x0.re)).collect();
    let mut exponent = Vec::with_capacity(xgrid.len());
    let mut psi = Vec::with_capacity(xgrid.len());
    for &x in xgrid {
        let (ints, _) = frame.integrate_path(&[x0, x], frame.sqrt_x0(), k_max + 1, 1e-12, |t, r, out| {
            for (o, c) in out.iter_mut().zip(&compiled) {
                *o = c.eval_with_sqrt(t, r);
            }
        })?;
        exponent.push(ints[0]);
        let mut a: Vec<Complex64> = ints[1..].iter().map(|v| -v).collect();
        let lead = a[0].exp();
        a[0] = Complex64::new(0.0, 0.0);
        psi.push(series_exp(&a).into_iter().map(|v| v * lead).collect());
    }
    Ok(FormalWkb { alpha, x0, xgrid: xgrid.to_vec(), exponent, psi })
}

#[derive(Clone, Debug, Serialize)]
pub struct GevreyFit {
    /// sup over the sample set of |Ψ⁽ᵏ⁾|.
    pub sup_norms: Vec<f64>,
    pub log_c: f64,
    pub m: f64,
    /// Largest |log(sup/k!) − (log C + k log M)| over the fitted orders.
    pub max_residual: f64,
    pub fitted_orders: Vec<usize>,
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Least-squares fit of log(sup|Ψ⁽ᵏ⁾|/k!) ≈ log C + k log M over orders with nonzero sup-norm.
pub fn gevrey_probe(wkb: &FormalWkb) -> GevreyFit {
    let n = wkb.psi.first().map_or(0, |p| p.len());
    let sup_norms: Vec<f64> = (0..n).map(|k| wkb.psi.iter().map(|p| p[k].norm()).fold(0.0, f64::max)).collect();
    let pts: Vec<(usize, f64)> = sup_norms
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.0)
        .map(|(k, s)| (k, s.ln() - ln_factorial(k)))
        .collect();
    let fitted_orders: Vec<usize> = pts.iter().map(|p| p.0).collect();
    if pts.len() < 2 {
        return GevreyFit { sup_norms, log_c: pts.first().map_or(f64::NEG_INFINITY, |p| p.1), m: 0.0, max_residual: 0.0, fitted_orders };
    }
    let np = pts.len() as f64;
    let mk = pts.iter().map(|p| p.0 as f64).sum::<f64>() / np;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / np;
    let sxy: f64 = pts.iter().map(|p| (p.0 as f64 - mk) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 as f64 - mk).powi(2)).sum();
    let slope = sxy / sxx;
    let log_c = my - slope * mk;
    let max_residual = pts.iter().map(|p| (p.1 - log_c - slope * p.0 as f64).abs()).fold(0.0, f64::max);
    GevreyFit { sup_norms, log_c, m: slope.exp(), max_residual, fitted_orders }
}

/// ξ-Taylor coefficients s_α⁽ᵏ⁺²⁾/k! of σ̂_α = B̂[Ŝ_α − s_α⁽¹⁾].
pub fn formal_borel(roots: &FormalRoots, alpha: Sign) -> Result<Vec<FieldElement>> {
    let s = roots.coeffs(alpha);
    if s.len() < 3 {
        return Err(WkbError::InvalidParameter("formal_borel needs K >= 2".into()));
    }
    let mut fact = BigInt::from(1);
    let mut out = Vec::with_capacity(s.len() - 2);
    for (k, c) in s[2..].iter().enumerate() {
        if k > 0 {
            fact *= k;
        }
        out.push(c.scale(&BigRational::new(1.into(), fact.clone())));
    }
    Ok(out)
}

/// Borel transform of Σ cₖ ħ^{k+1}: the ξ-Taylor coefficients cₖ/k!.
pub fn borel_coefficients(c: &[f64]) -> Vec<f64> {
    let mut f = 1.0;
    c.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 0 {
                f *= k as f64;
            }
            v / f
        })
        .collect()
}

/// Coefficients of the Euler series Ê(x, ħ) = Σ (−1)ᵏ k! ħ^{k+1}/x^{k+1}.
pub fn euler_series(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 1.0 / x;
    for k in 0..n {
        out.push(c);
        c *= -((k + 1) as f64) / x;
    }
    out
}

/// `{"a": ..., "b": ...}` in the coefficient grammar.
pub fn field_json(e: &FieldElement) -> Value {
    json!({ "a": e.a.to_string(), "b": e.b.to_string() })
}

/// JSON table of both coefficient sequences.
pub fn roots_json(roots: &FormalRoots) -> Value {
    json!({
        "order": roots.order,
        "d0": roots.d0.to_string(),
        "plus": roots.plus.iter().map(field_json).collect::<Vec<_>>(),
        "minus": roots.minus.iter().map(field_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::formal::{wkb_recursion, ProblemSpec};

    #[test]
    fn airy_leading_amplitude() {
        let s = Arc::new(ProblemSpec::from_exprs("airy", "0", "-x").unwrap());
        let roots = wkb_recursion(&s, 6).unwrap();
        let f = LiouvilleFrame::new(s, Complex64::new(1.0, 0.0), Sign::Plus, 0.0).unwrap();
        let xs: Vec<Complex64> = [1.0, 1.5, 2.0, 3.0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let w = formal_wkb(&roots, &f, Sign::Plus, &xs).unwrap();
        assert!((w.psi[0][0] - 1.0).norm() < 1e-14);
        assert!(w.psi[0][1..].iter().all(|v| v.norm() < 1e-14));
        for (x, p) in xs.iter().zip(&w.psi) {
            assert!((p[0] - x.powf(-0.25)).norm() < 1e-11);
        }
        // Φ₊ = ∫ √t = (2/3)(x^{3/2} − 1)
        assert!((w.exponent[2].re - (2.0 / 3.0) * (2f64.powf(1.5) - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn constant_potential_is_trivial() {
        let s = Arc::new(ProblemSpec::from_exprs("c", "0", "-1").unwrap());
        let roots = wkb_recursion(&s, 5).unwrap();
        let f = LiouvilleFrame::new(s, Complex64::new(0.0, 0.0), Sign::Plus, 0.0).unwrap();
        let w = formal_wkb(&roots, &f, Sign::Minus, &[Complex64::new(2.0, 1.0)]).unwrap();
        assert!((w.psi[0][0] - 1.0).norm() < 1e-14);
        assert!(w.psi[0][1..].iter().all(|v| v.norm() == 0.0));
        assert!(gevrey_probe(&w).sup_norms[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn airy_borel_value() {
        let s = ProblemSpec::from_exprs("airy", "0", "-x").unwrap();
        let roots = wkb_recursion(&s, 4).unwrap();
        let b = formal_borel(&roots, Sign::Plus).unwrap();
        let v = b[0].eval_with_sqrt(Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0));
        assert!((v + 5.0 / 32.0).norm() < 1e-15);
    }

    #[test]
    fn euler_borel_is_geometric() {
        let b = borel_coefficients(&euler_series(2.0, 8));
        for (k, v) in b.iter().enumerate() {
            assert!((v - (-1f64).powi(k as i32) / 2f64.powi(k as i32 + 1)).abs() < 1e-15);
        }
    }
}
