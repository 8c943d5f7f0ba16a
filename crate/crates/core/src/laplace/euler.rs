//! The Euler series Ê(x, ħ) = Σ (−1)ᵏ k! ħ^{k+1}/x^{k+1} and its Borel sum E(x, ħ) = ∫₀^∞ e^{−ξ/ħ}/(x+ξ) dξ.

use num_complex::Complex64;

use super::transform::{laplace_transform, LaplaceOptions};
use crate::error::Result;
use crate::quad::integrate;

/// E(x, ħ) through the Laplace stage: σ = 1/(x+ξ) sampled on a uniform grid of step `h` up to Ξ.
pub fn euler_laplace(x: f64, hbar: f64, h: f64, xi_max: f64, opts: &LaplaceOptions) -> Result<f64> {
    let n = (xi_max / h).round() as usize;
    let vals: Vec<Complex64> = (0..=n).map(|k| Complex64::new(1.0 / (x + k as f64 * h), 0.0)).collect();
    Ok(laplace_transform(&vals, h, 0.0, Complex64::new(hbar, 0.0), opts)?.value.re)
}

/// E(x, ħ) by adaptive quadrature after mapping [0, ∞) to [0, 1).
pub fn euler_reference(x: f64, hbar: f64) -> Result<f64> {
    let v = integrate(
        |t| {
            if t >= 1.0 {
                return Complex64::new(0.0, 0.0);
            }
            let xi = t / (1.0 - t);
            let jac = 1.0 / ((1.0 - t) * (1.0 - t));
            Complex64::new((-xi / hbar).exp() / (x + xi) * jac, 0.0)
        },
        0.0,
        1.0,
        1e-14,
        1e-300,
    )?;
    Ok(v.re)
}

/// Leading asymptotic coefficients c₁ … c_K of f(ħ) ~ Σ cₖħᵏ from samples at ħ_i = ħ₀/2ⁱ:
/// each cₖ is the Richardson limit of (f − Σ_{j<k} c_jħʲ)/ħᵏ.
pub fn richardson_coefficients(f: impl Fn(f64) -> Result<f64>, hbar0: f64, levels: usize, count: usize) -> Result<Vec<f64>> {
    let hs: Vec<f64> = (0..levels).map(|i| hbar0 / 2f64.powi(i as i32)).collect();
    let vals: Vec<f64> = hs.iter().map(|h| f(*h)).collect::<Result<_>>()?;
    let mut coeffs: Vec<f64> = Vec::with_capacity(count);
    for k in 1..=count {
        let mut t: Vec<f64> = hs
            .iter()
            .zip(&vals)
            .map(|(h, v)| {
                let known: f64 = coeffs.iter().enumerate().map(|(j, c)| c * h.powi(j as i32 + 1)).sum();
                (v - known) / h.powi(k as i32)
            })
            .collect();
        // Neville extrapolation to ħ = 0 of a function with a regular power series in ħ.
        for m in 1..t.len() {
            let f = 2f64.powi(m as i32);
            for i in (m..t.len()).rev() {
                t[i] = (f * t[i] - t[i - 1]) / (f - 1.0);
            }
        }
        coeffs.push(*t.last().unwrap());
    }
    Ok(coeffs)
}
