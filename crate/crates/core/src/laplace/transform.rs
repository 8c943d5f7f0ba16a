use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WkbError};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaplaceOptions {
    /// Largest acceptable tail bound.
    pub tol: f64,
    /// δ = factor / L for the fitted exponential type L.
    pub delta_factor: f64,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        LaplaceOptions { tol: 1e-8, delta_factor: 0.9 }
    }
}

/// Fitted bound |σ(u)| ≤ A·e^{Lu} along the ray.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExpFit {
    pub a: f64,
    pub l: f64,
}

/// L from a least-squares slope of log|σ| over the outer half of the grid, then the smallest A that bounds every sample.
pub fn fit_exponential_type(sigma: &[Complex64], h: f64) -> ExpFit {
    let n = sigma.len();
    let pts: Vec<(f64, f64)> = (n / 2..n)
        .filter(|&k| sigma[k].norm() > 0.0)
        .map(|k| (k as f64 * h, sigma[k].norm().ln()))
        .collect();
    let l = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let mu = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mu) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mu).powi(2)).sum();
        (sxy / sxx).max(0.0)
    } else {
        0.0
    };
    let a = sigma.iter().enumerate().map(|(k, v)| v.norm() * (-l * k as f64 * h).exp()).fold(0.0, f64::max);
    ExpFit { a, l }
}

/// ∫₀¹ e^{−wt} tʲ dt for j = 0, 1, 2.
pub fn moments(w: Complex64) -> [Complex64; 3] {
    if w.norm() < 1.0 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (j, o) in out.iter_mut().enumerate() {
            let mut term = Complex64::new(1.0, 0.0);
            for m in 0..40 {
                *o += term / (j + m + 1) as f64;
                term *= -w / (m + 1) as f64;
            }
        }
        out
    } else {
        let e = (-w).exp();
        let i0 = (1.0 - e) / w;
        let i1 = (i0 - e) / w;
        let i2 = (2.0 * i1 - e) / w;
        [i0, i1, i2]
    }
}

/// ∫ e^{−ξ/ħ}σ(ξ)dξ over ξ = e^{iθ}u, u ∈ [0, (len−1)h], with σ interpolated quadratically per panel
/// and the exponential integrated exactly.
pub fn fitted_simpson(values: &[Complex64], h: f64, theta: f64, hbar: Complex64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, theta);
    let z = rot / hbar;
    let n = values.len().saturating_sub(1);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut k = 0;
    while k + 2 <= n {
        let hh = 2.0 * h;
        let [i0, i1, i2] = moments(z * hh);
        let w0 = (2.0 * i2 - 3.0 * i1 + i0) * hh;
        let w1 = (4.0 * i1 - 4.0 * i2) * hh;
        let w2 = (2.0 * i2 - i1) * hh;
        acc += (-z * (k as f64 * h)).exp() * (w0 * values[k] + w1 * values[k + 1] + w2 * values[k + 2]);
        k += 2;
    }
    if k < n {
        let [i0, i1, _] = moments(z * h);
        acc += (-z * (k as f64 * h)).exp() * ((i0 - i1) * h * values[k] + i1 * h * values[k + 1]);
    }
    acc * rot
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LaplaceValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Laplace transform along the grid with the disc check Re(e^{iθ}/ħ) > L/δ-factor and the tail bound A·e^{(L−c)Ξ}/(c−L).
pub fn laplace_transform(values: &[Complex64], h: f64, theta: f64, hbar: Complex64, opts: &LaplaceOptions) -> Result<LaplaceValue> {
    let fit = fit_exponential_type(values, h);
    laplace_with_fit(values, h, theta, hbar, fit, opts)
}

pub fn laplace_with_fit(values: &[Complex64], h: f64, theta: f64, hbar: Complex64, fit: ExpFit, opts: &LaplaceOptions) -> Result<LaplaceValue> {
    let c = (Complex64::from_polar(1.0, theta) / hbar).re;
    let bound = fit.l / opts.delta_factor;
    if !(c > bound) {
        return Err(WkbError::OutsideBorelDisc { hbar, c, bound });
    }
    let xi_max = (values.len().saturating_sub(1)) as f64 * h;
    let tail_bound = fit.a * ((fit.l - c) * xi_max).exp() / (c - fit.l);
    if tail_bound > opts.tol {
        return Err(WkbError::TailTooLarge { bound: tail_bound, tol: opts.tol });
    }
    Ok(LaplaceValue { value: fitted_simpson(values, h, theta, hbar), tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_agree_across_branches() {
        for w in [Complex64::new(0.999, 0.0), Complex64::new(0.3, 0.95)] {
            let a = moments(w);
            let b = moments(w * 1.0000001);
            for j in 0..3 {
                assert!((a[j] - b[j]).norm() < 1e-6);
            }
        }
        let m = moments(Complex64::new(1.5, 0.0));
        let e = (-1.5f64).exp();
        assert!((m[0].re - (1.0 - e) / 1.5).abs() < 1e-15);
    }

    #[test]
    fn exponential_integrated_exactly() {
        // σ = 1 + ξ + ξ²: quadratic, so the rule is exact on the truncated interval.
        let h = 0.1;
        let vals: Vec<Complex64> = (0..=40).map(|k| {
            let u = k as f64 * h;
            Complex64::new(1.0 + u + u * u, 0.0)
        }).collect();
        let hbar = Complex64::new(0.5, 0.0);
        let got = fitted_simpson(&vals, h, 0.0, hbar);
        let exact = crate::quad::integrate(|u| Complex64::new((1.0 + u + u * u) * (-u / 0.5).exp(), 0.0), 0.0, 4.0, 1e-14, 0.0).unwrap();
        assert!((got - exact).norm() < 1e-13);
    }

    #[test]
    fn disc_is_enforced() {
        let vals: Vec<Complex64> = (0..=100).map(|k| Complex64::new((0.05 * k as f64 * 2.0).exp(), 0.0)).collect();
        let r = laplace_transform(&vals, 0.05, 0.0, Complex64::new(1.0, 0.0), &LaplaceOptions::default());
        assert!(matches!(r, Err(WkbError::OutsideBorelDisc { .. })));
    }
}
