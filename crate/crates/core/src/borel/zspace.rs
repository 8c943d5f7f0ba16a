use num_complex::Complex64;

use super::grid::{apply_i, convolve, grid_coeffs, BorelField, ConvergenceReport, GridParams, Tri};
use super::standard::CoeffSource;
use crate::error::{Result, WkbError};
use crate::geometry::LiouvilleFrame;

/// The same Borel function from successive approximations in the rotated coordinates (z, ξ′), ξ = e^{iθ}ξ′.
///
/// With φ = e^{2iθ}τ the equation reads φ = −a₀(z + ξ′) + I′[α₀ + a₁φ + α₁∗φ + φ∗φ] with a real step;
/// nodes are produced by separate flow runs from the base point.
pub fn successive_approx_check(src: &CoeffSource, frame: &LiouvilleFrame, x: Complex64, grid: &GridParams) -> Result<BorelField> {
    let alpha = src.alpha();
    let theta = frame.theta();
    let rot = Complex64::from_polar(1.0, theta);
    let eps = alpha.value();
    let bases = grid.extra_bases + 1;
    let r = frame.sqrt_at(x)?;
    let count = bases + grid.n;
    let mut nodes = Vec::with_capacity(count);
    for m in 0..count {
        nodes.push(frame.flow_from(x, r, rot * (eps * grid.h * m as f64))?);
    }
    let h = Complex64::new(grid.h, 0.0);
    let gc = grid_coeffs(src, &nodes, bases, grid.n, rot * grid.h, rot * rot * rot);
    let alpha1 = gc.beta1.map(|mut b| {
        for v in b.rows.iter_mut().flatten() {
            *v /= rot;
        }
        b
    });
    let a0: Vec<Complex64> = gc.b0.iter().map(|b| rot * rot * b).collect();
    let a1: Vec<Complex64> = gc.b1.iter().map(|b| rot * b).collect();
    let mut phi0 = Tri::zeros(bases, grid.n);
    for (j, row) in phi0.rows.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = -a0[j + k];
        }
    }
    let mut phi = phi0.clone();
    let mut diffs = Vec::new();
    let mut converged = false;
    for _ in 0..grid.max_terms.max(200) {
        let mut g = phi.mul_nodes(&a1);
        if let Some(b) = &gc.beta0 {
            g.add_assign(b);
        }
        if let Some(b) = &alpha1 {
            g.add_assign(&convolve(b, &phi, h)?);
        }
        g.add_assign(&convolve(&phi, &phi, h)?);
        let mut next = apply_i(&g, h);
        next.add_assign(&phi0);
        let d = next.max_diff(&phi);
        diffs.push(d);
        phi = next;
        if d <= 1e-14 * phi.sup_norm().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        if !d.is_finite() {
            return Err(WkbError::Divergence { terms: diffs.len(), ratio: f64::INFINITY });
        }
    }
    if !converged {
        return Err(WkbError::NotConverged { terms: diffs.len(), last: *diffs.last().unwrap_or(&0.0) });
    }
    let back = (rot * rot).inv();
    for v in phi.rows.iter_mut().flatten() {
        *v *= back;
    }
    let (xs, rs): (Vec<_>, Vec<_>) = nodes.into_iter().unzip();
    let ratio = if diffs.len() > 1 { diffs[diffs.len() - 1] / diffs[diffs.len() - 2] } else { 0.0 };
    Ok(BorelField {
        theta,
        alpha,
        h: grid.h,
        n: grid.n,
        bases,
        nodes: xs,
        roots: rs,
        tau: phi,
        report: ConvergenceReport { terms_used: diffs.len(), term_norms: diffs, ratio, converged },
    })
}
