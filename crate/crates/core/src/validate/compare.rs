use num_complex::Complex64;
use serde::Serialize;

use super::oracle::direct_solve;
use crate::error::{Result, WkbError};
use crate::formal::FormalWkb;
use crate::laplace::{ExactRoot, PsiTable};

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub alpha: String,
    pub table: PsiTable,
    /// `oracle[i][m]` on the same points as the table.
    pub oracle: Vec<Vec<Complex64>>,
    pub max_rel_dev: Vec<f64>,
    /// Index of the seed point per ħ.
    pub seeds: Vec<usize>,
}

impl CompareReport {
    pub fn worst(&self) -> f64 {
        self.max_rel_dev.iter().cloned().fold(0.0, f64::max)
    }
}

/// ψ_α on x₀ + t(end − x₀) against the ODE solution carrying the same Cauchy data.
///
/// The oracle is seeded with (ψ_α, −s_αψ_α) at the sample where |ψ_α| is smallest and integrated outward from there,
/// so the dominant direction of the ODE never amplifies the seed error.
pub fn compare_exact(root: &ExactRoot, end: Complex64, ts: &[f64], hbars: &[Complex64], rtol: f64) -> Result<CompareReport> {
    let table = root.psi_on_segment(end, ts, hbars)?;
    let spec = root.frame().spec().clone();
    let n = table.points.len();
    let mut oracle = vec![vec![Complex64::new(0.0, 0.0); hbars.len()]; n];
    let mut devs = Vec::new();
    let mut seeds = Vec::new();
    for (m, &hb) in hbars.iter().enumerate() {
        let seed = (0..n).min_by(|&a, &b| table.psi[a][m].norm().total_cmp(&table.psi[b][m].norm())).unwrap();
        let xs = table.points[seed];
        let psi0 = table.psi[seed][m];
        let init = [psi0, -root.s(xs, hb)? * psi0];
        oracle[seed][m] = psi0;
        let fwd = direct_solve(&spec, &table.points[seed..], hb, init, rtol)?;
        for (k, s) in fwd.samples.iter().enumerate() {
            oracle[seed + k][m] = s.psi;
        }
        let back_path: Vec<Complex64> = table.points[..=seed].iter().rev().cloned().collect();
        let back = direct_solve(&spec, &back_path, hb, init, rtol)?;
        for (k, s) in back.samples.iter().enumerate() {
            oracle[seed - k][m] = s.psi;
        }
        let dev = (0..n).map(|i| (table.psi[i][m] - oracle[i][m]).norm() / oracle[i][m].norm()).fold(0.0, f64::max);
        devs.push(dev);
        seeds.push(seed);
    }
    Ok(CompareReport { alpha: root.alpha.label().to_string(), table, oracle, max_rel_dev: devs, seeds })
}

#[derive(Clone, Debug, Serialize)]
pub struct RiccatiResidual {
    pub points: Vec<Complex64>,
    pub hbars: Vec<Complex64>,
    /// |ħs′ − s² + ps − q| / (|s|² + |ps| + |q|).
    pub normalized: Vec<Vec<f64>>,
    pub max: f64,
}

/// Checks ħs′ = s² − ps + q for the resummed root, with s′ from a five-point stencil of step `delta` along the segment.
pub fn resummed_riccati_residual(root: &ExactRoot, points: &[Complex64], hbars: &[Complex64], delta: f64) -> Result<RiccatiResidual> {
    let spec = root.frame().spec().clone();
    let mut normalized = Vec::with_capacity(points.len());
    let mut max: f64 = 0.0;
    for &x in points {
        let dir = {
            let d = x - root.frame().x0();
            if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) }
        };
        let stencil: Vec<Complex64> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|k| x + dir * (k * delta)).collect();
        let samples = stencil.iter().map(|&y| root.sample(y)).collect::<Result<Vec<_>>>()?;
        let mut row = Vec::with_capacity(hbars.len());
        for &hb in hbars {
            let s: Vec<Complex64> = samples.iter().map(|smp| smp.s(hb, &root.opts)).collect::<Result<_>>()?;
            let ds = (s[0] - 8.0 * s[1] + 8.0 * s[3] - s[4]) / (12.0 * delta * dir);
            let p = spec.p_eval(x, hb);
            let q = spec.q_eval(x, hb);
            let sc = s[2];
            let res = (hb * ds - sc * sc + p * sc - q).norm() / (sc.norm_sqr() + (p * sc).norm() + q.norm());
            max = max.max(res);
            row.push(res);
        }
        normalized.push(row);
    }
    Ok(RiccatiResidual { points: points.to_vec(), hbars: hbars.to_vec(), normalized, max })
}

#[derive(Clone, Debug, Serialize)]
pub struct RemainderScan {
    pub x: Complex64,
    pub hbars: Vec<Complex64>,
    /// `remainders[n][m]` = |Ψ_α − Σ_{k<n} Ψ_kħᵏ| at hbars[m].
    pub remainders: Vec<Vec<f64>>,
    /// Least-squares slope of log remainder against log|ħ|, per n; None when every point is below the noise floor.
    pub slopes: Vec<Option<f64>>,
    /// Intercepts log C_n of the same fits.
    pub log_c: Vec<Option<f64>>,
    pub excluded: Vec<Vec<bool>>,
}

fn slope_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let b = sxy / sxx;
    Some((b, my - b * mx))
}

/// Remainders of the truncated formal series Ψ̂_α at `formal.xgrid[i]` against the resummed Ψ_α = ψ_α e^{Φ_α/ħ}.
pub fn remainder_scan(formal: &FormalWkb, root: &ExactRoot, i: usize, n_max: usize, hbars: &[Complex64]) -> Result<RemainderScan> {
    if (formal.x0 - root.frame().x0()).norm() > 1e-14 || formal.alpha != root.alpha {
        return Err(WkbError::InvalidParameter("formal series and resummed root use different base data".into()));
    }
    let coeffs = &formal.psi[i];
    if n_max >= coeffs.len() {
        return Err(WkbError::InvalidParameter(format!("n_max {n_max} exceeds available order {}", coeffs.len() - 1)));
    }
    let x = formal.xgrid[i];
    let table = root.psi_on_segment(x, &[1.0], hbars)?;
    let mut remainders = vec![Vec::new(); n_max + 1];
    let mut excluded = vec![Vec::new(); n_max + 1];
    for (m, &hb) in hbars.iter().enumerate() {
        let big = table.psi[0][m] * (formal.exponent[i] / hb).exp();
        let floor = 1e2 * f64::EPSILON * big.norm();
        let mut partial = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for n in 0..=n_max {
            let r = (big - partial).norm();
            remainders[n].push(r);
            excluded[n].push(r <= floor);
            partial += coeffs[n] * pw;
            pw *= hb;
        }
    }
    let mut slopes = Vec::new();
    let mut log_c = Vec::new();
    for n in 0..=n_max {
        let pts: Vec<(f64, f64)> = hbars
            .iter()
            .zip(&remainders[n])
            .zip(&excluded[n])
            .filter(|(_, e)| !**e)
            .map(|((h, r), _)| (h.norm().ln(), r.ln()))
            .collect();
        match slope_fit(&pts) {
            Some((b, a)) => {
                slopes.push(Some(b));
                log_c.push(Some(a));
            }
            None => {
                slopes.push(None);
                log_c.push(None);
            }
        }
    }
    Ok(RemainderScan { x, hbars: hbars.to_vec(), remainders, slopes, log_c, excluded })
}
