use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, WkbError};
use crate::formal::ProblemSpec;
use crate::ode::{Control, Dp45, OdeStats, OdeSystem};
use crate::quad::integrate;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleSample {
    pub x: Complex64,
    pub psi: Complex64,
    /// ħ∂ₓψ.
    pub dpsi: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OdeOracleResult {
    pub hbar: Complex64,
    /// One sample per polyline vertex.
    pub samples: Vec<OracleSample>,
    pub stats: OdeStats,
    pub rtol: f64,
}

impl OdeOracleResult {
    pub fn last(&self) -> OracleSample {
        *self.samples.last().unwrap()
    }
}

struct Segment<'a> {
    spec: &'a ProblemSpec,
    a: Complex64,
    u: Complex64,
    hbar: Complex64,
}

impl OdeSystem for Segment<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let x = self.a + self.u * t;
        let p = self.spec.p_eval(x, self.hbar);
        let q = self.spec.q_eval(x, self.hbar);
        dy[0] = self.u * y[1] / self.hbar;
        dy[1] = -self.u * (p * y[1] + q * y[0]) / self.hbar;
    }
}

/// Integrates ∂ₓ(ψ, φ) = (φ/ħ, −(pφ + qψ)/ħ), φ = ħψ′, along a polyline parameterised by arclength.
pub fn direct_solve(spec: &ProblemSpec, path: &[Complex64], hbar: Complex64, init: [Complex64; 2], rtol: f64) -> Result<OdeOracleResult> {
    if hbar.norm() == 0.0 {
        return Err(WkbError::InvalidParameter("hbar must be nonzero".into()));
    }
    if path.is_empty() {
        return Err(WkbError::InvalidParameter("empty path".into()));
    }
    // Linear system: solve from unit-size data so atol stays meaningful for tiny or huge ψ.
    let scale = init[0].norm().max(init[1].norm());
    if scale == 0.0 {
        let samples = path.iter().map(|&x| OracleSample { x, psi: init[0], dpsi: init[1] }).collect();
        return Ok(OdeOracleResult { hbar, samples, stats: OdeStats::default(), rtol });
    }
    let solver = Dp45::with_tolerances(rtol, 1e-14);
    let mut y = vec![init[0] / scale, init[1] / scale];
    let mut samples = vec![OracleSample { x: path[0], psi: init[0], dpsi: init[1] }];
    let mut stats = OdeStats { min_step: f64::INFINITY, ..Default::default() };
    for w in path.windows(2) {
        let len = (w[1] - w[0]).norm();
        if len > 0.0 {
            let mut sys = Segment { spec, a: w[0], u: (w[1] - w[0]) / len, hbar };
            let (_, yy, st) = solver.integrate(&mut sys, 0.0, &y, len, |_, _| Control::Continue)?;
            y = yy;
            stats.steps += st.steps;
            stats.rejected += st.rejected;
            stats.evaluations += st.evaluations;
            stats.min_step = stats.min_step.min(st.min_step);
            stats.max_error = stats.max_error.max(st.max_error);
        }
        samples.push(OracleSample { x: w[1], psi: y[0] * scale, dpsi: y[1] * scale });
    }
    Ok(OdeOracleResult { hbar, samples, stats, rtol })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferMatrix {
    pub hbar: Complex64,
    /// Maps (ψ, ħψ′) at the start of the path to the end.
    pub m: [[Complex64; 2]; 2],
    pub det: Complex64,
    /// exp(−(1/ħ)∫p dx) along the path.
    pub abel: Complex64,
    pub abel_rel_err: f64,
    /// Larger eigenvalue from the trace, smaller one from det = abel.
    pub eigenvalues: [Complex64; 2],
}

/// ∫p(x, ħ)dx along a polyline.
pub fn path_integral_p(spec: &ProblemSpec, path: &[Complex64], hbar: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for w in path.windows(2) {
        let d = w[1] - w[0];
        acc += integrate(|t| spec.p_eval(w[0] + d * t, hbar) * d, 0.0, 1.0, 1e-13, 1e-300)?;
    }
    Ok(acc)
}

pub fn transfer_matrix(spec: &ProblemSpec, path: &[Complex64], hbar: Complex64, rtol: f64) -> Result<TransferMatrix> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let c1 = direct_solve(spec, path, hbar, [one, zero], rtol)?.last();
    let c2 = direct_solve(spec, path, hbar, [zero, one], rtol)?.last();
    let m = [[c1.psi, c2.psi], [c1.dpsi, c2.dpsi]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let abel = (-path_integral_p(spec, path, hbar)? / hbar).exp();
    let abel_rel_err = (det - abel).norm() / abel.norm();
    let tr = m[0][0] + m[1][1];
    let disc = (tr * tr - 4.0 * abel).sqrt();
    let big = if (tr + disc).norm() >= (tr - disc).norm() { (tr + disc) / 2.0 } else { (tr - disc) / 2.0 };
    let small = if big.norm() > 0.0 { abel / big } else { zero };
    Ok(TransferMatrix { hbar, m, det, abel, abel_rel_err, eigenvalues: [big, small] })
}
