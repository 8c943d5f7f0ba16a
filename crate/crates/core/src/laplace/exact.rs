use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::Serialize;

use super::transform::{fit_exponential_type, laplace_with_fit, ExpFit, LaplaceOptions, LaplaceValue};
use crate::borel::{tau_recursion, BorelField, CoeffSource, GridParams};
use crate::coeffield::Sign;
use crate::error::{Result, WkbError};
use crate::formal::{numeric_roots, ProblemSpec};
use crate::geometry::LiouvilleFrame;
use crate::quad::{gauss_legendre, legendre_partial_integrals};

/// Everything needed to evaluate S_α(x, ħ) at one point for any ħ in the disc.
#[derive(Clone, Debug, Serialize)]
pub struct RootSample {
    pub alpha: Sign,
    pub x: Complex64,
    /// √D₀(x) on the frame's branch.
    pub root: Complex64,
    pub lambda: Complex64,
    pub s1: Complex64,
    pub theta: f64,
    pub h: f64,
    pub sigma: Vec<Complex64>,
    pub fit: ExpFit,
}

impl RootSample {
    pub fn from_field(spec: &ProblemSpec, field: &BorelField, j: usize) -> RootSample {
        let x = field.nodes[j];
        let root = field.roots[j];
        let lo = numeric_roots(spec, x, root, field.alpha, 1);
        let sigma = field.sigma_row(j);
        let fit = fit_exponential_type(&sigma, field.h);
        RootSample { alpha: field.alpha, x, root, lambda: lo[0], s1: lo[1], theta: field.theta, h: field.h, sigma, fit }
    }

    /// S_α = s_α⁽¹⁾ + L_θ[σ_α] with the tail bound.
    pub fn big_s(&self, hbar: Complex64, opts: &LaplaceOptions) -> Result<LaplaceValue> {
        let l = laplace_with_fit(&self.sigma, self.h, self.theta, hbar, self.fit, opts)?;
        Ok(LaplaceValue { value: self.s1 + l.value, tail_bound: l.tail_bound })
    }

    /// s_α = λ_α + ħS_α.
    pub fn s(&self, hbar: Complex64, opts: &LaplaceOptions) -> Result<Complex64> {
        Ok(self.lambda + hbar * self.big_s(hbar, opts)?.value)
    }
}

/// Borel-resummed characteristic root s_α in direction θ, evaluated lazily per point.
pub struct ExactRoot {
    pub alpha: Sign,
    spec: Arc<ProblemSpec>,
    frame: LiouvilleFrame,
    src: CoeffSource,
    pub grid: GridParams,
    pub opts: LaplaceOptions,
    cache: Mutex<HashMap<(u64, u64), Arc<RootSample>>>,
}

impl std::fmt::Debug for ExactRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactRoot").field("alpha", &self.alpha).field("theta", &self.frame.theta()).finish()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiTable {
    pub points: Vec<Complex64>,
    pub hbars: Vec<Complex64>,
    /// `psi[i][m]` at `points[i]`, `hbars[m]`.
    pub psi: Vec<Vec<Complex64>>,
    /// Bound on the Laplace truncation error of ∫S along the segment, per ħ.
    pub tail_bound: Vec<f64>,
}

const GL_NODES: usize = 32;

impl ExactRoot {
    /// `frame` fixes x₀, the branch seed and θ.
    pub fn new(spec: Arc<ProblemSpec>, frame: &LiouvilleFrame, alpha: Sign, grid: GridParams, opts: LaplaceOptions) -> Result<Self> {
        let src = CoeffSource::for_spec(&spec, alpha)?;
        Ok(ExactRoot { alpha, spec, frame: frame.clone(), src, grid, opts, cache: Mutex::new(HashMap::new()) })
    }

    pub fn frame(&self) -> &LiouvilleFrame {
        &self.frame
    }

    pub fn theta(&self) -> f64 {
        self.frame.theta()
    }

    pub fn borel_field(&self, x: Complex64) -> Result<BorelField> {
        let g = GridParams { extra_bases: 0, ..self.grid.clone() };
        tau_recursion(&self.src, &self.frame, x, &g)
    }

    pub fn sample(&self, x: Complex64) -> Result<Arc<RootSample>> {
        let key = (x.re.to_bits(), x.im.to_bits());
        if let Some(s) = self.cache.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let f = self.borel_field(x)?;
        let s = Arc::new(RootSample::from_field(&self.spec, &f, 0));
        self.cache.lock().unwrap().insert(key, s.clone());
        Ok(s)
    }

    /// s_α(x, ħ).
    pub fn s(&self, x: Complex64, hbar: Complex64) -> Result<Complex64> {
        self.sample(x)?.s(hbar, &self.opts)
    }

    /// ψ_α = exp(−(1/ħ)∫ₓ₀ˣλ_α − ∫ₓ₀ˣS_α) at x = x₀ + t(end − x₀) for each t ∈ [0, 1].
    pub fn psi_on_segment(&self, end: Complex64, ts: &[f64], hbars: &[Complex64]) -> Result<PsiTable> {
        let x0 = self.frame.x0();
        let points: Vec<Complex64> = ts.iter().map(|t| x0 + (end - x0) * *t).collect();
        if (end - x0).norm() == 0.0 {
            let ones = vec![vec![Complex64::new(1.0, 0.0); hbars.len()]; ts.len()];
            return Ok(PsiTable { points, hbars: hbars.to_vec(), psi: ones, tail_bound: vec![0.0; hbars.len()] });
        }
        let (gx, gw) = gauss_legendre(GL_NODES);
        let half = (end - x0) * 0.5;
        let mid = (end + x0) * 0.5;
        let samples: Vec<Arc<RootSample>> = gx.iter().map(|u| self.sample(mid + half * *u)).collect::<Result<_>>()?;
        let us: Vec<f64> = ts.iter().map(|t| 2.0 * t - 1.0).collect();
        let lam: Vec<Complex64> = samples.iter().map(|s| s.lambda).collect();
        let int_lam: Vec<Complex64> = legendre_partial_integrals(&gx, &gw, &lam, &us).into_iter().map(|v| v * half).collect();
        let mut psi = vec![vec![Complex64::new(0.0, 0.0); hbars.len()]; ts.len()];
        let mut tails = Vec::with_capacity(hbars.len());
        for (m, &hb) in hbars.iter().enumerate() {
            let mut big: Vec<Complex64> = Vec::with_capacity(GL_NODES);
            let mut tail = 0.0;
            for (s, w) in samples.iter().zip(&gw) {
                let v = s.big_s(hb, &self.opts)?;
                big.push(v.value);
                tail += w * half.norm() * v.tail_bound;
            }
            tails.push(tail);
            let int_s: Vec<Complex64> = legendre_partial_integrals(&gx, &gw, &big, &us).into_iter().map(|v| v * half).collect();
            for i in 0..ts.len() {
                psi[i][m] = (-int_lam[i] / hb - int_s[i]).exp();
            }
        }
        Ok(PsiTable { points, hbars: hbars.to_vec(), psi, tail_bound: tails })
    }

    /// ψ_α(x, ħ) along the straight segment from x₀.
    pub fn psi(&self, x: Complex64, hbar: Complex64) -> Result<Complex64> {
        Ok(self.psi_on_segment(x, &[1.0], &[hbar])?.psi[0][0])
    }
}

/// (ψ₊, ψ₋) at x.
pub fn exact_wkb(plus: &ExactRoot, minus: &ExactRoot, x: Complex64, hbar: Complex64) -> Result<(Complex64, Complex64)> {
    Ok((plus.psi(x, hbar)?, minus.psi(x, hbar)?))
}

/// ħW(ψ₋, ψ₊)/(ψ₊ψ₋) = s₊ − s₋ up to the orientation of W; tends to √D₀ as ħ → 0.
pub fn wronskian(plus: &ExactRoot, minus: &ExactRoot, x: Complex64, hbar: Complex64) -> Result<Complex64> {
    Ok(plus.s(x, hbar)? - minus.s(x, hbar)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct Monodromy {
    pub alpha: Sign,
    pub hbars: Vec<Complex64>,
    /// log a_α(ħ) = −(1/ħ)∮λ_α − ∮S_α.
    pub log_values: Vec<Complex64>,
    pub values: Vec<Complex64>,
    /// exp(−(1/ħ)∮λ_α).
    pub leading: Vec<Complex64>,
    pub loop_lambda: Complex64,
    pub loop_s: Vec<Complex64>,
    pub nodes: usize,
}

/// a_α(ħ) = exp(−(1/ħ)∮ s_α dx) around the closed trajectory through `x_start` with trajectory period ω.
///
/// The loop is sampled at `m` points uniformly spaced in the trajectory parameter (these are also the Borel base
/// points), integrated with the periodic trapezoid rule, and oriented along `direction`.
pub fn monodromy(
    root: &ExactRoot,
    x_start: Complex64,
    omega: f64,
    direction: Complex64,
    m: usize,
    hbars: &[Complex64],
) -> Result<Monodromy> {
    if m < 2 || omega <= 0.0 {
        return Err(WkbError::InvalidParameter("monodromy needs m >= 2 and omega > 0".into()));
    }
    let h = omega / m as f64;
    let xi_max = root.grid.h * root.grid.n as f64;
    let n = ((xi_max / h).ceil() as usize).max(2);
    let grid = GridParams { h, n, extra_bases: m - 1, ..root.grid.clone() };
    let field = tau_recursion(&root.src, &root.frame, x_start, &grid)?;
    let eps = root.alpha.value();
    let rot = Complex64::from_polar(1.0, root.theta());
    let disp = field.nodes[m] - field.nodes[0];
    let orient = if (disp * direction.conj()).re < 0.0 { -1.0 } else { 1.0 };
    let samples: Vec<RootSample> = (0..m).map(|j| RootSample::from_field(&root.spec, &field, j)).collect();
    // dx = ε e^{iθ} du / √D₀
    let dxdu: Vec<Complex64> = samples.iter().map(|s| rot * eps * h * orient / s.root).collect();
    let loop_lambda: Complex64 = samples.iter().zip(&dxdu).map(|(s, d)| s.lambda * d).sum();
    let mut log_values = Vec::new();
    let mut loop_s = Vec::new();
    for &hb in hbars {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, d) in samples.iter().zip(&dxdu) {
            acc += s.big_s(hb, &root.opts)?.value * d;
        }
        loop_s.push(acc);
        log_values.push(-loop_lambda / hb - acc);
    }
    Ok(Monodromy {
        alpha: root.alpha,
        hbars: hbars.to_vec(),
        values: log_values.iter().map(|v| v.exp()).collect(),
        leading: hbars.iter().map(|hb| (-loop_lambda / hb).exp()).collect(),
        log_values,
        loop_lambda,
        loop_s,
        nodes: m,
    })
}
