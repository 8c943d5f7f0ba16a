use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::standard::{CoeffSource, PointCoeffs};
use crate::coeffield::Sign;
use crate::error::{Result, WkbError};
use crate::geometry::LiouvilleFrame;

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Values on the characteristics grid: `rows[j][k]` at (x_j, ξ_k), with j + k ≤ J + N and k ≤ N.
#[derive(Clone, Debug, PartialEq)]
pub struct Tri {
    pub rows: Vec<Vec<Complex64>>,
}

impl Tri {
    pub fn zeros(bases: usize, n: usize) -> Tri {
        let total = bases + n;
        Tri { rows: (0..total).map(|j| vec![cz(); n.min(total - 1 - j) + 1]).collect() }
    }

    pub fn like(other: &Tri) -> Tri {
        Tri { rows: other.rows.iter().map(|r| vec![cz(); r.len()]).collect() }
    }

    /// Largest modulus; infinite when any entry is not finite.
    pub fn sup_norm(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|v| if v.re.is_finite() && v.im.is_finite() { v.norm() } else { f64::INFINITY })
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.norm() == 0.0)
    }

    pub fn add_assign(&mut self, o: &Tri) {
        for (a, b) in self.rows.iter_mut().zip(&o.rows) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn add_scaled(&mut self, o: &Tri, s: Complex64) {
        for (a, b) in self.rows.iter_mut().zip(&o.rows) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * s;
            }
        }
    }

    /// Pointwise product with a function of the node index only.
    pub fn mul_nodes(&self, c: &[Complex64]) -> Tri {
        Tri { rows: self.rows.iter().zip(c).map(|(r, cj)| r.iter().map(|v| v * cj).collect()).collect() }
    }

    pub fn max_diff(&self, o: &Tri) -> f64 {
        self.rows.iter().flatten().zip(o.rows.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// I[g](x_j, ξ_k) = −∫₀^{ξ_k} g(x_u, ξ_k − u) du by the trapezoid rule; `dxi` is the complex ξ-step.
pub fn apply_i(g: &Tri, dxi: Complex64) -> Tri {
    let mut out = Tri::like(g);
    for j in 0..g.rows.len() {
        for k in 1..out.rows[j].len() {
            let mut acc = 0.5 * (g.rows[j][k] + g.rows[j + k][0]);
            for m in 1..k {
                acc += g.rows[j + m][k - m];
            }
            out.rows[j][k] = -acc * dxi;
        }
    }
    out
}

/// (f ∗ g)(x_j, ξ_k) = ∫₀^{ξ_k} f(x_j, ξ_k − η) g(x_j, η) dη by the trapezoid rule.
pub fn convolve(f: &Tri, g: &Tri, dxi: Complex64) -> Result<Tri> {
    if f.rows.len() != g.rows.len() || f.rows.iter().zip(&g.rows).any(|(a, b)| a.len() != b.len()) {
        return Err(WkbError::InvalidParameter("convolution grids differ".into()));
    }
    let mut out = Tri::like(f);
    for (j, row) in out.rows.iter_mut().enumerate() {
        let a = &f.rows[j];
        let b = &g.rows[j];
        for k in 1..row.len() {
            let mut acc = 0.5 * (a[k] * b[0] + a[0] * b[k]);
            for i in 1..k {
                acc += a[k - i] * b[i];
            }
            row[k] = acc * dxi;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridParams {
    /// ξ-step along the ray.
    pub h: f64,
    /// Number of ξ-steps; Ξ = N·h.
    pub n: usize,
    /// Base points besides the first, spaced by one step along the flow.
    pub extra_bases: usize,
    pub max_terms: usize,
    /// Relative term tolerance.
    pub tol_term: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams { h: 0.02, n: 250, extra_bases: 0, max_terms: 40, tol_term: 1e-12 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub terms_used: usize,
    pub term_norms: Vec<f64>,
    pub ratio: f64,
    pub converged: bool,
}

/// τ_α on the characteristics grid through one base point.
#[derive(Clone, Debug, Serialize)]
pub struct BorelField {
    pub theta: f64,
    pub alpha: Sign,
    pub h: f64,
    pub n: usize,
    pub bases: usize,
    /// Flow nodes x_j = Φ⁻¹(Φ(x) + ε e^{iθ} j h), j = 0 … J + N.
    pub nodes: Vec<Complex64>,
    /// √D₀ at the nodes on the frame's branch.
    pub roots: Vec<Complex64>,
    #[serde(skip)]
    pub tau: Tri,
    pub report: ConvergenceReport,
}

impl BorelField {
    pub fn dxi(&self) -> Complex64 {
        Complex64::from_polar(self.h, self.theta)
    }

    pub fn xi(&self, k: usize) -> Complex64 {
        self.dxi() * k as f64
    }

    /// σ_α = ε_α√D₀·τ_α along ξ at base j.
    pub fn sigma_row(&self, j: usize) -> Vec<Complex64> {
        let er = self.roots[j] * self.alpha.value();
        self.tau.rows[j].iter().map(|t| t * er).collect()
    }

    /// CSV rows `base,re_x,im_x,arg_xi,abs_xi,re_tau,im_tau` for the base points.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("base,re_x,im_x,arg_xi,abs_xi,re_tau,im_tau\n");
        for j in 0..self.bases {
            for (k, t) in self.tau.rows[j].iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                    j,
                    self.nodes[j].re,
                    self.nodes[j].im,
                    self.theta,
                    k as f64 * self.h,
                    t.re,
                    t.im
                );
            }
        }
        s
    }
}

/// Coefficient tables on the grid.
pub(crate) struct GridCoeffs {
    pub b0: Vec<Complex64>,
    pub b1: Vec<Complex64>,
    pub beta0: Option<Tri>,
    pub beta1: Option<Tri>,
}

pub(crate) fn grid_coeffs(src: &CoeffSource, nodes: &[(Complex64, Complex64)], bases: usize, n: usize, dxi: Complex64, rot: Complex64) -> GridCoeffs {
    let pc: Vec<PointCoeffs> = nodes.iter().map(|(x, r)| src.at(*x, *r)).collect();
    let tab = |f: &dyn Fn(&PointCoeffs, Complex64) -> Complex64| {
        let mut t = Tri::zeros(bases, n);
        for (j, row) in t.rows.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = rot * f(&pc[j], dxi * k as f64);
            }
        }
        t
    };
    let beta0 = pc.iter().any(|p| !p.beta0.is_empty()).then(|| tab(&|p, xi| p.beta0_at(xi)));
    let beta1 = pc.iter().any(|p| !p.beta1.is_empty()).then(|| tab(&|p, xi| p.beta1_at(xi)));
    GridCoeffs { b0: pc.iter().map(|p| p.b0).collect(), b1: pc.iter().map(|p| p.b1).collect(), beta0, beta1 }
}

/// Σ_{n₁+n₂=m} τ_{n₁} ∗ τ_{n₂}, using commutativity.
fn quadratic_sum(terms: &[Tri], m: usize, dxi: Complex64) -> Result<Option<Tri>> {
    let mut acc: Option<Tri> = None;
    for n1 in 0..=m / 2 {
        let n2 = m - n1;
        if terms[n1].is_zero() || terms[n2].is_zero() {
            continue;
        }
        let c = convolve(&terms[n1], &terms[n2], dxi)?;
        let w = if n1 == n2 { 1.0 } else { 2.0 };
        match acc.as_mut() {
            Some(a) => a.add_scaled(&c, Complex64::new(w, 0.0)),
            None => {
                let mut z = Tri::like(&c);
                z.add_scaled(&c, Complex64::new(w, 0.0));
                acc = Some(z);
            }
        }
    }
    Ok(acc)
}

/// Sum τ_α = Σ τ_{α,n} with τ₀ = −b₀(x_ξ), τ₁ = I[β₀ + b₁τ₀],
/// τₙ = I[b₁τ_{n−1} + β₁∗τ_{n−2} + Σ_{n₁+n₂=n−2} τ_{n₁}∗τ_{n₂}].
pub fn tau_recursion(src: &CoeffSource, frame: &LiouvilleFrame, x: Complex64, grid: &GridParams) -> Result<BorelField> {
    let alpha = src.alpha();
    let theta = frame.theta();
    let rot = Complex64::from_polar(1.0, theta);
    let dxi = rot * grid.h;
    let bases = grid.extra_bases + 1;
    let r = frame.sqrt_at(x)?;
    let nodes = frame.flow_nodes(x, r, dxi * alpha.value(), bases + grid.n - 1)?;
    let gc = grid_coeffs(src, &nodes, bases, grid.n, dxi, Complex64::new(1.0, 0.0));
    let mut tau0 = Tri::zeros(bases, grid.n);
    for (j, row) in tau0.rows.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = -gc.b0[j + k];
        }
    }
    let b1_zero = gc.b1.iter().all(|v| v.norm() == 0.0);
    let mut terms: Vec<Tri> = vec![tau0];
    let mut total = terms[0].clone();
    let mut norms = vec![terms[0].sup_norm()];
    let mut reference = norms[0];
    let mut ratio = 0.0;
    let mut above_one = 0;
    let mut small = 0;
    let mut converged = false;
    for n in 1..grid.max_terms {
        let mut g = Tri::like(&terms[0]);
        if !b1_zero {
            g.add_assign(&terms[n - 1].mul_nodes(&gc.b1));
        }
        if n == 1 {
            if let Some(b) = &gc.beta0 {
                g.add_assign(b);
            }
        } else {
            if let Some(b) = &gc.beta1 {
                if !terms[n - 2].is_zero() {
                    g.add_assign(&convolve(b, &terms[n - 2], dxi)?);
                }
            }
            if let Some(q) = quadratic_sum(&terms, n - 2, dxi)? {
                g.add_assign(&q);
            }
        }
        let t = if g.is_zero() { g } else { apply_i(&g, dxi) };
        let nn = t.sup_norm();
        total.add_assign(&t);
        reference = reference.max(nn);
        if norms[n - 1] > 0.0 {
            ratio = nn / norms[n - 1];
            above_one = if ratio > 1.0 { above_one + 1 } else { 0 };
        }
        norms.push(nn);
        terms.push(t);
        if above_one >= 3 || !nn.is_finite() {
            return Err(WkbError::Divergence { terms: n + 1, ratio });
        }
        small = if nn <= grid.tol_term * reference { small + 1 } else { 0 };
        if small >= 2 {
            converged = true;
            break;
        }
    }
    if !converged {
        let last = norms.iter().rev().take(2).cloned().fold(0.0, f64::max);
        return Err(WkbError::NotConverged { terms: norms.len(), last });
    }
    let (xs, rs): (Vec<_>, Vec<_>) = nodes.into_iter().unzip();
    Ok(BorelField {
        theta,
        alpha,
        h: grid.h,
        n: grid.n,
        bases,
        nodes: xs,
        roots: rs,
        tau: total,
        report: ConvergenceReport { terms_used: norms.len(), term_norms: norms, ratio, converged },
    })
}

/// sup-norm of τ − (−b₀(x_ξ) + I[β₀ + b₁τ + β₁∗τ + τ∗τ]) over the grid.
pub fn integral_equation_residual(src: &CoeffSource, field: &BorelField) -> Result<f64> {
    let dxi = field.dxi();
    let nodes: Vec<(Complex64, Complex64)> = field.nodes.iter().copied().zip(field.roots.iter().copied()).collect();
    let gc = grid_coeffs(src, &nodes, field.bases, field.n, dxi, Complex64::new(1.0, 0.0));
    let tau = &field.tau;
    let mut g = tau.mul_nodes(&gc.b1);
    if let Some(b) = &gc.beta0 {
        g.add_assign(b);
    }
    if let Some(b) = &gc.beta1 {
        g.add_assign(&convolve(b, tau, dxi)?);
    }
    g.add_assign(&convolve(tau, tau, dxi)?);
    let mut rhs = apply_i(&g, dxi);
    for (j, row) in rhs.rows.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v -= gc.b0[j + k];
        }
    }
    Ok(tau.max_diff(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri_from(f: impl Fn(usize, f64) -> Complex64, bases: usize, n: usize, h: f64) -> Tri {
        let mut t = Tri::zeros(bases, n);
        for (j, row) in t.rows.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = f(j, k as f64 * h);
            }
        }
        t
    }

    #[test]
    fn operator_examples() {
        let h = 0.01;
        let dxi = Complex64::new(h, 0.0);
        let one = tri_from(|_, _| Complex64::new(1.0, 0.0), 3, 50, h);
        let xi = tri_from(|_, s| Complex64::new(s, 0.0), 3, 50, h);
        let i1 = apply_i(&one, dxi);
        let ixi = apply_i(&xi, dxi);
        let c11 = convolve(&one, &one, dxi).unwrap();
        let c1x = convolve(&one, &xi, dxi).unwrap();
        for j in 0..3 {
            for k in 0..=50 {
                let s = k as f64 * h;
                assert!((i1.rows[j][k] + s).norm() < 1e-14);
                assert!((ixi.rows[j][k] + s * s / 2.0).norm() < 1e-14);
                assert!((c11.rows[j][k] - s).norm() < 1e-14);
                assert!((c1x.rows[j][k] - s * s / 2.0).norm() < 1e-14);
            }
        }
        let zero = Tri::like(&one);
        assert!(apply_i(&zero, dxi).is_zero());
    }
}
