use std::cell::Cell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::critical::{classify_critical_points, infinity_order, CriticalKind, CriticalPoint};
use crate::coeffield::Sign;
use crate::error::{Result, WkbError};
use crate::formal::ProblemSpec;
use crate::ode::{Control, Dp45, OdeSystem};
use crate::quad::gauss_kronrod;

/// The root of `d0` closest to `reference`.
pub fn pick_root(d0: Complex64, reference: Complex64) -> Complex64 {
    let r = d0.sqrt();
    if (r - reference).norm() <= (r + reference).norm() {
        r
    } else {
        -r
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometryTolerances {
    /// Distance to a finite critical point at which tracing stops.
    pub stop_radius: f64,
    /// Minimal distance from critical points for flows and quadrature paths.
    pub clearance: f64,
    pub escape_radius: f64,
    pub flow_rtol: f64,
    pub trace_rtol: f64,
    pub closure_tol: f64,
    /// Fraction of the local scale |D₀/D₀′| allowed per step.
    pub step_fraction: f64,
}

impl Default for GeometryTolerances {
    fn default() -> Self {
        GeometryTolerances {
            stop_radius: 1e-7,
            clearance: 1e-3,
            escape_radius: 1e6,
            flow_rtol: 1e-13,
            trace_rtol: 1e-12,
            closure_tol: 1e-6,
            step_fraction: 0.2,
        }
    }
}

/// Basepoint, branch seed and direction for the Liouville coordinate z = Φ(x) = ∫ₓ₀ˣ √D₀.
pub struct LiouvilleFrame {
    spec: Arc<ProblemSpec>,
    x0: Complex64,
    branch: Sign,
    theta: f64,
    r0: Complex64,
    critical: Vec<CriticalPoint>,
    infinity_order: Option<i64>,
    pub tol: GeometryTolerances,
    cache: Mutex<HashMap<(u64, u64), (Complex64, Complex64)>>,
}

impl std::fmt::Debug for LiouvilleFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LiouvilleFrame")
            .field("x0", &self.x0)
            .field("branch", &self.branch)
            .field("theta", &self.theta)
            .finish()
    }
}

impl Clone for LiouvilleFrame {
    fn clone(&self) -> Self {
        LiouvilleFrame {
            spec: self.spec.clone(),
            x0: self.x0,
            branch: self.branch,
            theta: self.theta,
            r0: self.r0,
            critical: self.critical.clone(),
            infinity_order: self.infinity_order,
            tol: self.tol.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

struct FlowSys<'a> {
    frame: &'a LiouvilleFrame,
    dir: Complex64,
    r_ref: Cell<Complex64>,
}

impl OdeSystem for FlowSys<'_> {
    fn dim(&self) -> usize {
        1
    }
    fn rhs(&self, _t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let r = pick_root(self.frame.spec.d0(y[0]), self.r_ref.get());
        dy[0] = self.dir / r;
    }
    fn accept(&mut self, _t: f64, y: &[Complex64]) {
        self.r_ref.set(pick_root(self.frame.spec.d0(y[0]), self.r_ref.get()));
    }
    fn max_step(&self, _t: f64, y: &[Complex64]) -> f64 {
        let speed = (self.dir / self.r_ref.get()).norm();
        self.frame.tol.step_fraction * self.frame.local_scale(y[0]) / speed
    }
}

impl LiouvilleFrame {
    pub fn new(spec: Arc<ProblemSpec>, x0: Complex64, branch: Sign, theta: f64) -> Result<Self> {
        let d = spec.d0(x0);
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(WkbError::TurningPoint(x0));
        }
        let (critical, infinity_order) = if spec.is_rational() {
            let all = classify_critical_points(&spec)?;
            let inf = infinity_order(&all);
            (all.into_iter().filter(|p| p.location.point().is_some()).collect(), inf)
        } else {
            (Vec::new(), None)
        };
        let r0 = branch.value() * d.sqrt();
        Ok(LiouvilleFrame {
            spec,
            x0,
            branch,
            theta,
            r0,
            critical,
            infinity_order,
            tol: GeometryTolerances::default(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        let mut f = self.clone();
        f.theta = theta;
        f
    }

    pub fn spec(&self) -> &Arc<ProblemSpec> {
        &self.spec
    }

    pub fn x0(&self) -> Complex64 {
        self.x0
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn branch(&self) -> Sign {
        self.branch
    }

    /// √D₀(x₀) on the seeded branch.
    pub fn sqrt_x0(&self) -> Complex64 {
        self.r0
    }

    pub fn finite_critical_points(&self) -> &[CriticalPoint] {
        &self.critical
    }

    pub fn infinity_order(&self) -> Option<i64> {
        self.infinity_order
    }

    /// Nearest finite critical point and its distance.
    pub fn nearest_critical(&self, x: Complex64) -> Option<(CriticalPoint, f64)> {
        self.critical
            .iter()
            .filter_map(|p| p.location.point().map(|z| (*p, (z - x).norm())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Length scale on which √D₀ varies: min of |D₀/D₀′| and the distance to the nearest critical point.
    pub fn local_scale(&self, x: Complex64) -> f64 {
        let (d, dp) = self.spec.d0_with_derivative(x);
        let mut l = if dp.norm() > 0.0 { (d / dp).norm() } else { f64::INFINITY };
        if let Some((_, dist)) = self.nearest_critical(x) {
            l = l.min(dist);
        }
        if !l.is_finite() {
            l = 1.0 + x.norm();
        }
        l
    }

    /// Breakpoints (x, √D₀) along the straight segment a → b, close enough that the root is continued unambiguously.
    pub fn segment_pieces(&self, a: Complex64, r_a: Complex64, b: Complex64) -> Result<Vec<(Complex64, Complex64)>> {
        let mut out = vec![(a, r_a)];
        let total = (b - a).norm();
        if total == 0.0 {
            return Ok(out);
        }
        let dir = (b - a) / total;
        let mut s = 0.0;
        let mut x = a;
        let mut r = r_a;
        while s < total {
            let ell = self.local_scale(x);
            if ell < self.tol.stop_radius {
                return Err(WkbError::PathTooClose(x));
            }
            let mut step = (self.tol.step_fraction * ell).min(total - s);
            loop {
                let xn = if s + step >= total { b } else { x + dir * step };
                let (_, dp) = self.spec.d0_with_derivative(x);
                let pred = r + dp / (2.0 * r) * (xn - x);
                let rn = pick_root(self.spec.d0(xn), pred);
                if (rn - pred).norm() < 0.25 * rn.norm() {
                    s = if s + step >= total { total } else { s + step };
                    x = xn;
                    r = rn;
                    break;
                }
                step *= 0.5;
                if step < 1e-14 * (1.0 + x.norm()) {
                    return Err(WkbError::PathTooClose(x));
                }
            }
            out.push((x, r));
        }
        Ok(out)
    }

    /// ∫ f(x, √D₀(x)) dx along a polyline with the root continued from `r_start`; returns (integral, root at end).
    pub fn integrate_path<F>(&self, path: &[Complex64], r_start: Complex64, dim: usize, rtol: f64, mut f: F) -> Result<(Vec<Complex64>, Complex64)>
    where
        F: FnMut(Complex64, Complex64, &mut [Complex64]),
    {
        let mut total = vec![Complex64::new(0.0, 0.0); dim];
        let mut r = r_start;
        for w in path.windows(2) {
            let pieces = self.segment_pieces(w[0], r, w[1])?;
            for p in pieces.windows(2) {
                let (xa, ra) = p[0];
                let (xb, _) = p[1];
                let dx = xb - xa;
                let (v, _) = gauss_kronrod(
                    |t, out| {
                        let x = xa + dx * t;
                        let root = pick_root(self.spec.d0(x), ra);
                        f(x, root, out);
                        for o in out.iter_mut() {
                            *o *= dx;
                        }
                    },
                    0.0,
                    1.0,
                    dim,
                    rtol,
                    1e-300,
                )?;
                for d in 0..dim {
                    total[d] += v[d];
                }
            }
            r = pieces.last().unwrap().1;
        }
        Ok((total, r))
    }

    /// √D₀(x) continued from x₀ along the straight segment.
    pub fn sqrt_at(&self, x: Complex64) -> Result<Complex64> {
        Ok(self.straight_data(x)?.1)
    }

    fn straight_data(&self, x: Complex64) -> Result<(Complex64, Complex64)> {
        let key = (x.re.to_bits(), x.im.to_bits());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let (z, r) = self.integrate_path(&[self.x0, x], self.r0, 1, 1e-13, |_, r, out| out[0] = r)?;
        let v = (z[0], r);
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// Root at the end of a polyline that starts at x₀.
    pub fn sqrt_along(&self, path: &[Complex64]) -> Result<Complex64> {
        let mut r = self.r0;
        for w in path.windows(2) {
            r = self.segment_pieces(w[0], r, w[1])?.last().unwrap().1;
        }
        Ok(r)
    }

    /// Φ(x) = ∫√D₀ along `path` (which must start at x₀); straight segment from x₀ when `path` is `None`.
    pub fn liouville_eval(&self, x: Complex64, path: Option<&[Complex64]>) -> Result<Complex64> {
        match path {
            None => Ok(self.straight_data(x)?.0),
            Some(p) => {
                let mut pts = p.to_vec();
                if pts.last() != Some(&x) {
                    pts.push(x);
                }
                let (z, _) = self.integrate_path(&pts, self.r0, 1, 1e-13, |_, r, out| out[0] = r)?;
                Ok(z[0])
            }
        }
    }

    /// Φ⁻¹(Φ(x) + ζ) from x with root `r`, along the straight ζ-segment; returns the end point and its root.
    pub fn flow_from(&self, x: Complex64, r: Complex64, zeta: Complex64) -> Result<(Complex64, Complex64)> {
        if zeta.norm() == 0.0 {
            return Ok((x, r));
        }
        let nodes = self.flow_nodes(x, r, zeta, 1)?;
        Ok(nodes[1])
    }

    /// Φ⁻¹(Φ(x) + ζ) with the root at x continued from x₀.
    pub fn flow_map(&self, x: Complex64, zeta: Complex64) -> Result<Complex64> {
        let r = self.sqrt_at(x)?;
        Ok(self.flow_from(x, r, zeta)?.0)
    }

    /// Nodes x_j = Φ⁻¹(Φ(x) + j·dζ), j = 0 … count, with roots.
    pub fn flow_nodes(&self, x: Complex64, r: Complex64, dzeta: Complex64, count: usize) -> Result<Vec<(Complex64, Complex64)>> {
        let mut sys = FlowSys { frame: self, dir: dzeta, r_ref: Cell::new(r) };
        let dp = Dp45 { rtol: self.tol.flow_rtol, atol: 1e-15, h_min: 1e-13, ..Default::default() };
        let stops: Vec<f64> = (1..count).map(|j| j as f64).collect();
        let mut out = Vec::with_capacity(count + 1);
        out.push((x, r));
        let mut failure: Option<WkbError> = None;
        let clearance = self.tol.clearance;
        let escape = self.tol.escape_radius;
        let spec = self.spec.clone();
        let mut r_ref = r;
        let res = dp.integrate_with_stops(&mut sys, 0.0, &[x], count as f64, &stops, &mut |t, y| {
            let xn = y[0];
            r_ref = pick_root(spec.d0(xn), r_ref);
            if xn.norm() > escape {
                failure = Some(WkbError::InadmissibleFlow { x, reason: format!("escaped past |x| = {escape:e}") });
                return Control::Stop;
            }
            if self.local_scale(xn) < clearance {
                failure = Some(WkbError::InadmissibleFlow { x, reason: format!("passes within {clearance:e} of a critical point near {xn}") });
                return Control::Stop;
            }
            if (t - t.round()).abs() < 1e-12 && t.round() as usize == out.len() {
                out.push((xn, r_ref));
            }
            Control::Continue
        });
        if let Some(e) = failure {
            return Err(e);
        }
        match res {
            Ok(_) => Ok(out),
            Err(WkbError::StepUnderflow { .. }) => {
                Err(WkbError::InadmissibleFlow { x, reason: "step size underflow (critical point)".into() })
            }
            Err(e) => Err(e),
        }
    }

    pub fn kind_near(&self, x: Complex64) -> Option<(CriticalKind, Complex64, f64)> {
        self.nearest_critical(x).map(|(p, d)| (p.kind, p.location.point().unwrap(), d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn airy_frame() -> LiouvilleFrame {
        let s = Arc::new(ProblemSpec::from_exprs("airy", "0", "-x").unwrap());
        LiouvilleFrame::new(s, Complex64::new(1.0, 0.0), Sign::Plus, 0.0).unwrap()
    }

    #[test]
    fn liouville_airy() {
        let f = airy_frame();
        let z = f.liouville_eval(Complex64::new(4.0, 0.0), None).unwrap();
        assert!((z - 28.0 / 3.0).norm() < 1e-11);
        assert_eq!(f.liouville_eval(Complex64::new(1.0, 0.0), None).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn flow_inverts_liouville() {
        let f = airy_frame();
        let x = f.flow_map(Complex64::new(1.0, 0.0), Complex64::new(28.0 / 3.0, 0.0)).unwrap();
        assert!((x - 4.0).norm() < 1e-10);
    }

    #[test]
    fn flow_into_turning_point_is_refused() {
        let f = airy_frame();
        let e = f.flow_map(Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0));
        assert!(matches!(e, Err(WkbError::InadmissibleFlow { .. })));
    }
}
