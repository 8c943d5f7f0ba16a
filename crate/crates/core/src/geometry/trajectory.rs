use std::cell::Cell;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::critical::{CriticalKind, Location};
use super::frame::{pick_root, LiouvilleFrame};
use crate::error::Result;
use crate::ode::{Control, Dp45, OdeSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ray {
    Plus,
    Minus,
}

impl Ray {
    pub fn value(self) -> f64 {
        match self {
            Ray::Plus => 1.0,
            Ray::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RayStatus {
    CompleteGeneric { x_inf: Location, order: i64 },
    CompleteClosed { period: f64 },
    HitTurningPoint { re: f64, im: f64, tau: f64 },
    EscapedDomain { re: f64, im: f64, reason: String },
    BudgetExhausted,
}

impl RayStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RayStatus::CompleteGeneric { .. } => "complete_generic",
            RayStatus::CompleteClosed { .. } => "complete_closed",
            RayStatus::HitTurningPoint { .. } => "hit_turning_point",
            RayStatus::EscapedDomain { .. } => "escaped_domain",
            RayStatus::BudgetExhausted => "budget_exhausted",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrajectorySample {
    pub tau: f64,
    pub x: Complex64,
    /// Φ(x) continued along the trajectory.
    pub z: Complex64,
    #[serde(skip)]
    pub root: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HalfTrajectory {
    pub ray: Ray,
    pub status: RayStatus,
    /// Ordered from the start point outward.
    pub samples: Vec<TrajectorySample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub theta: f64,
    pub x_start: Complex64,
    pub plus: HalfTrajectory,
    pub minus: HalfTrajectory,
    pub period: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceOptions {
    pub max_tau: f64,
    pub max_arclength: f64,
    /// Distance to a finite critical point at which the ray is stopped.
    pub stop_radius: f64,
    pub rtol: f64,
    /// Period of the coefficients in x, if any; closure is tested modulo it.
    pub period: Option<Complex64>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { max_tau: 1e12, max_arclength: 1e7, stop_radius: 1e-5, rtol: 1e-12, period: None }
    }
}

struct ArcSys<'a> {
    frame: &'a LiouvilleFrame,
    dir: Complex64,
    r_ref: Cell<Complex64>,
    stop_radius: f64,
}

impl ArcSys<'_> {
    fn velocity(&self, x: Complex64) -> (Complex64, Complex64) {
        let r = pick_root(self.frame.spec().d0(x), self.r_ref.get());
        let u = self.dir / r;
        let dx = u / u.norm();
        (dx, r * dx)
    }
}

impl OdeSystem for ArcSys<'_> {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, _t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let (dx, dz) = self.velocity(y[0]);
        dy[0] = dx;
        dy[1] = dz;
    }
    fn accept(&mut self, _t: f64, y: &[Complex64]) {
        self.r_ref.set(pick_root(self.frame.spec().d0(y[0]), self.r_ref.get()));
    }
    fn max_step(&self, _t: f64, y: &[Complex64]) -> f64 {
        let ell = self.frame.local_scale(y[0]);
        let mut cap = self.frame.tol.step_fraction * ell;
        if let Some((_, d)) = self.frame.nearest_critical(y[0]) {
            cap = cap.min(0.25 * (d - 0.5 * self.stop_radius).max(0.5 * self.stop_radius));
        }
        cap
    }
}

fn nearest_translate(x: Complex64, target: Complex64, period: Option<Complex64>) -> Complex64 {
    match period {
        Some(p) if p.norm() > 0.0 => target + p * ((x - target) / p).re.round(),
        _ => target,
    }
}

/// Trace one (θ, ±)-ray from `x_start`, parameterised by τ = Re(e^{−iθ}Φ(x)).
pub fn trace_ray(frame: &LiouvilleFrame, x_start: Complex64, theta: f64, ray: Ray, opts: &TraceOptions) -> Result<HalfTrajectory> {
    let eps = ray.value();
    let rot = Complex64::from_polar(1.0, theta);
    let r_start = frame.sqrt_at(x_start)?;
    let z_start = frame.liouville_eval(x_start, None)?;
    let tau_of = |z: Complex64| (z / rot).re;
    let mut samples = vec![TrajectorySample { tau: tau_of(z_start), x: x_start, z: z_start, root: r_start }];
    let mut sys = ArcSys { frame, dir: rot * eps, r_ref: Cell::new(r_start), stop_radius: opts.stop_radius };
    let dp = Dp45 { rtol: opts.rtol, atol: 1e-15, h_min: 1e-15, max_steps: 400_000, ..Default::default() };
    let spec = frame.spec().clone();
    let inf_order = frame.infinity_order();
    let escape = frame.tol.escape_radius;
    let mut status: Option<RayStatus> = None;
    let mut r_ref = r_start;
    let mut d_hist: Vec<f64> = vec![0.0];
    let mut d_max = 0.0f64;
    let res = dp.integrate(&mut sys, 0.0, &[x_start, z_start], opts.max_arclength, |_, y| {
        let x = y[0];
        let z = y[1];
        r_ref = pick_root(spec.d0(x), r_ref);
        let tau = tau_of(z);
        samples.push(TrajectorySample { tau, x, z, root: r_ref });
        if !x.is_finite() || !z.is_finite() {
            status = Some(RayStatus::EscapedDomain { re: x.re, im: x.im, reason: "non-finite state".into() });
            return Control::Stop;
        }
        if x.norm() > escape {
            status = Some(match inf_order {
                Some(m) if m >= 2 => RayStatus::CompleteGeneric { x_inf: Location::Infinity, order: m },
                _ => RayStatus::EscapedDomain { re: x.re, im: x.im, reason: "escaped to infinity".into() },
            });
            return Control::Stop;
        }
        if let Some((kind, c, dist)) = frame.kind_near(x) {
            if dist < opts.stop_radius {
                status = Some(match kind {
                    CriticalKind::TurningPoint { order } => {
                        let dz = r_ref * (c - x) / (order as f64 / 2.0 + 1.0);
                        RayStatus::HitTurningPoint { re: c.re, im: c.im, tau: tau + tau_of(dz) }
                    }
                    CriticalKind::SimplePole => RayStatus::EscapedDomain { re: c.re, im: c.im, reason: "reached a simple pole".into() },
                    CriticalKind::InfiniteCritical { order } => {
                        RayStatus::CompleteGeneric { x_inf: Location::finite(c), order: order as i64 }
                    }
                });
                return Control::Stop;
            }
        } else {
            let (d, dd) = spec.d0_with_derivative(x);
            if dd.norm() > 0.0 && (d / dd).norm() < opts.stop_radius {
                let c = x - d / dd;
                let dz = r_ref * (c - x) / 1.5;
                status = Some(RayStatus::HitTurningPoint { re: c.re, im: c.im, tau: tau + tau_of(dz) });
                return Control::Stop;
            }
        }
        if (tau - samples[0].tau).abs() > opts.max_tau {
            status = Some(RayStatus::BudgetExhausted);
            return Control::Stop;
        }
        let target = nearest_translate(x, x_start, opts.period);
        let d = (x - target).norm();
        d_max = d_max.max(d);
        d_hist.push(d);
        let n = d_hist.len();
        if n >= 3 {
            let (a, b, c) = (d_hist[n - 3], d_hist[n - 2], d_hist[n - 1]);
            let prev = samples[samples.len() - 2];
            if b <= a && b <= c && d_max > 4.0 * b && b < 0.5 * frame.local_scale(prev.x) {
                let tgt = nearest_translate(prev.x, x_start, opts.period);
                if let Some((tau_c, r_c)) = refine_closure(frame, prev, tgt, rot) {
                    if (r_c - r_start).norm() < 1e-6 * r_start.norm() {
                        status = Some(RayStatus::CompleteClosed { period: (tau_c - samples[0].tau).abs() });
                        return Control::Stop;
                    }
                }
            }
        }
        Control::Continue
    });
    let status = match (res, status) {
        (_, Some(s)) => s,
        (Ok(_), None) => RayStatus::BudgetExhausted,
        (Err(e), None) => {
            let last = samples.last().unwrap().x;
            RayStatus::EscapedDomain { re: last.re, im: last.im, reason: e.to_string() }
        }
    };
    Ok(HalfTrajectory { ray, status, samples })
}

/// Newton refinement of the closing time; returns (τ*, root at closure) when the ray passes through `target`.
fn refine_closure(frame: &LiouvilleFrame, from: TrajectorySample, target: Complex64, rot: Complex64) -> Option<(f64, Complex64)> {
    let mut dtau = 0.0;
    let mut x = from.x;
    let mut r = from.root;
    for _ in 0..6 {
        let step = (r * (target - x) / rot).re;
        dtau += step;
        let (x1, r1) = frame.flow_from(from.x, from.root, rot * dtau).ok()?;
        x = x1;
        r = r1;
        if (x - target).norm() < 1e-14 * (1.0 + target.norm()) {
            break;
        }
    }
    if (x - target).norm() < frame.tol.closure_tol {
        Some((from.tau + dtau, r))
    } else {
        None
    }
}

/// Trace both rays through `x_start`.
pub fn trace_trajectory(frame: &LiouvilleFrame, x_start: Complex64, opts: &TraceOptions) -> Result<Trajectory> {
    let theta = frame.theta();
    let plus = trace_ray(frame, x_start, theta, Ray::Plus, opts)?;
    let minus = if let RayStatus::CompleteClosed { period } = plus.status {
        HalfTrajectory { ray: Ray::Minus, status: RayStatus::CompleteClosed { period }, samples: vec![plus.samples[0]] }
    } else {
        trace_ray(frame, x_start, theta, Ray::Minus, opts)?
    };
    let period = match plus.status {
        RayStatus::CompleteClosed { period } => Some(period),
        _ => None,
    };
    Ok(Trajectory { theta, x_start, plus, minus, period })
}

impl Trajectory {
    /// Samples ordered by increasing τ.
    pub fn ordered_samples(&self) -> Vec<(TrajectorySample, &RayStatus)> {
        let mut out: Vec<(TrajectorySample, &RayStatus)> = self.minus.samples.iter().skip(1).rev().map(|s| (*s, &self.minus.status)).collect();
        out.extend(self.plus.samples.iter().map(|s| (*s, &self.plus.status)));
        out
    }

    /// CSV rows `tau,re_x,im_x,re_z,im_z,status` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau,re_x,im_x,re_z,im_z,status\n");
        for (p, st) in self.ordered_samples() {
            let _ = writeln!(s, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}", p.tau, p.x.re, p.x.im, p.z.re, p.z.im, st.label());
        }
        s
    }
}
