//! Dormand–Prince 5(4) and classical RK4 for complex systems over a real parameter.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, WkbError};

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
    /// Called after every accepted step.
    fn accept(&mut self, _t: f64, _y: &[Complex64]) {}
    /// Largest admissible step magnitude from the state `y`.
    fn max_step(&self, _t: f64, _y: &[Complex64]) -> f64 {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub min_step: f64,
    /// Largest accepted normalised local error estimate.
    pub max_error: f64,
}

#[derive(Clone, Debug)]
pub struct Dp45 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Dp45 {
    fn default() -> Self {
        Dp45 { rtol: 1e-10, atol: 1e-14, h_init: 0.0, h_max: f64::INFINITY, h_min: 1e-14, max_steps: 1_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Dp45 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Dp45 { rtol, atol, ..Default::default() }
    }

    /// Integrate from `t0` to `t1` (either direction); `obs` sees every accepted state and may stop early.
    pub fn integrate<S, O>(&self, sys: &mut S, t0: f64, y0: &[Complex64], t1: f64, mut obs: O) -> Result<(f64, Vec<Complex64>, OdeStats)>
    where
        S: OdeSystem,
        O: FnMut(f64, &[Complex64]) -> Control,
    {
        self.integrate_with_stops(sys, t0, y0, t1, &[], &mut obs)
    }

    /// As [`Dp45::integrate`] but landing exactly on each of the sorted `stops` between t0 and t1.
    pub fn integrate_with_stops<S, O>(
        &self,
        sys: &mut S,
        t0: f64,
        y0: &[Complex64],
        t1: f64,
        stops: &[f64],
        obs: &mut O,
    ) -> Result<(f64, Vec<Complex64>, OdeStats)>
    where
        S: OdeSystem,
        O: FnMut(f64, &[Complex64]) -> Control,
    {
        let n = sys.dim();
        let dir = if t1 >= t0 { 1.0 } else { -1.0 };
        let mut stats = OdeStats { min_step: f64::INFINITY, ..Default::default() };
        let mut t = t0;
        let mut y = y0.to_vec();
        if t1 == t0 {
            return Ok((t, y, stats));
        }
        let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
        let mut ytmp = vec![Complex64::new(0.0, 0.0); n];
        let mut ynew = vec![Complex64::new(0.0, 0.0); n];
        sys.rhs(t, &y, &mut k[0]);
        stats.evaluations += 1;
        let mut h = if self.h_init > 0.0 {
            self.h_init
        } else {
            let yn = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let fn_ = k[0].iter().map(|v| v.norm()).fold(0.0, f64::max);
            let span = (t1 - t0).abs();
            if fn_ > 0.0 { (0.01 * (yn + 1e-3) / fn_).clamp(1e-6 * span, span) } else { span }
        };
        h = h.min(self.h_max);
        let mut stop_idx = 0;
        while stop_idx < stops.len() && (stops[stop_idx] - t0) * dir <= 0.0 {
            stop_idx += 1;
        }
        let mut fsal_valid = true;
        while (t1 - t) * dir > 0.0 {
            if stats.steps + stats.rejected >= self.max_steps {
                return Err(WkbError::StepUnderflow { t, h });
            }
            if !fsal_valid {
                sys.rhs(t, &y, &mut k[0]);
                stats.evaluations += 1;
            }
            let cap = sys.max_step(t, &y).min(self.h_max);
            h = h.min(cap);
            let target = if stop_idx < stops.len() && (stops[stop_idx] - t1) * dir < 0.0 { stops[stop_idx] } else { t1 };
            let remaining = (target - t).abs();
            let mut landing = false;
            if h >= remaining {
                h = remaining;
                landing = true;
            }
            if h < self.h_min * (1.0 + t.abs()) && !landing {
                return Err(WkbError::StepUnderflow { t, h });
            }
            let hs = h * dir;
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for j in 0..s {
                        if A[s][j] != 0.0 {
                            acc += k[j][i] * (hs * A[s][j]);
                        }
                    }
                    ytmp[i] = acc;
                }
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                sys.rhs(t + C[s] * hs, &ytmp, &mut tail[0]);
                stats.evaluations += 1;
            }
            let mut err = 0.0f64;
            for i in 0..n {
                let mut y5 = y[i];
                let mut e = Complex64::new(0.0, 0.0);
                for s in 0..7 {
                    y5 += k[s][i] * (hs * B5[s]);
                    e += k[s][i] * (hs * (B5[s] - B4[s]));
                }
                ynew[i] = y5;
                let sc = self.atol + self.rtol * y[i].norm().max(y5.norm());
                err = err.max(e.norm() / sc);
            }
            if !err.is_finite() {
                h *= 0.2;
                stats.rejected += 1;
                fsal_valid = true;
                continue;
            }
            if err <= 1.0 {
                t = if landing { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                stats.steps += 1;
                stats.min_step = stats.min_step.min(h);
                stats.max_error = stats.max_error.max(err);
                let last = k[6].clone();
                k[0] = last;
                sys.accept(t, &y);
                // accept() may change the RHS branch state, so refresh the first stage
                sys.rhs(t, &y, &mut k[0]);
                stats.evaluations += 1;
                fsal_valid = true;
                if landing && target != t1 {
                    stop_idx += 1;
                }
                if obs(t, &y) == Control::Stop {
                    return Ok((t, y, stats));
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !landing || fac < 1.0 {
                    h *= fac;
                }
            } else {
                stats.rejected += 1;
                h *= (0.9 * err.powf(-0.25)).clamp(0.1, 0.9);
                fsal_valid = true;
            }
        }
        Ok((t, y, stats))
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<S: OdeSystem>(sys: &S, t: f64, y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    let mut k1 = vec![Complex64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    sys.rhs(t, y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + k1[i] * (0.5 * h);
    }
    sys.rhs(t + 0.5 * h, &tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + k2[i] * (0.5 * h);
    }
    sys.rhs(t + 0.5 * h, &tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + k3[i] * h;
    }
    sys.rhs(t + h, &tmp, &mut k4);
    (0..n).map(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rot;
    impl OdeSystem for Rot {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[Complex64], dy: &mut [Complex64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let (t, y, st) = Dp45::with_tolerances(1e-12, 1e-14).integrate(&mut Rot, 0.0, &y0, 10.0, |_, _| Control::Continue).unwrap();
        assert_eq!(t, 10.0);
        assert!((y[0].re - 10f64.cos()).abs() < 1e-10);
        assert!(st.steps > 10);
        let (_, yb, _) = Dp45::with_tolerances(1e-12, 1e-14).integrate(&mut Rot, 10.0, &y, 0.0, |_, _| Control::Continue).unwrap();
        assert!((yb[0].re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lands_on_stops() {
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut seen = Vec::new();
        let stops = [0.5, 1.0, 1.5];
        Dp45::default()
            .integrate_with_stops(&mut Rot, 0.0, &y0, 2.0, &stops, &mut |t, _| {
                seen.push(t);
                Control::Continue
            })
            .unwrap();
        for s in stops {
            assert!(seen.contains(&s));
        }
    }
}
