//! Quadrature rules shared by the pipeline.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Result, WkbError};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Returns (Kronrod value, error estimate, roundoff floor 50·ε·∫|f|).
fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut Vec<Complex64>) -> (Vec<Complex64>, f64, f64)
where
    F: FnMut(f64, &mut [Complex64]),
{
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let mut k = vec![cz(); dim];
    let mut g = vec![cz(); dim];
    let mut abs = vec![0.0; dim];
    buf.resize(dim, cz());
    f(c, buf);
    for d in 0..dim {
        abs[d] = buf[d].norm() * WGK[7];
        k[d] = buf[d] * WGK[7];
        g[d] = buf[d] * WG[3];
    }
    for j in 0..7 {
        let dx = hl * XGK[j];
        for t in [c - dx, c + dx] {
            f(t, buf);
            for d in 0..dim {
                k[d] += buf[d] * WGK[j];
                abs[d] += buf[d].norm() * WGK[j];
                if j % 2 == 1 {
                    g[d] += buf[d] * WG[j / 2];
                }
            }
        }
    }
    let mut err = 0.0f64;
    let mut floor = 0.0f64;
    for d in 0..dim {
        k[d] *= hl;
        g[d] *= hl;
        err = err.max((k[d] - g[d]).norm());
        floor = floor.max(50.0 * f64::EPSILON * abs[d] * hl.abs());
    }
    (k, err, floor)
}

struct Piece {
    a: f64,
    b: f64,
    val: Vec<Complex64>,
    err: f64,
    floor: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of a vector-valued complex integrand over `[a, b]`.
///
/// Converged when the summed error estimate is below `max(atol, rtol·‖I‖∞)`, or when the worst piece is already at
/// its rounding floor (the returned error estimate then exceeds the request).
pub fn gauss_kronrod<F>(mut f: F, a: f64, b: f64, dim: usize, rtol: f64, atol: f64) -> Result<(Vec<Complex64>, f64)>
where
    F: FnMut(f64, &mut [Complex64]),
{
    let mut buf = Vec::with_capacity(dim);
    let (v, e, fl) = gk15(&mut f, a, b, dim, &mut buf);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, val: v, err: e, floor: fl });
    for _ in 0..4000 {
        let total: Vec<Complex64> = sum_pieces(&heap, dim);
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let scale = total.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if err <= atol.max(rtol * scale) {
            return Ok((total, err));
        }
        let worst = heap.pop().unwrap();
        if worst.err <= worst.floor {
            return Ok((total, err));
        }
        let m = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a).abs() < 1e-14 * (1.0 + worst.a.abs()) {
            heap.push(worst);
            break;
        }
        let (v1, e1, f1) = gk15(&mut f, worst.a, m, dim, &mut buf);
        let (v2, e2, f2) = gk15(&mut f, m, worst.b, dim, &mut buf);
        heap.push(Piece { a: worst.a, b: m, val: v1, err: e1, floor: f1 });
        heap.push(Piece { a: m, b: worst.b, val: v2, err: e2, floor: f2 });
    }
    let err: f64 = heap.iter().map(|p| p.err).sum();
    Err(WkbError::Quadrature(err))
}

fn sum_pieces(heap: &BinaryHeap<Piece>, dim: usize) -> Vec<Complex64> {
    let mut pieces: Vec<&Piece> = heap.iter().collect();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut out = vec![cz(); dim];
    for p in pieces {
        for d in 0..dim {
            out[d] += p.val[d];
        }
    }
    out
}

/// Scalar convenience wrapper around [`gauss_kronrod`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, rtol: f64, atol: f64) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    let (v, _) = gauss_kronrod(|t, out| out[0] = f(t), a, b, 1, rtol, atol)?;
    Ok(v[0])
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Legendre polynomials P_0 … P_n at `u`.
pub fn legendre_all(n: usize, u: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = u;
    }
    for k in 2..=n {
        p[k] = ((2 * k - 1) as f64 * u * p[k - 1] - (k - 1) as f64 * p[k - 2]) / k as f64;
    }
    p
}

/// Integrals ∫_{−1}^{u} f for each `u`, from samples of `f` at the `n` Gauss–Legendre nodes.
///
/// Uses the degree n−1 Legendre interpolant, exact whenever f is such a polynomial.
pub fn legendre_partial_integrals(nodes: &[f64], weights: &[f64], f: &[Complex64], us: &[f64]) -> Vec<Complex64> {
    let n = nodes.len();
    let mut coef = vec![cz(); n];
    for i in 0..n {
        let p = legendre_all(n - 1, nodes[i]);
        for k in 0..n {
            coef[k] += f[i] * (weights[i] * p[k]);
        }
    }
    for (k, c) in coef.iter_mut().enumerate() {
        *c *= (2 * k + 1) as f64 / 2.0;
    }
    us.iter()
        .map(|&u| {
            let p = legendre_all(n, u);
            let mut acc = coef[0] * (u + 1.0);
            for k in 1..n {
                acc += coef[k] * ((p[k + 1] - p[k - 1]) / (2 * k + 1) as f64);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_smooth_function() {
        let v = integrate(|t| Complex64::new(t.exp(), t.sin()), 0.0, 2.0, 1e-13, 1e-15).unwrap();
        assert!((v.re - (2f64.exp() - 1.0)).abs() < 1e-12);
        assert!((v.im - (1.0 - 2f64.cos())).abs() < 1e-12);
    }

    #[test]
    fn gl_weights_sum_and_moments() {
        let (x, w) = gauss_legendre(32);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((m - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn partial_integrals_of_polynomial() {
        let (x, w) = gauss_legendre(12);
        let f: Vec<Complex64> = x.iter().map(|t| Complex64::new(3.0 * t * t, 0.0)).collect();
        let r = legendre_partial_integrals(&x, &w, &f, &[-1.0, 0.0, 0.5, 1.0]);
        for (v, u) in r.iter().zip([-1.0f64, 0.0, 0.5, 1.0]) {
            assert!((v.re - (u.powi(3) + 1.0)).abs() < 1e-13);
        }
    }
}
