use num_complex::Complex64;
use serde::Serialize;

use crate::coeffield::Poly;
use crate::formal::ProblemSpec;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Location {
    Finite { re: f64, im: f64 },
    Infinity,
}

impl Location {
    pub fn finite(z: Complex64) -> Self {
        Location::Finite { re: z.re, im: z.im }
    }

    pub fn point(&self) -> Option<Complex64> {
        match self {
            Location::Finite { re, im } => Some(Complex64::new(*re, *im)),
            Location::Infinity => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriticalKind {
    TurningPoint { order: usize },
    SimplePole,
    InfiniteCritical { order: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub location: Location,
    #[serde(flatten)]
    pub kind: CriticalKind,
}

impl CriticalPoint {
    pub fn is_finite_critical(&self) -> bool {
        matches!(self.kind, CriticalKind::TurningPoint { .. } | CriticalKind::SimplePole)
    }
}

/// Roots of a polynomial with complex coefficients (lowest degree first) by Aberth iteration.
pub fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let a: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for v in a.iter().rev() {
            d = d * z + p;
            p = p * z + v;
        }
        (p, d)
    };
    let radius = 1.0 + a[..n].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, d) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, d) = eval(*zi);
            if d.norm() > 0.0 {
                *zi -= p / d;
            }
        }
    }
    z
}

fn poly_roots_exact(p: &Poly) -> Vec<Complex64> {
    let c: Vec<Complex64> = p.to_f64().into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    poly_roots(&c)
}

/// Zeros and poles of D₀ with orders, plus the point at infinity.
pub fn classify_critical_points(spec: &ProblemSpec) -> Result<Vec<CriticalPoint>> {
    let ex = spec.require_exact()?;
    let mut out = Vec::new();
    for (m, f) in ex.d0.numer().squarefree() {
        for z in poly_roots_exact(&f) {
            out.push(CriticalPoint { location: Location::finite(z), kind: CriticalKind::TurningPoint { order: m } });
        }
    }
    for (m, f) in ex.d0.denom().squarefree() {
        let kind = if m == 1 { CriticalKind::SimplePole } else { CriticalKind::InfiniteCritical { order: m } };
        for z in poly_roots_exact(&f) {
            out.push(CriticalPoint { location: Location::finite(z), kind });
        }
    }
    // D₀(1/w)/w⁴ ~ w^{−(d+4)} with d = deg num − deg den
    let d = ex.d0.numer().degree().unwrap_or(0) as i64 - ex.d0.denom().degree().unwrap_or(0) as i64;
    let m = d + 4;
    let kind = match m {
        m if m >= 2 => Some(CriticalKind::InfiniteCritical { order: m as usize }),
        1 => Some(CriticalKind::SimplePole),
        0 => None,
        m => Some(CriticalKind::TurningPoint { order: (-m) as usize }),
    };
    if let Some(kind) = kind {
        out.push(CriticalPoint { location: Location::Infinity, kind });
    }
    Ok(out)
}

/// Order of the point at infinity as a pole of the quadratic differential, if known.
pub fn infinity_order(points: &[CriticalPoint]) -> Option<i64> {
    points.iter().find(|p| p.location == Location::Infinity).map(|p| match p.kind {
        CriticalKind::InfiniteCritical { order } => order as i64,
        CriticalKind::SimplePole => 1,
        CriticalKind::TurningPoint { order } => -(order as i64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aberth_finds_cubic_roots() {
        let c = [-6.0, 11.0, -6.0, 1.0].map(|v| Complex64::new(v, 0.0));
        let mut r: Vec<f64> = poly_roots(&c).iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn airy_points() {
        let s = ProblemSpec::from_exprs("airy", "0", "-x").unwrap();
        let pts = classify_critical_points(&s).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].kind, CriticalKind::TurningPoint { order: 1 });
        assert!(pts[0].location.point().unwrap().norm() < 1e-14);
        assert_eq!(pts[1], CriticalPoint { location: Location::Infinity, kind: CriticalKind::InfiniteCritical { order: 5 } });
    }

    #[test]
    fn double_pole_is_infinite_critical() {
        let s = ProblemSpec::from_exprs("p", "0", "-1/x^2 - 1").unwrap();
        let pts = classify_critical_points(&s).unwrap();
        assert!(pts.iter().any(|p| p.kind == CriticalKind::InfiniteCritical { order: 2 } && p.location != Location::Infinity));
    }
}
