use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Truncated Taylor expansion `f(x+ε) = Σ c_k ε^k` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub c: Vec<Complex64>,
}

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Jet {
    pub fn constant(v: Complex64, n: usize) -> Jet {
        let mut c = vec![cz(); n];
        if n > 0 {
            c[0] = v;
        }
        Jet { c }
    }

    /// The identity jet of the variable at `x`.
    pub fn variable(x: Complex64, n: usize) -> Jet {
        let mut j = Jet::constant(x, n);
        if n > 1 {
            j.c[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn value(&self) -> Complex64 {
        self.c.first().copied().unwrap_or_else(cz)
    }

    /// k-th derivative value k!·c_k.
    pub fn derivative_value(&self, k: usize) -> Complex64 {
        let f: f64 = (1..=k).map(|i| i as f64).product();
        self.c.get(k).copied().unwrap_or_else(cz) * f
    }

    /// Jet of the derivative, one order shorter.
    pub fn derivative(&self) -> Jet {
        Jet { c: self.c.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect() }
    }

    pub fn truncate(&self, n: usize) -> Jet {
        Jet { c: self.c.iter().take(n).copied().collect() }
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        Jet { c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn recip(&self) -> Jet {
        let n = self.c.len();
        let mut r = vec![cz(); n];
        let inv0 = 1.0 / self.c[0];
        for k in 0..n {
            let mut acc = if k == 0 { Complex64::new(1.0, 0.0) } else { cz() };
            for i in 1..=k {
                acc -= self.c[i] * r[k - i];
            }
            r[k] = acc * inv0;
        }
        Jet { c: r }
    }

    pub fn div(&self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut r = vec![cz(); n];
        let inv0 = 1.0 / o.c[0];
        for k in 0..n {
            let mut acc = self.c[k];
            for i in 1..=k {
                acc -= o.c[i] * r[k - i];
            }
            r[k] = acc * inv0;
        }
        Jet { c: r }
    }

    /// Square root whose constant term is `root0` (a chosen value of √c₀).
    pub fn sqrt_with(&self, root0: Complex64) -> Jet {
        let n = self.c.len();
        let mut r = vec![cz(); n];
        if n == 0 {
            return Jet { c: r };
        }
        r[0] = root0;
        let inv = 1.0 / (2.0 * root0);
        for k in 1..n {
            let mut acc = self.c[k];
            for i in 1..k {
                acc -= r[i] * r[k - i];
            }
            r[k] = acc * inv;
        }
        Jet { c: r }
    }

    pub fn powi(&self, e: i32) -> Jet {
        let n = self.c.len();
        let mut out = Jet::constant(Complex64::new(1.0, 0.0), n);
        let base = if e < 0 { self.recip() } else { self.clone() };
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Returns (cos f, sin f).
    pub fn cos_sin(&self) -> (Jet, Jet) {
        let n = self.c.len();
        let mut c = vec![cz(); n];
        let mut s = vec![cz(); n];
        if n == 0 {
            return (Jet { c }, Jet { c: s });
        }
        c[0] = self.c[0].cos();
        s[0] = self.c[0].sin();
        // k·s_k = Σ j f_j c_{k-j},  k·c_k = −Σ j f_j s_{k-j}
        for k in 1..n {
            let mut ac = cz();
            let mut as_ = cz();
            for j in 1..=k {
                let w = self.c[j] * j as f64;
                as_ += w * c[k - j];
                ac -= w * s[k - j];
            }
            c[k] = ac / k as f64;
            s[k] = as_ / k as f64;
        }
        (Jet { c }, Jet { c: s })
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut e = vec![cz(); n];
        if n == 0 {
            return Jet { c: e };
        }
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = cz();
            for j in 1..=k {
                acc += self.c[j] * j as f64 * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Jet { c: e }
    }

    /// Evaluate a real-coefficient polynomial on a jet by Horner's rule.
    pub fn poly(coeffs: &[f64], x: &Jet) -> Jet {
        let n = x.c.len();
        let mut acc = Jet::constant(cz(), n);
        for &v in coeffs.iter().rev() {
            acc = &acc * x;
            acc.c[0] += v;
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        Jet { c: (0..n).map(|i| self.c[i] + o.c[i]).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        Jet { c: (0..n).map(|i| self.c[i] - o.c[i]).collect() }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.iter().map(|v| -v).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![cz(); n];
        for (i, a) in self.c.iter().take(n).enumerate() {
            if *a == cz() {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += a * o.c[j];
            }
        }
        Jet { c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos_of_variable_matches_derivatives() {
        let x = Complex64::new(0.7, 0.2);
        let (c, s) = Jet::variable(x, 6).cos_sin();
        assert!((c.derivative_value(1) + x.sin()).norm() < 1e-14);
        assert!((c.derivative_value(2) + x.cos()).norm() < 1e-14);
        assert!((s.derivative_value(3) + x.cos()).norm() < 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Jet::variable(Complex64::new(2.0, 1.0), 7);
        let f = &(&x * &x) + &Jet::constant(Complex64::new(1.0, 0.0), 7);
        let r = f.sqrt_with(f.value().sqrt());
        let back = &r * &r;
        for k in 0..7 {
            assert!((back.c[k] - f.c[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn division_inverts_product() {
        let x = Jet::variable(Complex64::new(0.5, 0.0), 5);
        let a = Jet::poly(&[1.0, 2.0, 3.0], &x);
        let b = Jet::poly(&[2.0, -1.0], &x);
        let q = (&a * &b).div(&b);
        for k in 0..5 {
            assert!((q.c[k] - a.c[k]).norm() < 1e-13);
        }
    }
}
