use std::sync::Arc;

use exact_wkb::borel::{convolve, Tri};
use exact_wkb::coeffield::{parse_coeff, FieldElement, Poly, RationalFunction};
use exact_wkb::formal::ProblemSpec;
use exact_wkb::geometry::LiouvilleFrame;
use exact_wkb::laplace::{laplace_transform, LaplaceOptions};
use exact_wkb::coeffield::Sign;
use exact_wkb::validate::{direct_solve, transfer_matrix};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 1..5).prop_map(|c| Poly::from_i64(&c))
}

fn nonzero_poly() -> impl Strategy<Value = Poly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn rational() -> impl Strategy<Value = RationalFunction> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| RationalFunction::new(n, d).unwrap())
}

fn cplx() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn airy_d0() -> Arc<RationalFunction> {
    Arc::new(RationalFunction::from_poly(Poly::from_i64(&[0, 4])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!((&(&a * &b) / &b).unwrap(), a);
        }
    }

    #[test]
    fn rational_evaluation_is_a_homomorphism(a in rational(), b in rational(), x in cplx()) {
        let (va, vb) = (a.eval(x), b.eval(x));
        prop_assume!(va.is_finite() && vb.is_finite() && va.norm() < 1e6 && vb.norm() < 1e6);
        prop_assert!(close((&a * &b).eval(x), va * vb, 1e-9));
        prop_assert!(close((&a - &b).eval(x), va - vb, 1e-9));
    }

    #[test]
    fn print_parse_round_trip(a in rational()) {
        let text = a.to_string();
        let back = parse_coeff(&text).unwrap().lower().unwrap();
        let back = back.into_iter().next().unwrap_or_else(RationalFunction::zero);
        prop_assert_eq!(back, a, "printed as {}", text);
    }

    #[test]
    fn taylor_shift_preserves_values(p in poly(), c in -5i64..=5, x in cplx()) {
        let q = p.taylor_shift(&BigRational::from_integer(BigInt::from(c)));
        prop_assert!(close(q.eval(x - c as f64), p.eval(x), 1e-10));
    }

    #[test]
    fn quadratic_extension_inverse(a in rational(), b in rational(), x in 0.5f64..3.0) {
        let d0 = airy_d0();
        let e = FieldElement::new(a, b, &d0);
        prop_assume!(!e.is_zero());
        let one = e.try_mul(&e.inverse().unwrap()).unwrap();
        prop_assert!(one.try_sub(&FieldElement::one(&d0)).unwrap().is_zero());
        let x = Complex64::new(x, 0.1);
        let r = (d0.eval(x)).sqrt();
        let v = e.eval_with_sqrt(x, r);
        let conj = e.conjugate().eval_with_sqrt(x, r);
        prop_assert!(close(v * conj, e.norm().eval(x), 1e-8));
    }

    #[test]
    fn convolution_commutes(
        f in prop::collection::vec(cplx(), 21),
        g in prop::collection::vec(cplx(), 21),
        theta in 0.0f64..6.0,
    ) {
        let mut a = Tri::zeros(1, 20);
        let mut b = Tri::zeros(1, 20);
        for (j, row) in a.rows.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = f[(j + k) % 21] * (1.0 + 0.1 * j as f64);
            }
        }
        for (j, row) in b.rows.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = g[(j * 3 + k) % 21];
            }
        }
        let dxi = Complex64::from_polar(0.05, theta);
        let ab = convolve(&a, &b, dxi).unwrap();
        let ba = convolve(&b, &a, dxi).unwrap();
        prop_assert!(ab.max_diff(&ba) <= 1e-12 * (1.0 + ab.sup_norm()));
    }

    #[test]
    fn laplace_is_linear(
        u in prop::collection::vec(-1.0f64..1.0, 8),
        v in prop::collection::vec(-1.0f64..1.0, 8),
        s in cplx(),
        hbar in 0.05f64..0.3,
    ) {
        let h = 0.02;
        let n = 400;
        let f = |c: &[f64], xi: f64| -> Complex64 {
            Complex64::new(c.iter().rev().fold(0.0, |acc, a| acc * xi + a), 0.0) / (1.0 + xi * xi)
        };
        let uu: Vec<Complex64> = (0..=n).map(|k| f(&u, k as f64 * h)).collect();
        let vv: Vec<Complex64> = (0..=n).map(|k| f(&v, k as f64 * h)).collect();
        let mix: Vec<Complex64> = uu.iter().zip(&vv).map(|(a, b)| s * a + b).collect();
        let opts = LaplaceOptions::default();
        let hb = Complex64::new(hbar, 0.0);
        let lu = laplace_transform(&uu, h, 0.0, hb, &opts);
        let lv = laplace_transform(&vv, h, 0.0, hb, &opts);
        let lm = laplace_transform(&mix, h, 0.0, hb, &opts);
        if let (Ok(lu), Ok(lv), Ok(lm)) = (lu, lv, lm) {
            prop_assert!(close(lm.value, s * lu.value + lv.value, 1e-10));
        }
    }
}

fn airy_frame() -> LiouvilleFrame {
    let spec = Arc::new(ProblemSpec::from_exprs("airy", "0", "-x").unwrap());
    LiouvilleFrame::new(spec, Complex64::new(1.0, 0.0), Sign::Plus, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_group_law(x in 1.0f64..3.0, z1 in cplx(), z2 in cplx()) {
        let fr = airy_frame();
        let x = Complex64::new(x, 0.0);
        let (z1, z2) = (z1 * 0.3, z2 * 0.3);
        let r = fr.sqrt_at(x).unwrap();
        let (Ok((y, ry)), Ok(direct)) = (fr.flow_from(x, r, z1), fr.flow_from(x, r, z1 + z2)) else {
            return Ok(());
        };
        if let Ok(composed) = fr.flow_from(y, ry, z2) {
            prop_assert!(close(composed.0, direct.0, 1e-9));
        }
    }

    #[test]
    fn direct_solve_is_linear(a in cplx(), b in cplx(), hbar in 0.1f64..0.5) {
        let spec = ProblemSpec::from_exprs("ex", "x", "-(1 + x^2)").unwrap();
        let path = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.5), Complex64::new(1.5, 0.0)];
        let hb = Complex64::new(hbar, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        prop_assume!(a.norm() > 0.1 && b.norm() > 0.1);
        let e1 = direct_solve(&spec, &path, hb, [one, zero], 1e-11).unwrap().last();
        let e2 = direct_solve(&spec, &path, hb, [zero, one], 1e-11).unwrap().last();
        let m = direct_solve(&spec, &path, hb, [a, b], 1e-11).unwrap().last();
        let scale = e1.psi.norm().max(e2.psi.norm()) * (a.norm() + b.norm());
        prop_assert!((m.psi - (a * e1.psi + b * e2.psi)).norm() <= 1e-8 * scale);
        prop_assert!((m.dpsi - (a * e1.dpsi + b * e2.dpsi)).norm() <= 1e-8 * scale.max(e1.dpsi.norm()));
    }

    #[test]
    fn abel_identity_on_mild_problems(c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, hbar in 0.5f64..2.0) {
        let spec = ProblemSpec::from_exprs("mild", &format!("{c0} + {c1}*x"), "-(1 + x)").unwrap();
        let path = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)];
        let tm = transfer_matrix(&spec, &path, Complex64::new(hbar, 0.0), 1e-11).unwrap();
        prop_assert!(tm.abel_rel_err < 1e-8, "{}", tm.abel_rel_err);
    }
}

#[test]
fn direct_solve_tightens_with_rtol() {
    let spec = ProblemSpec::from_exprs("airy", "0", "-x").unwrap();
    let path = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
    let hb = Complex64::new(0.1, 0.0);
    let init = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    let fine = direct_solve(&spec, &path, hb, init, 1e-13).unwrap().last();
    let mut prev = f64::INFINITY;
    for rtol in [1e-6, 1e-9] {
        let s = direct_solve(&spec, &path, hb, init, rtol).unwrap().last();
        let err = ((s.psi - fine.psi) / fine.psi).norm();
        assert!(err < 100.0 * rtol && err < prev, "rtol {rtol}: {err}");
        prev = err;
    }
}
