use exact_wkb::formal::ProblemSpec;
use exact_wkb::geometry::{classify_critical_points, infinity_order, CriticalKind};
use exact_wkb::problems::{builtin, catalog, to_schrodinger};
use exact_wkb::validate::direct_solve;
use num_complex::Complex64;

#[test]
fn catalog_matches_classified_critical_points() {
    for e in catalog() {
        let spec = builtin(e.name, &Default::default()).unwrap();
        if !spec.is_rational() {
            assert!(e.expected.infinity_order.is_none(), "{}", e.name);
            continue;
        }
        let pts = classify_critical_points(&spec).unwrap();
        assert_eq!(infinity_order(&pts), e.expected.infinity_order, "{}", e.name);
        let mut turning: Vec<(Complex64, usize)> = pts
            .iter()
            .filter_map(|p| match p.kind {
                CriticalKind::TurningPoint { order } => p.location.point().map(|z| (z, order)),
                _ => None,
            })
            .collect();
        let poles: Vec<Complex64> =
            pts.iter().filter(|p| matches!(p.kind, CriticalKind::SimplePole)).filter_map(|p| p.location.point()).collect();
        assert_eq!(turning.len(), e.expected.turning_points.len(), "{}", e.name);
        assert_eq!(poles.len(), e.expected.simple_poles.len(), "{}", e.name);
        for (z, order) in &e.expected.turning_points {
            let i = turning.iter().position(|(w, m)| (w - z).norm() < 1e-10 && m == order);
            assert!(i.is_some(), "{}: turning point {z} of order {order} not found", e.name);
            turning.swap_remove(i.unwrap());
        }
    }
}

#[test]
fn catalog_fixtures_hold() {
    use exact_wkb::coeffield::{eval_field, Sign};
    use exact_wkb::formal::wkb_recursion;
    for e in catalog() {
        let spec = builtin(e.name, &Default::default()).unwrap();
        for f in &e.fixtures {
            let roots = wkb_recursion(&spec, f.k).unwrap();
            let v = eval_field(&roots.coeffs(f.alpha)[f.k], Complex64::new(f.x, 0.0), Sign::Plus).unwrap();
            assert!((v - f.value).norm() < 1e-12, "{} s{}^({}) at {}: {v} vs {}", e.name, f.alpha.label(), f.k, f.x, f.value);
        }
    }
}

#[test]
fn schrodinger_form_maps_back_to_original_solution() {
    let spec = ProblemSpec::from_exprs("drift", "x + h", "-(1 + x^2/4)").unwrap();
    let form = to_schrodinger(&spec).unwrap();
    let reduced = form.problem().unwrap();
    let hbar = Complex64::new(0.3, 0.0);
    let x0 = Complex64::new(0.0, 0.0);
    let x1 = Complex64::new(1.2, 0.4);
    let path = [x0, x1];
    let init = [Complex64::new(1.0, 0.0), Complex64::new(0.2, -0.1)];
    let psi = direct_solve(&spec, &path, hbar, init, 1e-12).unwrap().last();
    // φ = e^{E}ψ, ħφ′ = e^{E}(ħψ′ + ½pψ), E(x₀) = 0
    let phi_init = [init[0], init[1] + 0.5 * spec.p_eval(x0, hbar) * init[0]];
    let phi = direct_solve(&reduced, &path, hbar, phi_init, 1e-12).unwrap().last();
    let back = form.map_back(phi.psi, x0, x1, hbar).unwrap();
    assert!((back - psi.psi).norm() < 1e-8 * psi.psi.norm(), "{back} vs {}", psi.psi);
    let q = form.potential_eval(x1, hbar);
    let p = spec.p_eval(x1, hbar);
    let expected = 0.25 * p * p + 0.5 * hbar - spec.q_eval(x1, hbar);
    assert!((q - expected).norm() < 1e-12);
}
