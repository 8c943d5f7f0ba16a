use std::sync::Arc;

use exact_wkb::borel::GridParams;
use exact_wkb::coeffield::Sign;
use exact_wkb::formal::{formal_wkb, gevrey_probe, numeric_roots, riccati_residual, roots_json, wkb_recursion, ProblemSpec};
use exact_wkb::geometry::{trace_trajectory, LiouvilleFrame, RayStatus, TraceOptions};
use exact_wkb::laplace::{monodromy, ExactRoot, LaplaceOptions};
use exact_wkb::problems::{catalog, entry};
use exact_wkb::validate::{compare_exact, remainder_scan, resummed_riccati_residual, transfer_matrix};
use exact_wkb::WkbError;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ProblemConfig, Resolved};
use crate::error::CliError;
use crate::output::{csv_table, f, to_value, OutDir};

fn frame(spec: &Arc<ProblemSpec>, cfg: &Resolved, theta: f64) -> Result<LiouvilleFrame, CliError> {
    Ok(LiouvilleFrame::new(spec.clone(), cfg.x0, Sign::Plus, theta)?)
}

fn grid(cfg: &Resolved) -> GridParams {
    GridParams {
        h: cfg.xi_max / cfg.xi_n as f64,
        n: cfg.xi_n,
        max_terms: cfg.tolerances.max_terms,
        tol_term: cfg.tolerances.tol_term,
        ..GridParams::default()
    }
}

fn laplace_opts(cfg: &Resolved) -> LaplaceOptions {
    LaplaceOptions { tol: cfg.tolerances.laplace_tol, ..LaplaceOptions::default() }
}

fn exact_root(spec: &Arc<ProblemSpec>, cfg: &Resolved, alpha: Sign) -> Result<ExactRoot, CliError> {
    let fr = frame(spec, cfg, cfg.theta_for(alpha))?;
    Ok(ExactRoot::new(spec.clone(), &fr, alpha, grid(cfg), laplace_opts(cfg))?)
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn problems_list() -> Value {
    to_value(&catalog())
}

pub fn formal(cfg: &Resolved, out: &mut OutDir) -> Result<(), CliError> {
    let spec = cfg.spec()?;
    let fr = frame(&spec, cfg, cfg.theta)?;
    let mut report = serde_json::Map::new();
    report.insert("problem".into(), json!(cfg.problem_name));
    report.insert("order".into(), json!(cfg.order));
    if spec.is_rational() {
        let roots = wkb_recursion(&spec, cfg.order)?;
        out.json("coeffs.json", &roots_json(&roots))?;
        let mut residual_zero = true;
        for alpha in [Sign::Plus, Sign::Minus] {
            residual_zero &= riccati_residual(&spec, roots.coeffs(alpha))?.iter().all(|r| r.is_zero());
        }
        report.insert("riccati_residual_zero".into(), json!(residual_zero));
        let xs: Vec<Complex64> = cfg.ts().iter().map(|t| cfg.x0 + (cfg.x_end - cfg.x0) * *t).collect();
        let mut gevrey = Vec::new();
        let mut rows = Vec::new();
        for alpha in cfg.alphas() {
            let w = formal_wkb(&roots, &fr, alpha, &xs)?;
            let g = gevrey_probe(&w);
            for (k, s) in g.sup_norms.iter().enumerate() {
                rows.push(vec![alpha.label().to_string(), k.to_string(), f(*s)]);
            }
            gevrey.push(json!({ "alpha": alpha.label(), "fit": to_value(&g) }));
        }
        out.csv("gevrey.csv", &csv_table(&["alpha", "k", "sup_norm"], &rows))?;
        report.insert("gevrey".into(), Value::Array(gevrey));
    } else {
        // Non-rational coefficients: values at x₀ from the numeric recursion.
        let r = fr.sqrt_x0();
        let mut tab = serde_json::Map::new();
        for alpha in [Sign::Plus, Sign::Minus] {
            let v = numeric_roots(&spec, cfg.x0, r, alpha, cfg.order);
            tab.insert(alpha.label().into(), Value::Array(v.into_iter().map(cjson).collect()));
        }
        out.json("coeffs.json", &json!({ "order": cfg.order, "x": cjson(cfg.x0), "values": tab }))?;
    }
    if let ProblemConfig::Builtin { builtin, .. } = &cfg.problem {
        let e = entry(builtin).map_err(|e| CliError::Config(e.to_string()))?;
        let mut fx = Vec::new();
        for fixture in &e.fixtures {
            let x = Complex64::new(fixture.x, 0.0);
            let r = fr.sqrt_at(x)?;
            let got = numeric_roots(&spec, x, r, fixture.alpha, fixture.k)[fixture.k];
            let err = (got - fixture.value).norm();
            fx.push(json!({
                "alpha": fixture.alpha.label(), "k": fixture.k, "x": fixture.x, "expected": fixture.value,
                "got": cjson(got), "abs_err": err, "pass": err <= 1e-12 * (1.0 + fixture.value.abs()),
            }));
        }
        report.insert("fixtures".into(), Value::Array(fx));
    }
    out.json("report.json", &Value::Object(report))
}

#[derive(Serialize)]
struct TraceRow {
    theta: f64,
    file: String,
    plus: RayStatus,
    minus: RayStatus,
    period: Option<f64>,
}

pub fn trace(cfg: &Resolved, out: &mut OutDir) -> Result<(), CliError> {
    let spec = cfg.spec()?;
    let opts = TraceOptions {
        rtol: cfg.tolerances.trace_rtol,
        stop_radius: cfg.tolerances.stop_radius,
        period: spec.period,
        ..TraceOptions::default()
    };
    let mut rows = Vec::new();
    for (i, &theta) in cfg.thetas.iter().enumerate() {
        let fr = frame(&spec, cfg, theta)?;
        let t = trace_trajectory(&fr, cfg.x0, &opts)?;
        let file = format!("trajectory_{i}.csv");
        out.csv(&file, &t.to_csv())?;
        rows.push(TraceRow { theta, file, plus: t.plus.status.clone(), minus: t.minus.status.clone(), period: t.period });
    }
    out.json("report.json", &json!({ "problem": cfg.problem_name, "x_start": cjson(cfg.x0), "trajectories": to_value(&rows) }))
}

pub fn resum(cfg: &Resolved, out: &mut OutDir) -> Result<(), CliError> {
    let spec = cfg.spec()?;
    let ts = cfg.ts();
    let mut borel_rows = Vec::new();
    let mut tables = Vec::new();
    let mut conv = Vec::new();
    let mut roots = Vec::new();
    for alpha in cfg.alphas() {
        let root = exact_root(&spec, cfg, alpha)?;
        let field = root.borel_field(cfg.x0)?;
        let sample = root.sample(cfg.x0)?;
        for (k, t) in field.tau.rows[0].iter().enumerate() {
            let s = sample.sigma[k];
            borel_rows.push(vec![alpha.label().to_string(), k.to_string(), f(k as f64 * field.h), f(t.re), f(t.im), f(s.re), f(s.im)]);
        }
        conv.push(json!({
            "alpha": alpha.label(), "theta": field.theta, "report": to_value(&field.report),
            "exponential_type": to_value(&sample.fit),
        }));
        tables.push((alpha, root.psi_on_segment(cfg.x_end, &ts, &cfg.hbar)?));
        roots.push(root);
    }
    out.csv("borel.csv", &csv_table(&["alpha", "k", "abs_xi", "re_tau", "im_tau", "re_sigma", "im_sigma"], &borel_rows))?;
    let both = roots.len() == 2;
    let mut rows = Vec::new();
    let points = &tables[0].1.points;
    for (i, x) in points.iter().enumerate() {
        for (m, hb) in cfg.hbar.iter().enumerate() {
            let mut row = vec![f(x.re), f(x.im), f(hb.re), f(hb.im)];
            let mut tail: f64 = 0.0;
            for alpha in [Sign::Plus, Sign::Minus] {
                match tables.iter().find(|(a, _)| *a == alpha) {
                    Some((_, t)) => {
                        row.push(f(t.psi[i][m].re));
                        row.push(f(t.psi[i][m].im));
                        tail = tail.max(t.tail_bound[m]);
                    }
                    None => row.extend([String::new(), String::new()]),
                }
            }
            row.push(f(tail));
            if both {
                let w = roots[0].s(*x, *hb)? - roots[1].s(*x, *hb)?;
                row.push(f(w.re));
                row.push(f(w.im));
            } else {
                row.extend([String::new(), String::new()]);
            }
            rows.push(row);
        }
    }
    let cols = ["re_x", "im_x", "re_hbar", "im_hbar", "re_psi_plus", "im_psi_plus", "re_psi_minus", "im_psi_minus", "tail_bound", "re_wronskian", "im_wronskian"];
    out.csv("solution.csv", &csv_table(&cols, &rows))?;
    out.json("report.json", &json!({ "problem": cfg.problem_name, "convergence": conv }))
}

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    fn le(name: String, value: f64, tol: f64, detail: Value) -> Check {
        Check { name, value, tol, pass: value <= tol, detail }
    }
}

/// Runs every enabled check; a numeric failure inside a check is reported and aborts the run.
pub fn validate(cfg: &Resolved, out: &mut OutDir) -> Result<Vec<Check>, CliError> {
    let spec = cfg.spec()?;
    let mut checks = Vec::new();
    let result = run_checks(cfg, &spec, &mut checks, out);
    let pass = checks.iter().all(|c| c.pass);
    let mut data = json!({ "problem": cfg.problem_name, "checks": to_value(&checks), "pass": pass && result.is_ok() });
    if let Err(e) = &result {
        data["error"] = json!(e.to_string());
    }
    out.json("report.json", &data)?;
    result?;
    Ok(checks)
}

fn run_checks(cfg: &Resolved, spec: &Arc<ProblemSpec>, checks: &mut Vec<Check>, out: &mut OutDir) -> Result<(), CliError> {
    let v = &cfg.validate;
    let roots: Vec<ExactRoot> = cfg.alphas().into_iter().map(|a| exact_root(spec, cfg, a)).collect::<Result<_, _>>()?;
    if v.compare {
        let mut rows = Vec::new();
        for root in &roots {
            let r = compare_exact(root, cfg.x_end, &cfg.ts(), &cfg.hbar, cfg.tolerances.ode_rtol)?;
            for (i, x) in r.table.points.iter().enumerate() {
                for (m, hb) in cfg.hbar.iter().enumerate() {
                    let a = r.table.psi[i][m];
                    let b = r.oracle[i][m];
                    rows.push(vec![root.alpha.label().to_string(), f(x.re), f(x.im), f(hb.re), f(hb.im), f(a.re), f(a.im), f(b.re), f(b.im)]);
                }
            }
            checks.push(Check::le(
                format!("compare_exact[{}]", root.alpha.label()),
                r.worst(),
                v.compare_tol,
                json!({ "per_hbar": r.max_rel_dev, "tail_bound": r.table.tail_bound }),
            ));
        }
        let cols = ["alpha", "re_x", "im_x", "re_hbar", "im_hbar", "re_psi", "im_psi", "re_oracle", "im_oracle"];
        out.csv("solution.csv", &csv_table(&cols, &rows))?;
    }
    if v.riccati {
        let n = v.riccati_points.max(1);
        let pts: Vec<Complex64> = (0..n).map(|k| cfg.x0 + (cfg.x_end - cfg.x0) * ((k as f64 + 0.5) / n as f64)).collect();
        for root in &roots {
            let r = resummed_riccati_residual(root, &pts, &cfg.hbar, 1e-3)?;
            checks.push(Check::le(format!("riccati_residual[{}]", root.alpha.label()), r.max, v.riccati_tol, json!(r.normalized)));
        }
    }
    if v.wronskian && roots.len() == 2 {
        let x = v.wronskian_x.map(|c| c.value()).unwrap_or((cfg.x0 + cfg.x_end) * 0.5);
        let target = roots[0].frame().sqrt_at(x)?;
        let mut hs = cfg.hbar.clone();
        hs.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let ws: Vec<Complex64> = hs.iter().map(|h| Ok::<_, WkbError>(roots[0].s(x, *h)? - roots[1].s(x, *h)?)).collect::<Result<_, _>>()?;
        let errs: Vec<f64> = ws.iter().map(|w| (w - target).norm()).collect();
        // Errors already at rounding level count as non-increasing.
        let floor = 1e-12 * target.norm();
        let decreasing = errs.windows(2).all(|e| e[1] < e[0] || e[1] <= floor);
        let limit = if hs.len() >= 2 {
            let (h1, h2) = (hs[hs.len() - 2].norm_sqr(), hs[hs.len() - 1].norm_sqr());
            let (w1, w2) = (ws[ws.len() - 2], ws[ws.len() - 1]);
            (w2 * h1 - w1 * h2) / (h1 - h2)
        } else {
            ws[0]
        };
        let lim_err = (limit - target).norm();
        checks.push(Check {
            name: "wronskian_limit".into(),
            value: lim_err,
            tol: v.wronskian_tol,
            pass: decreasing && lim_err <= v.wronskian_tol,
            detail: json!({ "x": cjson(x), "sqrt_d0": cjson(target), "errors": errs, "decreasing": decreasing, "extrapolated": cjson(limit) }),
        });
    }
    if v.remainder && spec.is_rational() {
        let rc = &v.remainder_cfg;
        let x = rc.x.map(|c| c.value()).unwrap_or((cfg.x0 + cfg.x_end) * 0.5);
        let root = &roots[0];
        let formal_roots = wkb_recursion(spec, cfg.order.max(rc.n_max + 1))?;
        let w = formal_wkb(&formal_roots, root.frame(), root.alpha, &[x])?;
        let rot = Complex64::from_polar(1.0, root.theta());
        let count = rc.count.max(2);
        let hs: Vec<Complex64> = (0..count)
            .map(|k| rot * rc.hbar_min * (rc.hbar_max / rc.hbar_min).powf(k as f64 / (count - 1) as f64))
            .collect();
        let scan = remainder_scan(&w, root, 0, rc.n_max, &hs)?;
        for n in 1..=rc.n_max {
            // Every sample below the noise floor: the truncation is exact and there is nothing to fit.
            let (value, pass) = match scan.slopes[n] {
                Some(s) => ((s - n as f64).abs(), (s - n as f64).abs() <= v.slope_tol),
                None => (0.0, scan.excluded[n].iter().all(|e| *e)),
            };
            checks.push(Check {
                name: format!("remainder_slope[n={n}]"),
                value,
                tol: v.slope_tol,
                pass,
                detail: json!({ "slope": scan.slopes[n], "log_c": scan.log_c[n], "remainders": scan.remainders[n] }),
            });
        }
    }
    let want_mono = v.monodromy.unwrap_or(spec.period.is_some());
    if want_mono {
        let period = spec.period.ok_or_else(|| CliError::Config("monodromy check needs a periodic problem".into()))?;
        let fr = frame(spec, cfg, cfg.theta)?;
        let opts = TraceOptions { rtol: cfg.tolerances.trace_rtol, stop_radius: cfg.tolerances.stop_radius, period: Some(period), ..TraceOptions::default() };
        let t = trace_trajectory(&fr, cfg.x0, &opts)?;
        let closed = matches!(t.plus.status, RayStatus::CompleteClosed { .. });
        checks.push(Check { name: "trajectory_closed".into(), value: if closed { 0.0 } else { 1.0 }, tol: 0.0, pass: closed, detail: to_value(&t.plus.status) });
        if let Some(omega) = t.period {
            let path = [cfg.x0, cfg.x0 + period];
            for root in &roots {
                let mono = monodromy(root, cfg.x0, omega, period, v.monodromy_nodes, &cfg.hbar)?;
                let mut worst: f64 = 0.0;
                let mut detail = Vec::new();
                for (m, hb) in cfg.hbar.iter().enumerate() {
                    let tm = transfer_matrix(spec, &path, *hb, cfg.tolerances.ode_rtol)?;
                    let la = mono.log_values[m];
                    let rel = tm.eigenvalues.iter().map(|e| ((e.ln() - la).exp() - 1.0).norm()).fold(f64::INFINITY, f64::min);
                    worst = worst.max(rel);
                    detail.push(json!({
                        "hbar": cjson(*hb), "log_a": cjson(la), "log_leading": cjson(-mono.loop_lambda / hb),
                        "log_eigenvalues": [cjson(tm.eigenvalues[0].ln()), cjson(tm.eigenvalues[1].ln())],
                        "rel_err": rel, "abel_rel_err": tm.abel_rel_err,
                    }));
                }
                checks.push(Check::le(format!("monodromy[{}]", root.alpha.label()), worst, v.monodromy_tol, Value::Array(detail)));
            }
        }
    }
    Ok(())
}
