use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffield::Sign;
use crate::error::{Result, WkbError};
use crate::formal::ProblemSpec;

#[derive(Clone, Debug, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
}

/// Expected value of s_α⁽ᵏ⁾ at a point.
#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub alpha: Sign,
    pub k: usize,
    pub x: f64,
    pub value: f64,
    pub source: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectedCritical {
    /// Turning points (location, order) for default parameters.
    pub turning_points: Vec<(Complex64, usize)>,
    pub simple_poles: Vec<Complex64>,
    /// Order of infinity as a critical point of D₀dx²; None when D₀ is not rational.
    pub infinity_order: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemCatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamInfo>,
    /// Coefficient templates in the `x`, `h` grammar; `{name}` is replaced by the parameter value.
    pub p: &'static str,
    pub q: &'static str,
    pub x0: Complex64,
    pub theta: f64,
    /// Recommended working segment.
    pub region: (Complex64, Complex64),
    pub period: Option<f64>,
    pub expected: ExpectedCritical,
    pub fixtures: Vec<Fixture>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn catalog() -> Vec<ProblemCatalogEntry> {
    let closed = "closed form";
    vec![
        ProblemCatalogEntry {
            name: "airy",
            description: "h^2 psi'' - x psi = 0",
            params: vec![],
            p: "0",
            q: "-x",
            x0: c(1.0),
            theta: 0.0,
            region: (c(1.0), c(2.0)),
            period: None,
            expected: ExpectedCritical { turning_points: vec![(c(0.0), 1)], simple_poles: vec![], infinity_order: Some(5) },
            fixtures: vec![
                Fixture { alpha: Sign::Plus, k: 1, x: 1.0, value: 0.25, source: closed },
                Fixture { alpha: Sign::Minus, k: 1, x: 1.0, value: 0.25, source: closed },
                Fixture { alpha: Sign::Plus, k: 2, x: 1.0, value: -5.0 / 32.0, source: closed },
                Fixture { alpha: Sign::Minus, k: 2, x: 1.0, value: 5.0 / 32.0, source: closed },
            ],
        },
        ProblemCatalogEntry {
            name: "weber",
            description: "h^2 psi'' - (x^2 - a) psi = 0",
            params: vec![ParamInfo { name: "a", default: 4.0 }],
            p: "0",
            q: "-(x^2 - {a})",
            x0: c(3.0),
            theta: 0.0,
            region: (c(3.0), c(4.0)),
            period: None,
            expected: ExpectedCritical { turning_points: vec![(c(-2.0), 1), (c(2.0), 1)], simple_poles: vec![], infinity_order: Some(6) },
            fixtures: vec![
                // s⁽¹⁾ = D₀′/(4D₀) = x/(2(x² − a)).
                Fixture { alpha: Sign::Plus, k: 1, x: 3.0, value: 3.0 / 10.0, source: closed },
            ],
        },
        ProblemCatalogEntry {
            name: "weber_deformed",
            description: "h^2 psi'' - (x^2 - 4 + 2h) psi = 0",
            params: vec![],
            p: "0",
            q: "-(x^2 - 4) - 2*h",
            x0: c(3.0),
            theta: 0.0,
            region: (c(3.0), c(4.0)),
            period: None,
            expected: ExpectedCritical { turning_points: vec![(c(-2.0), 1), (c(2.0), 1)], simple_poles: vec![], infinity_order: Some(6) },
            fixtures: vec![],
        },
        ProblemCatalogEntry {
            name: "mathieu",
            description: "h^2 psi'' - 2(cos(x) - E) psi = 0",
            params: vec![ParamInfo { name: "E", default: 2.0 }],
            p: "0",
            q: "2*({E} - cos(x))",
            x0: c(0.0),
            theta: FRAC_PI_2,
            region: (c(0.0), c(2.0 * PI)),
            period: Some(2.0 * PI),
            expected: ExpectedCritical { turning_points: vec![], simple_poles: vec![], infinity_order: None },
            fixtures: vec![],
        },
        ProblemCatalogEntry {
            name: "constant_q",
            description: "h^2 psi'' - psi = 0",
            params: vec![],
            p: "0",
            q: "-1",
            x0: c(0.0),
            theta: 0.0,
            region: (c(0.0), c(1.0)),
            period: None,
            expected: ExpectedCritical { turning_points: vec![], simple_poles: vec![], infinity_order: Some(4) },
            fixtures: vec![
                Fixture { alpha: Sign::Plus, k: 1, x: 0.5, value: 0.0, source: closed },
                Fixture { alpha: Sign::Plus, k: 2, x: 0.5, value: 0.0, source: closed },
            ],
        },
    ]
}

pub fn entry(name: &str) -> Result<ProblemCatalogEntry> {
    catalog().into_iter().find(|e| e.name == name).ok_or_else(|| WkbError::UnknownProblem(name.to_string()))
}

fn substitute(template: &str, values: &BTreeMap<String, f64>) -> String {
    let mut out = template.to_string();
    for (k, v) in values {
        out = out.replace(&format!("{{{k}}}"), &format!("({v})"));
    }
    out
}

/// Resolve the parameter map against the entry's defaults, rejecting unknown or non-finite values.
pub fn resolve_params(e: &ProblemCatalogEntry, params: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    for (k, v) in params {
        if !e.params.iter().any(|p| p.name == k) {
            return Err(WkbError::InvalidParameter(format!("problem `{}` has no parameter `{k}`", e.name)));
        }
        if !v.is_finite() {
            return Err(WkbError::InvalidParameter(format!("parameter `{k}` must be finite")));
        }
    }
    Ok(e.params.iter().map(|p| (p.name.to_string(), params.get(p.name).copied().unwrap_or(p.default))).collect())
}

/// The (p, q) expressions of a catalog problem with parameters filled in.
pub fn builtin_exprs(name: &str, params: &BTreeMap<String, f64>) -> Result<(String, String)> {
    let e = entry(name)?;
    let values = resolve_params(&e, params)?;
    Ok((substitute(e.p, &values), substitute(e.q, &values)))
}

pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<ProblemSpec> {
    let e = entry(name)?;
    let (p, q) = builtin_exprs(name, params)?;
    let spec = ProblemSpec::from_exprs(name, &p, &q)?;
    Ok(match e.period {
        Some(t) => spec.with_period(c(t)),
        None => spec,
    })
}
