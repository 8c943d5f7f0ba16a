use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use exact_wkb::coeffield::Sign;
use exact_wkb::formal::ProblemSpec;
use exact_wkb::problems::{builtin, entry};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A real number or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum CNum {
    Real(f64),
    Pair([f64; 2]),
}

impl CNum {
    pub fn value(self) -> Complex64 {
        match self {
            CNum::Real(r) => Complex64::new(r, 0.0),
            CNum::Pair([a, b]) => Complex64::new(a, b),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ProblemConfig {
    Builtin {
        builtin: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Inline {
        #[serde(default)]
        name: Option<String>,
        p: String,
        q: String,
        #[serde(default)]
        period: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AlphaSel {
    Plus,
    Minus,
    Both,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub tol_term: f64,
    pub max_terms: usize,
    pub laplace_tol: f64,
    pub trace_rtol: f64,
    pub stop_radius: f64,
    pub ode_rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol_term: 1e-12, max_terms: 40, laplace_tol: 1e-8, trace_rtol: 1e-12, stop_radius: 1e-5, ode_rtol: 1e-10 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RemainderConfig {
    pub x: Option<CNum>,
    pub n_max: usize,
    pub hbar_min: f64,
    pub hbar_max: f64,
    pub count: usize,
}

impl Default for RemainderConfig {
    fn default() -> Self {
        RemainderConfig { x: None, n_max: 3, hbar_min: 0.02, hbar_max: 0.2, count: 8 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    pub compare: bool,
    pub compare_tol: f64,
    pub riccati: bool,
    pub riccati_points: usize,
    pub riccati_tol: f64,
    pub wronskian: bool,
    pub wronskian_x: Option<CNum>,
    pub wronskian_tol: f64,
    pub remainder: bool,
    pub remainder_cfg: RemainderConfig,
    pub slope_tol: f64,
    pub monodromy: Option<bool>,
    pub monodromy_nodes: usize,
    pub monodromy_tol: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            compare: true,
            compare_tol: 1e-5,
            riccati: true,
            riccati_points: 20,
            riccati_tol: 1e-6,
            wronskian: true,
            wronskian_x: None,
            wronskian_tol: 1e-3,
            remainder: true,
            remainder_cfg: RemainderConfig::default(),
            slope_tol: 0.25,
            monodromy: None,
            monodromy_nodes: 128,
            monodromy_tol: 1e-4,
        }
    }
}

/// The JSON run configuration as written by the user.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub x0: Option<CNum>,
    #[serde(default)]
    pub x_end: Option<CNum>,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Direction used for the minus root; defaults to `theta`.
    #[serde(default)]
    pub theta_minus: Option<f64>,
    #[serde(default)]
    pub thetas: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha: Option<AlphaSel>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub xi_max: Option<f64>,
    #[serde(default)]
    pub xi_n: Option<usize>,
    /// ħ-samples; real values are rotated by e^{iθ}.
    #[serde(default)]
    pub hbar: Option<Vec<CNum>>,
    #[serde(default)]
    pub x_samples: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub validate: ValidateConfig,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub theta: Option<f64>,
    pub hbar: Option<Vec<Complex64>>,
    pub order: Option<usize>,
    pub xi_max: Option<f64>,
    pub xi_n: Option<usize>,
}

/// Fully defaulted configuration; its canonical JSON is what gets hashed.
#[derive(Clone, Debug, Serialize)]
pub struct Resolved {
    pub problem: ProblemConfig,
    pub problem_name: String,
    pub p: String,
    pub q: String,
    pub period: Option<f64>,
    pub x0: Complex64,
    pub x_end: Complex64,
    pub theta: f64,
    pub theta_minus: f64,
    pub thetas: Vec<f64>,
    pub alpha: AlphaSel,
    pub order: usize,
    pub xi_max: f64,
    pub xi_n: usize,
    pub hbar: Vec<Complex64>,
    pub x_samples: usize,
    pub tolerances: Tolerances,
    pub validate: ValidateConfig,
    pub seed: u64,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{name}` must be positive, got {v}")))
    }
}

impl Resolved {
    pub fn spec(&self) -> Result<Arc<ProblemSpec>, CliError> {
        let spec = match &self.problem {
            ProblemConfig::Builtin { builtin: name, params } => builtin(name, params),
            ProblemConfig::Inline { p, q, period, .. } => ProblemSpec::from_exprs(&self.problem_name, p, q)
                .map(|s| match period {
                    Some(t) => s.with_period(Complex64::new(*t, 0.0)),
                    None => s,
                }),
        }
        .map_err(|e| CliError::Config(format!("problem: {e}")))?;
        Ok(Arc::new(spec))
    }

    pub fn alphas(&self) -> Vec<Sign> {
        match self.alpha {
            AlphaSel::Plus => vec![Sign::Plus],
            AlphaSel::Minus => vec![Sign::Minus],
            AlphaSel::Both => vec![Sign::Plus, Sign::Minus],
        }
    }

    pub fn theta_for(&self, alpha: Sign) -> f64 {
        match alpha {
            Sign::Plus => self.theta,
            Sign::Minus => self.theta_minus,
        }
    }

    /// Points x₀ + t(x_end − x₀), t = k/(n−1).
    pub fn ts(&self) -> Vec<f64> {
        let n = self.x_samples.max(2);
        (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
    }

    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn resolve(cfg: &RunConfig, ov: &Overrides) -> Result<Resolved, CliError> {
    let (problem_name, p, q, period, cat_theta, cat_end) = match &cfg.problem {
        ProblemConfig::Builtin { builtin: name, params } => {
            let e = entry(name).map_err(|e| CliError::Config(format!("problem: {e}")))?;
            let (p, q) = exact_wkb::problems::builtin_exprs(name, params).map_err(|e| CliError::Config(format!("problem.params: {e}")))?;
            (name.clone(), p, q, e.period, Some(e.theta), Some(e.region.1))
        }
        ProblemConfig::Inline { name, p, q, period } => {
            (name.clone().unwrap_or_else(|| "custom".into()), p.clone(), q.clone(), *period, None, None)
        }
    };
    let x0 = cfg.x0.ok_or_else(|| CliError::Config("missing field `x0`".into()))?.value();
    let theta = ov.theta.or(cfg.theta).or(cat_theta).unwrap_or(0.0);
    let theta_minus = cfg.theta_minus.unwrap_or(theta);
    let x_end = match cfg.x_end {
        Some(v) => v.value(),
        None => cat_end.ok_or_else(|| CliError::Config("missing field `x_end`".into()))?,
    };
    let rot = Complex64::from_polar(1.0, theta);
    let hbar = match &ov.hbar {
        Some(v) => v.clone(),
        None => match &cfg.hbar {
            Some(v) => v
                .iter()
                .map(|c| match c {
                    CNum::Real(r) => rot * *r,
                    CNum::Pair(_) => c.value(),
                })
                .collect(),
            None => [0.05, 0.1, 0.2].iter().map(|h| rot * *h).collect(),
        },
    };
    let r = Resolved {
        problem: cfg.problem.clone(),
        problem_name,
        p,
        q,
        period,
        x0,
        x_end,
        theta,
        theta_minus,
        thetas: cfg.thetas.clone().unwrap_or_else(|| vec![theta]),
        alpha: cfg.alpha.unwrap_or(AlphaSel::Both),
        order: ov.order.or(cfg.order).unwrap_or(12),
        xi_max: ov.xi_max.or(cfg.xi_max).unwrap_or(5.0),
        xi_n: ov.xi_n.or(cfg.xi_n).unwrap_or(250),
        hbar,
        x_samples: cfg.x_samples.unwrap_or(11),
        tolerances: cfg.tolerances.clone(),
        validate: cfg.validate.clone(),
        seed: cfg.seed.unwrap_or(0),
    };
    check(&r)?;
    Ok(r)
}

fn check(r: &Resolved) -> Result<(), CliError> {
    let t = &r.tolerances;
    positive("tolerances.tol_term", t.tol_term)?;
    positive("tolerances.laplace_tol", t.laplace_tol)?;
    positive("tolerances.trace_rtol", t.trace_rtol)?;
    positive("tolerances.stop_radius", t.stop_radius)?;
    positive("tolerances.ode_rtol", t.ode_rtol)?;
    let v = &r.validate;
    positive("validate.compare_tol", v.compare_tol)?;
    positive("validate.riccati_tol", v.riccati_tol)?;
    positive("validate.wronskian_tol", v.wronskian_tol)?;
    positive("validate.slope_tol", v.slope_tol)?;
    positive("validate.monodromy_tol", v.monodromy_tol)?;
    positive("xi_max", r.xi_max)?;
    if r.xi_n < 2 {
        return Err(CliError::Config("`xi_n` must be at least 2".into()));
    }
    if r.order == 0 {
        return Err(CliError::Config("`order` must be at least 1".into()));
    }
    if r.hbar.is_empty() || r.hbar.iter().any(|h| h.norm() == 0.0 || !h.norm().is_finite()) {
        return Err(CliError::Config("`hbar` samples must be nonzero".into()));
    }
    if !(r.x0.re.is_finite() && r.x0.im.is_finite()) {
        return Err(CliError::Config("`x0` must be finite".into()));
    }
    let spec = r.spec()?;
    let d0 = spec.d0(r.x0);
    let h = Complex64::new(0.0, 0.0);
    if !(d0.norm() > 1e-12) || !d0.norm().is_finite() || !spec.p_eval(r.x0, h).norm().is_finite() || !spec.q_eval(r.x0, h).norm().is_finite() {
        return Err(CliError::Config(format!("`x0` = {} is not a regular point (D0 = {d0})", r.x0)));
    }
    Ok(())
}
