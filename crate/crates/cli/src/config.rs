//! Experiment configuration and its validation.

use std::path::{Path, PathBuf};

use bergman_coorbit::bergman::{HoloFunction, MultiIndex};
use bergman_coorbit::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOrders {
    pub radial: usize,
    pub phase: usize,
    pub modulus: usize,
}

/// One monomial `(re + i·im) z^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exponent: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomSpec {
    Psi,
    Polynomial(Vec<Term>),
}

/// A function file: a polynomial given by its monomial coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub n: usize,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub p: f64,
    pub epsilon: f64,
    pub box_radius: f64,
    pub truncation: u32,
    pub quadrature: QuadratureOrders,
    pub atom: AtomSpec,
    pub seed: u64,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 1,
            sigma: 3.0,
            alpha: 0.0,
            p: 2.0,
            epsilon: 0.15,
            box_radius: 1.2,
            truncation: 6,
            quadrature: QuadratureOrders {
                radial: 12,
                phase: 32,
                modulus: 1,
            },
            atom: AtomSpec::Psi,
            seed: 0,
            output: PathBuf::from("out"),
        }
    }
}

pub fn terms_to_function(n: usize, terms: &[Term], field: &str) -> Result<HoloFunction, CliError> {
    let mut f = HoloFunction::zero(n);
    for (k, t) in terms.iter().enumerate() {
        if t.exponent.len() != n {
            return Err(CliError::config(
                format!("{field}[{k}].exponent"),
                format!("expected {n} entries, got {}", t.exponent.len()),
            ));
        }
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(CliError::config(
                format!("{field}[{k}]"),
                "coefficients must be finite",
            ));
        }
        f.add_monomial(Complex64::new(t.re, t.im), MultiIndex(t.exponent.clone()));
    }
    Ok(f)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
        Self::from_value(
            serde_json::from_str(&text).map_err(|e| CliError::config("config", e.to_string()))?,
        )
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self, CliError> {
        let cfg: Self =
            serde_json::from_value(v).map_err(|e| CliError::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-level checks of the standing assumptions.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut errs = Vec::new();
        let nf = self.n as f64;
        if self.n == 0 {
            errs.push(("n", "must be at least 1".to_string()));
        }
        if !(self.sigma > nf) {
            errs.push((
                "sigma",
                format!("must exceed n = {}, got {}", self.n, self.sigma),
            ));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            errs.push(("p", format!("must lie in [1, ∞), got {}", self.p)));
        }
        let upper = self.p * (self.sigma - nf) - 1.0;
        if !(self.alpha > -1.0 && self.alpha < upper) {
            errs.push((
                "alpha",
                format!(
                    "must satisfy -1 < alpha < p(sigma-n)-1 = {upper}, got {}",
                    self.alpha
                ),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            errs.push(("epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        if !(self.box_radius >= 0.0 && self.box_radius.is_finite()) {
            errs.push((
                "box_radius",
                format!("must be non-negative, got {}", self.box_radius),
            ));
        }
        let q = &self.quadrature;
        if q.radial == 0 || q.phase == 0 || q.modulus == 0 {
            errs.push(("quadrature", "orders must be positive".to_string()));
        }
        if let AtomSpec::Polynomial(terms) = &self.atom {
            if terms.is_empty() {
                errs.push((
                    "atom",
                    "polynomial atom needs at least one term".to_string(),
                ));
            } else if let Err(CliError::Config(e)) = terms_to_function(self.n, terms, "atom") {
                return Err(CliError::Config(e));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(
                errs.into_iter().map(|(f, m)| (f.to_string(), m)).collect(),
            ))
        }
    }

    pub fn atom_function(&self) -> Result<HoloFunction, CliError> {
        match &self.atom {
            AtomSpec::Psi => Ok(HoloFunction::one(self.n)),
            AtomSpec::Polynomial(terms) => terms_to_function(self.n, terms, "atom"),
        }
    }
}

/// Parses `KEY=v1,v2,...` and returns one configuration per value.
pub fn expand_sweep(
    base: &ExperimentConfig,
    sweep: &str,
) -> Result<Vec<(String, ExperimentConfig)>, CliError> {
    let (key, values) = sweep
        .split_once('=')
        .ok_or_else(|| CliError::config("--sweep", "expected KEY=v1,v2,..."))?;
    let key = key.trim();
    let base_value = serde_json::to_value(base).expect("config serialises");
    if !base_value.get(key).is_some_and(|v| v.is_number()) {
        return Err(CliError::config(
            "--sweep",
            format!("unknown or non-numeric key `{key}`"),
        ));
    }
    values
        .split(',')
        .map(|raw| {
            let raw = raw.trim();
            let num: serde_json::Value = serde_json::from_str(raw)
                .map_err(|_| CliError::config("--sweep", format!("`{raw}` is not a number")))?;
            let mut v = base_value.clone();
            v[key] = num;
            Ok((raw.to_string(), ExperimentConfig::from_value(v)?))
        })
        .collect()
}
