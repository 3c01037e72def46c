//! Serialized artifacts. Floats are written by `serde_json`, which emits the
//! shortest decimal that round-trips to the same `f64`.

use std::io::Write;
use std::path::Path;

use bergman_coorbit::bergman::HoloFunction;
use bergman_coorbit::sampling::PointFamily;
use bergman_coorbit::Complex64;
use serde::Serialize;

use crate::config::Term;
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub tvec: Vec<f64>,
    pub w: Vec<[f64; 2]>,
    pub one_minus_w2: f64,
}

pub fn point_records(family: &PointFamily) -> Vec<PointRecord> {
    family
        .entries()
        .iter()
        .enumerate()
        .map(|(index, e)| PointRecord {
            index,
            tvec: e.tvec.clone(),
            w: e.w.coords().iter().map(|z| [z.re, z.im]).collect(),
            one_minus_w2: e.one_minus_w2,
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct CoefficientRecord {
    pub index: usize,
    pub re: f64,
    pub im: f64,
}

pub fn coefficient_records(values: &[Complex64]) -> Vec<CoefficientRecord> {
    values
        .iter()
        .enumerate()
        .map(|(index, v)| CoefficientRecord {
            index,
            re: v.re,
            im: v.im,
        })
        .collect()
}

/// Monomial terms of a polynomial, sorted by exponent for stable output.
pub fn function_terms(f: &HoloFunction) -> Vec<Term> {
    let mut terms: Vec<Term> = f
        .monomials()
        .map(|(g, c)| Term {
            exponent: g.0.clone(),
            re: c.re,
            im: c.im,
        })
        .collect();
    terms.sort_by(|a, b| a.exponent.cmp(&b.exponent));
    terms
}

#[derive(Debug, Serialize)]
pub struct FrameBoundsReport {
    pub n: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub p: f64,
    pub epsilon: f64,
    pub box_radius: f64,
    pub truncation: u32,
    pub points: usize,
    pub a_est: f64,
    pub b_est: f64,
    pub previous_a_est: Option<f64>,
    pub previous_b_est: Option<f64>,
    pub k_stability: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    pub n: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub p: f64,
    pub epsilon: f64,
    pub box_radius: f64,
    pub points: usize,
    pub residual: f64,
    pub iterations: usize,
    pub regularization: f64,
    pub seq_norm: f64,
    pub weight_exponent: f64,
}

#[derive(Debug, Serialize)]
pub struct ReconstructReport {
    pub n: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub box_radius: f64,
    pub truncation: u32,
    pub points: usize,
    pub method: String,
    pub relative_error: f64,
    pub function: Vec<Term>,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub all_pass: bool,
    pub checks: Vec<Check>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV cell for a float, in the same shortest round-trip form as the JSON.
pub fn cell(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| "null".into())
}

pub fn opt_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}
