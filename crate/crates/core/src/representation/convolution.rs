//! Convolution on `S` realised as an integral over the ball, and the
//! reproducing formula `W_ψ f * W_ψ ψ = C W_ψ f`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::action::RepParams;
use super::wavelet::wavelet_psi;
use crate::bergman::holo::{principal_inv_power, HoloFunction};
use crate::bergman::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::group::{s_from_point, BallPoint, GroupElement};
use crate::numeric::gamma::weight_constant;
use crate::numeric::sum::par_sum_complex_vec;

/// Magnitude above which an integrand value is treated as a blow-up.
pub const OVERFLOW_GUARD: f64 = 1e250;

/// `(F * G)(x) = ∫_S F(y) G(y⁻¹x) dy`, with `y = s(z)` ranging over `S` as `z`
/// ranges over the ball and `dy = dv(z) / (1 − |z|²)^{n+1}`. The rule's own
/// weight `(1 − |z|²)^β` is divided out of the integrand.
pub fn convolve_on_ball<F, G>(
    f: F,
    g: G,
    x: &GroupElement,
    rule: &QuadratureRule,
) -> Result<Complex64>
where
    F: Fn(&GroupElement) -> Complex64 + Sync,
    G: Fn(&GroupElement) -> Complex64 + Sync,
{
    let n = rule.dim();
    let beta = rule.alpha();
    let scale = 1.0 / weight_constant(n, beta);
    let terms: Vec<Complex64> = rule
        .nodes()
        .enumerate()
        .map(|(i, z)| {
            let y = s_from_point(&BallPoint::new(z.to_vec())?)?;
            let h: f64 = 1.0 - z.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let v = f(&y) * g(&y.inverse().multiply(x)) * h.powf(-(n as f64) - 1.0 - beta);
            if !v.re.is_finite() || !v.im.is_finite() || v.norm() > OVERFLOW_GUARD {
                return Err(Error::NumericalBlowup(v.norm()));
            }
            Ok(rule.weight(i) * scale * v)
        })
        .collect::<Result<_>>()?;
    Ok(crate::numeric::sum::compensated_sum_complex(terms))
}

/// Fitted reproducing constant and its spread over the supplied samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproducingFit {
    pub constant: f64,
    pub max_rel_residual: f64,
    /// Left-hand side `(W_ψ f * W_ψ ψ)(x)` per sample.
    pub convolutions: Vec<Complex64>,
}

/// Convolutions `(W_ψ f_j * W_ψ ψ)(x_k)` for every `(j, k)`, in row-major
/// order. Each node `z` is lifted once to `y = s(z)`; `W_ψ ψ(y⁻¹x) = d_{y⁻¹x}^{−σ}`
/// uses the lower-right entry of the product `y⁻¹x`.
pub fn reproducing_convolutions(
    params: &RepParams,
    fs: &[HoloFunction],
    xs: &[GroupElement],
    rule: &QuadratureRule,
) -> Result<Vec<Complex64>> {
    let n = params.n;
    if rule.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rule.dim(),
        });
    }
    let beta = rule.alpha();
    let scale = 1.0 / weight_constant(n, beta);
    let lifts: Vec<GroupElement> = rule
        .nodes()
        .map(|z| s_from_point(&BallPoint::new(z.to_vec())?))
        .collect::<Result<_>>()?;
    let last_cols: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|x| (0..=n).map(|k| x.matrix()[(k, n)]).collect())
        .collect();
    let width = fs.len() * xs.len();
    let blowup = std::sync::atomic::AtomicBool::new(false);
    let sums = par_sum_complex_vec(rule.len(), width, |i, buf| {
        let y = &lifts[i];
        let z = rule.node(i);
        let h: f64 = 1.0 - z.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let yinv = y.inverse();
        let wy: Vec<Complex64> = fs.iter().map(|f| wavelet_psi(params, f, y)).collect();
        let common = rule.weight(i) * scale * h.powf(-(n as f64) - 1.0 - beta);
        for (k, col) in last_cols.iter().enumerate() {
            let d: Complex64 = (0..=n).map(|j| yinv.matrix()[(n, j)] * col[j]).sum();
            let g = principal_inv_power(d, params.sigma);
            for (j, fy) in wy.iter().enumerate() {
                let v = fy * g * common;
                if !v.re.is_finite() || !v.im.is_finite() || v.norm() > OVERFLOW_GUARD {
                    blowup.store(true, std::sync::atomic::Ordering::Relaxed);
                }
                buf[j * xs.len() + k] = v;
            }
        }
    });
    if blowup.into_inner() {
        return Err(Error::NumericalBlowup(f64::INFINITY));
    }
    Ok(sums)
}

/// Fits `C` in `(W_ψ f * W_ψ ψ)(x) = C · W_ψ f(x)` over the samples by least
/// squares and reports the largest relative deviation.
pub fn reproducing_constant(
    params: &RepParams,
    f: &HoloFunction,
    xs: &[GroupElement],
    rule: &QuadratureRule,
) -> Result<ReproducingFit> {
    let lhs = reproducing_convolutions(params, std::slice::from_ref(f), xs, rule)?;
    let rhs: Vec<Complex64> = xs.iter().map(|x| wavelet_psi(params, f, x)).collect();
    let fit = fit_constant(&lhs, &rhs);
    if !(fit.max_rel_residual <= 1e-4) {
        return Err(Error::ConvergenceFailure(format!(
            "reproducing residual {:e} exceeds 1e-4",
            fit.max_rel_residual
        )));
    }
    Ok(fit)
}

/// Least-squares `C` for `lhs ≈ C rhs`; the imaginary part of the fitted
/// complex constant is folded into the residual.
pub fn fit_constant(lhs: &[Complex64], rhs: &[Complex64]) -> ReproducingFit {
    let num: Complex64 = lhs.iter().zip(rhs).map(|(l, r)| r.conj() * l).sum();
    let den: f64 = rhs.iter().map(|r| r.norm_sqr()).sum();
    let c = if den > 0.0 { num.re / den } else { 0.0 };
    let max_rel_residual = lhs
        .iter()
        .zip(rhs)
        .map(|(l, r)| {
            if r.norm() > 0.0 {
                (l - r * c).norm() / (r * c).norm()
            } else {
                l.norm()
            }
        })
        .fold(0.0, f64::max);
    ReproducingFit {
        constant: c,
        max_rel_residual,
        convolutions: lhs.to_vec(),
    }
}

/// `1 / c_{σ−n−1}`: the value of the reproducing constant when `S` carries
/// the measure `dv / (1 − |z|²)^{n+1}` with `dv` normalised.
pub fn reproducing_constant_closed_form(params: &RepParams) -> f64 {
    1.0 / weight_constant(params.n, params.alpha())
}
