//! Wavelet transforms `W_ζ^σ f(x) = ⟨f, π_σ(x) ζ⟩` and the integrability
//! predicates attached to them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::action::{
    dbar_power, pi_apply_pointwise, pi_transport_atom, pi_transport_monomial, RepParams,
};
use crate::bergman::holo::HoloFunction;
use crate::bergman::norms::inner_product_exact;
use crate::bergman::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::group::{s_from_point, BallPoint, GroupElement};
use crate::numeric::gamma::weight_constant;
use crate::numeric::jacobi::gauss_legendre;
use crate::numeric::sum::{compensated_sum, par_sum};

/// `W_ψ f(x) = d_x^{−σ} f(x·o)` for `ψ = 1`.
pub fn wavelet_psi(params: &RepParams, f: &HoloFunction, x: &GroupElement) -> Complex64 {
    dbar_power(params, x).conj() * f.eval_at(&x.origin_image())
}

/// `|W_ψ f| = (1 − |w|²)^{σ/2} |f(w)|` at any `x` with `x·o = w`.
pub fn abs_wavelet_psi(params: &RepParams, f: &HoloFunction, w: &BallPoint) -> f64 {
    w.one_minus_norm_sqr().powf(0.5 * params.sigma) * f.eval_at(w).norm()
}

fn require_sigma_atoms(params: &RepParams, f: &HoloFunction) -> Result<()> {
    match f
        .atoms()
        .iter()
        .find(|a| (a.exponent - params.sigma).abs() > 1e-12 * params.sigma)
    {
        Some(a) => Err(Error::UnsupportedAtomExponent {
            exponent: a.exponent,
            sigma: params.sigma,
        }),
        None => Ok(()),
    }
}

/// `⟨f, π_σ(x) ζ⟩` in `A²_{σ−n−1}`, computed without truncation error:
/// the polynomial part of `f` only sees the transported `ζ` up to its own
/// degree, atoms of `f` pair with `π_σ(x)ζ` by point evaluation, and atoms of
/// `ζ` are carried to kernel atoms.
pub fn wavelet(
    params: &RepParams,
    f: &HoloFunction,
    zeta: &HoloFunction,
    x: &GroupElement,
) -> Result<Complex64> {
    if f.dim() != params.n || zeta.dim() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: if f.dim() != params.n {
                f.dim()
            } else {
                zeta.dim()
            },
        });
    }
    require_sigma_atoms(params, f)?;
    require_sigma_atoms(params, zeta)?;
    let f_poly =
        HoloFunction::from_monomials(params.n, f.monomials().map(|(g, c)| (*c, g.clone())));
    let deg = f_poly.polynomial_degree();
    let mut total = Complex64::new(0.0, 0.0);
    for (beta, cb) in zeta.monomials() {
        let h = pi_transport_monomial(params, x, beta, deg)?.function;
        let mut part = inner_product_exact(&f_poly, &h, params.sigma)?;
        let mono = HoloFunction::monomial(Complex64::new(1.0, 0.0), beta.clone());
        for a in f.atoms() {
            part += a.coeff * pi_apply_pointwise(params, x, &mono, a.center.coords())?.conj();
        }
        total += cb.conj() * part;
    }
    for a in zeta.atoms() {
        let t = pi_transport_atom(params, x, &a.center)?;
        total += (a.coeff * t.coeff).conj() * f.eval_at(&t.center);
    }
    Ok(total)
}

/// `∫ f · conj(π_σ(x) ζ) dv_{σ−n−1}` by quadrature.
pub fn wavelet_quadrature(
    params: &RepParams,
    f: &HoloFunction,
    zeta: &HoloFunction,
    x: &GroupElement,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    if (rule.alpha() - params.alpha()).abs() > 1e-14 {
        return Err(Error::Domain(format!(
            "rule weight {} does not match σ−n−1 = {}",
            rule.alpha(),
            params.alpha()
        )));
    }
    let vals: Vec<Complex64> = rule
        .nodes()
        .map(|z| pi_apply_pointwise(params, x, zeta, z))
        .collect::<Result<_>>()?;
    Ok(crate::numeric::sum::par_sum_complex(rule.len(), |i| {
        rule.weight(i) * f.eval(rule.node(i)) * vals[i].conj()
    }))
}

/// `t + pσ/2 − n − 1`: the exponent of `(1 − |z|²)` after moving the
/// `L^p_t(S)` integral of `|W_ψ ψ|^p` to the ball.
pub fn membership_exponent(params: &RepParams, p: f64, t: f64) -> f64 {
    t + 0.5 * p * params.sigma - params.n as f64 - 1.0
}

/// Whether `W_ψ ψ ∈ L^p_t(S)`: `t + pσ/2 > n`.
pub fn lp_membership(params: &RepParams, p: f64, t: f64) -> Result<bool> {
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [1, ∞), got {p}")));
    }
    Ok(t + 0.5 * p * params.sigma > params.n as f64)
}

/// Truncated ball integrals `∫_{|z|² ≤ 1−δ} (1 − |z|²)^e dv` over a
/// decreasing sequence of cutoffs `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipSweep {
    pub exponent: f64,
    pub cutoffs: Vec<f64>,
    pub partials: Vec<f64>,
    /// Successive increments shrink, i.e. the integrals converge.
    pub converges: bool,
}

/// Empirical counterpart of [`lp_membership`]: partial integrals at
/// `δ = 10^{−1}, …, 10^{−decades}`.
pub fn lp_membership_empirical(
    params: &RepParams,
    p: f64,
    t: f64,
    decades: u32,
) -> Result<MembershipSweep> {
    lp_membership(params, p, t)?;
    let e = membership_exponent(params, p, t);
    let n = params.n as f64;
    let integrand = |u: f64| n * (1.0 - u).powf(n - 1.0) * u.powf(e);
    // decade panels in u = 1 − |z|²
    let panel = |lo: f64, hi: f64| -> Result<f64> {
        let (xs, ws) = gauss_legendre(24, lo.ln(), hi.ln())?;
        Ok(compensated_sum(
            xs.iter()
                .zip(&ws)
                .map(|(y, w)| w * y.exp() * integrand(y.exp())),
        ))
    };
    let mut cutoffs = Vec::new();
    let mut partials = Vec::new();
    let mut acc = panel(0.1, 1.0)?;
    cutoffs.push(0.1);
    partials.push(acc);
    for k in 2..=decades.max(2) {
        let lo = 10f64.powi(-(k as i32));
        acc += panel(lo, lo * 10.0)?;
        cutoffs.push(lo);
        partials.push(acc);
    }
    let incs: Vec<f64> = partials.windows(2).map(|w| w[1] - w[0]).collect();
    let converges = incs.windows(2).all(|w| w[1] < w[0] * (1.0 - 1e-6));
    Ok(MembershipSweep {
        exponent: e,
        cutoffs,
        partials,
        converges,
    })
}

/// `max_x |W_ζ φ(x)| / [(1 − |x·o|²)^{σ/2} (1 − log(1 − |x·o|²))]`.
pub fn log_envelope_check(
    params: &RepParams,
    zeta: &HoloFunction,
    phi: &HoloFunction,
    xs: &[GroupElement],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in xs {
        let h = x.origin_image().one_minus_norm_sqr();
        let v = wavelet(params, phi, zeta, x)?.norm();
        worst = worst.max(v / (h.powf(0.5 * params.sigma) * (1.0 - h.ln())));
    }
    Ok(worst)
}

/// `(c_α ∫_B |W_ζ f(s(z))|^p (1 − |z|²)^{α − pσ/2} dv(z))^{1/p}`, where `s(z)`
/// is the element of `S` mapping `o` to `z`. For `ζ = ψ` this is `‖f‖_{A^p_α}`.
pub fn coorbit_norm(
    params: &RepParams,
    f: &HoloFunction,
    zeta: &HoloFunction,
    alpha: f64,
    p: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    lp_membership(params, p, 0.0)?;
    let beta = rule.alpha();
    let is_psi =
        zeta.atoms().is_empty() && zeta.monomials().count() == 1 && zeta.polynomial_degree() == 0;
    let psi_coeff = zeta.monomials().next().map(|(_, c)| *c).unwrap_or_default();
    let samples: Vec<(f64, f64)> = rule
        .nodes()
        .map(|z| {
            let x = s_from_point(&BallPoint::new(z.to_vec())?)?;
            let v = if is_psi {
                psi_coeff.conj() * wavelet_psi(params, f, &x)
            } else {
                wavelet(params, f, zeta, &x)?
            };
            Ok((v.norm(), x.origin_image().one_minus_norm_sqr()))
        })
        .collect::<Result<_>>()?;
    let expo = alpha - 0.5 * p * params.sigma - beta;
    let integral = par_sum(samples.len(), |i| {
        let (v, h) = samples[i];
        rule.weight(i) * v.powf(p) * h.powf(expo)
    });
    Ok(
        (weight_constant(params.n, alpha) / weight_constant(params.n, beta) * integral)
            .powf(1.0 / p),
    )
}
