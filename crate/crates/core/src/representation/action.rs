//! The discrete-series action `π_σ` on holomorphic functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::holo::{principal_inv_power, AtomTerm, HoloFunction};
use crate::bergman::multi_index::{indices_of_degree, MultiIndex};
use crate::error::{Error, Result};
use crate::group::{pairing, BallPoint, GroupElement};
use crate::numeric::gamma::{binomial_series_coeff, ln_pochhammer};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Default degree to which transported monomials are re-expanded.
pub const DEFAULT_TRUNCATION: u32 = 40;

/// Parameters `(n, σ)` of `π_σ` acting on `A²_{σ−n−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepParams {
    pub n: usize,
    pub sigma: f64,
}

impl RepParams {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(sigma > n as f64) {
            return Err(Error::Domain(format!(
                "sigma must exceed n = {n}, got {sigma}"
            )));
        }
        Ok(Self { n, sigma })
    }

    /// Weight exponent `σ − n − 1` of the carrier space.
    pub fn alpha(&self) -> f64 {
        self.sigma - self.n as f64 - 1.0
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                got,
            })
        }
    }
}

/// `d̄^{−σ}` on the principal branch; the phase convention for every
/// non-integer power in this module.
pub fn dbar_power(params: &RepParams, x: &GroupElement) -> Complex64 {
    principal_inv_power(x.d().conj(), params.sigma)
}

/// `x⁻¹·z = (a*z − c̄) / (d̄ (1 − ⟨z, x·o⟩))`.
fn inverse_action(x: &GroupElement, z: &[Complex64], w: &BallPoint) -> Vec<Complex64> {
    let n = x.dim();
    let m = x.matrix();
    let den = x.d().conj() * (ONE - pairing(z, w.coords()));
    (0..n)
        .map(|k| {
            ((0..n).map(|j| m[(j, k)].conj() * z[j]).sum::<Complex64>() - m[(n, k)].conj()) / den
        })
        .collect()
}

/// `(π_σ(x) f)(z) = (−⟨z, b⟩ + d̄)^{−σ} f(x⁻¹·z)`, with the power taken as
/// `d̄^{−σ} (1 − ⟨z, x·o⟩)^{−σ}` (each factor on the principal branch).
pub fn pi_apply_pointwise(
    params: &RepParams,
    x: &GroupElement,
    f: &HoloFunction,
    z: &[Complex64],
) -> Result<Complex64> {
    params.check_dim(x.dim())?;
    params.check_dim(f.dim())?;
    params.check_dim(z.len())?;
    let w = x.origin_image();
    let factor =
        dbar_power(params, x) * principal_inv_power(ONE - pairing(z, w.coords()), params.sigma);
    Ok(factor * f.eval(&inverse_action(x, z, &w)))
}

/// `π_σ(x) ψ = d̄^{−σ} (1 − ⟨z, x·o⟩)^{−σ}` for `ψ = 1`.
pub fn pi_apply_atom(params: &RepParams, x: &GroupElement) -> HoloFunction {
    let mut f = HoloFunction::zero(params.n);
    f.add_atom(AtomTerm {
        coeff: dbar_power(params, x),
        center: x.origin_image(),
        exponent: params.sigma,
    });
    f
}

/// `π_σ(x)` applied to the kernel atom `(1 − ⟨z, v⟩)^{−σ}`: a multiple of the
/// atom at `x·v`, with the constant fixed by the value at `z = 0`.
pub fn pi_transport_atom(params: &RepParams, x: &GroupElement, v: &BallPoint) -> Result<AtomTerm> {
    let w = x.origin_image();
    let zero = vec![Complex64::new(0.0, 0.0); params.n];
    let pre = inverse_action(x, &zero, &w);
    let coeff =
        dbar_power(params, x) * principal_inv_power(ONE - pairing(&pre, v.coords()), params.sigma);
    Ok(AtomTerm {
        coeff,
        center: x.act(v)?,
        exponent: params.sigma,
    })
}

/// A transported function together with a bound on the sup norm over the
/// ball of the terms discarded by truncation.
#[derive(Debug, Clone)]
pub struct Transported {
    pub function: HoloFunction,
    pub degree: u32,
    pub tail_bound: f64,
}

/// Power series of `π_σ(x) z^β = d̄^{−σ−|β|} (1 − ⟨z, w⟩)^{−σ−|β|} Π_k ((a*z − c̄)_k)^{β_k}`
/// up to total degree `degree`.
pub fn pi_transport_monomial(
    params: &RepParams,
    x: &GroupElement,
    beta: &MultiIndex,
    degree: u32,
) -> Result<Transported> {
    params.check_dim(x.dim())?;
    params.check_dim(beta.dim())?;
    let n = params.n;
    let m = x.matrix();
    let w = x.origin_image();
    let wbar: Vec<Complex64> = w.coords().iter().map(|v| v.conj()).collect();
    let k_beta = beta.degree();
    let s = params.sigma + f64::from(k_beta);
    let pre = dbar_power(params, x) * x.d().conj().powi(-(k_beta as i32));

    // Π_k L_k^{β_k} with L_k(z) = Σ_j conj(a_jk) z_j − conj(c_k)
    let mut poly = HoloFunction::one(n);
    let mut sup_poly = 1.0;
    for (k, &bk) in beta.entries().iter().enumerate() {
        if bk == 0 {
            continue;
        }
        let mut lin = HoloFunction::monomial(-m[(n, k)].conj(), MultiIndex::zero(n));
        let mut sup = m[(n, k)].norm();
        for j in 0..n {
            lin.add_monomial(m[(j, k)].conj(), MultiIndex::unit(n, j, 1));
            sup += m[(j, k)].norm();
        }
        for _ in 0..bk {
            poly = poly.mul_truncated(&lin, degree);
        }
        sup_poly *= sup.powi(bk as i32);
    }

    let mut series = HoloFunction::zero(n);
    for k in 0..=degree {
        let lp = ln_pochhammer(s, k);
        for g in indices_of_degree(n, k) {
            let coeff =
                crate::bergman::holo::monomial_value(&g, &wbar) * (lp - g.ln_factorial()).exp();
            series.add_monomial(coeff, g);
        }
    }
    let function = series.mul_truncated(&poly, degree).scale(pre);

    let first_dropped = (i64::from(degree) - i64::from(k_beta) + 1).max(0) as u32;
    let tail_bound =
        pre.norm() * sup_poly * f64::from(k_beta + 1) * series_tail(s, w.norm(), first_dropped);
    Ok(Transported {
        function,
        degree,
        tail_bound,
    })
}

/// `Σ_{k ≥ k0} (s)_k/k! r^k` for `0 ≤ r < 1`, with a geometric remainder.
pub fn series_tail(s: f64, r: f64, k0: u32) -> f64 {
    if r == 0.0 {
        return if k0 == 0 { 1.0 } else { 0.0 };
    }
    let mut k = k0;
    let mut term = binomial_series_coeff(s, k) * r.powi(k as i32);
    let mut total = 0.0;
    loop {
        total += term;
        let ratio = (s + f64::from(k)) / f64::from(k + 1) * r;
        term *= ratio;
        k += 1;
        if ratio < 1.0 && term <= 1e-17 * total {
            // later ratios are no larger once k ≥ s − 1
            let rk = (s + f64::from(k)) / f64::from(k + 1) * r;
            if rk < 1.0 && f64::from(k) + 1.0 >= s {
                return total + term / (1.0 - rk);
            }
        }
        if k > 10_000_000 {
            return f64::INFINITY;
        }
    }
}

/// `π_σ(x) f` as a [`HoloFunction`]. Atoms with exponent `σ` are carried
/// exactly; monomials are re-expanded to `degree`.
pub fn pi_apply(
    params: &RepParams,
    x: &GroupElement,
    f: &HoloFunction,
    degree: u32,
) -> Result<Transported> {
    params.check_dim(f.dim())?;
    let mut out = HoloFunction::zero(params.n);
    let mut tail = 0.0;
    for (beta, c) in f.monomials() {
        let t = pi_transport_monomial(params, x, beta, degree)?;
        out = out.add(&t.function.scale(*c));
        tail += c.norm() * t.tail_bound;
    }
    for a in f.atoms() {
        if (a.exponent - params.sigma).abs() > 1e-12 * params.sigma {
            return Err(Error::UnsupportedAtomExponent {
                exponent: a.exponent,
                sigma: params.sigma,
            });
        }
        let mut t = pi_transport_atom(params, x, &a.center)?;
        t.coeff *= a.coeff;
        out.add_atom(t);
    }
    Ok(Transported {
        function: out,
        degree,
        tail_bound: tail,
    })
}
