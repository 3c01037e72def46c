//! Product quadrature for `dv_α` on the unit ball.
//!
//! A point is written `z_k = √t · √τ_k · e^{iθ_k}` with `t = |z|²`, `τ` on the
//! standard simplex and independent phases. Under the normalised measure
//! `dv_α`, `t` has density `∝ (1−t)^α t^{n−1}`, `τ` is uniform on the simplex
//! and the phases are uniform, so each factor gets its own Gauss rule.

use num_complex::Complex64;

use super::holo::HoloFunction;
use super::multi_index::indices_up_to;
use super::norms::{ln_monomial_norm, monomial_norm};
use crate::error::{Error, Result};
use crate::group::{s_from_point, BallPoint};
use crate::numeric::gamma::{ln_pochhammer, weight_constant};
use crate::numeric::jacobi::GaussJacobi;
use crate::numeric::sum::{compensated_sum, par_sum, par_sum_complex};

/// Tolerance for the exactness certificate.
pub const TAU_QUAD: f64 = 1e-9;

/// Nodes and positive weights approximating `∫ · dv_α`, exact for
/// `z^γ z̄^δ` whenever `|γ|, |δ| ≤ exactness_degree`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    n: usize,
    alpha: f64,
    exactness_degree: u32,
    orders: (usize, usize, usize),
    // node i occupies coords[i*n .. (i+1)*n]
    coords: Vec<Complex64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn exactness_degree(&self) -> u32 {
        self.exactness_degree
    }

    /// `(radial R, phase M, modulus L)`
    pub fn orders(&self) -> (usize, usize, usize) {
        self.orders
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[Complex64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[Complex64]> {
        self.coords.chunks_exact(self.n)
    }

    /// `Σ_i w_i f(z_i)`, reduced deterministically.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(&[Complex64]) -> Complex64 + Sync,
    {
        par_sum_complex(self.len(), |i| self.weights[i] * f(self.node(i)))
    }

    pub fn integrate_real<F>(&self, f: F) -> f64
    where
        F: Fn(&[Complex64]) -> f64 + Sync,
    {
        par_sum(self.len(), |i| self.weights[i] * f(self.node(i)))
    }
}

/// Product rule with `R` radial, `M` per-phase and `L` per-simplex-direction
/// nodes. Exact for `|γ|, |δ| ≤ min(2R−1, 2L−1, M−1)`.
pub fn ball_quadrature(
    n: usize,
    alpha: f64,
    radial: usize,
    phase: usize,
    modulus: usize,
) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!(
            "weight exponent alpha must exceed -1, got {alpha}"
        )));
    }
    if radial == 0 || phase == 0 || (n > 1 && modulus == 0) {
        return Err(Error::Domain("quadrature orders must be positive".into()));
    }
    let rad = GaussJacobi::new(radial, alpha, n as f64 - 1.0)?;
    let simplex = simplex_rule(n, modulus)?;
    let phases: Vec<Complex64> = (0..phase)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / phase as f64))
        .collect();
    let n_phase = phase.pow(n as u32);
    let total = rad.len() * simplex.len() * n_phase;
    let mut coords = Vec::with_capacity(total * n);
    let mut weights = Vec::with_capacity(total);
    let pw = 1.0 / n_phase as f64;
    for (&t, &wt) in rad.nodes.iter().zip(&rad.weights) {
        let r = t.sqrt();
        for (tau, wtau) in &simplex {
            let moduli: Vec<f64> = tau.iter().map(|x| r * x.max(0.0).sqrt()).collect();
            for p in 0..n_phase {
                let mut rest = p;
                for m in &moduli {
                    coords.push(phases[rest % phase] * *m);
                    rest /= phase;
                }
                weights.push(wt * wtau * pw);
            }
        }
    }
    let rule = QuadratureRule {
        n,
        alpha,
        exactness_degree: nominal_degree(n, radial, phase, modulus),
        orders: (radial, phase, modulus),
        coords,
        weights,
    };
    certify(&rule, &rad, &simplex)?;
    Ok(rule)
}

/// Smallest rule of [`ball_quadrature`] type exact to degree `d`.
pub fn ball_quadrature_for_degree(n: usize, alpha: f64, d: u32) -> Result<QuadratureRule> {
    let half = (d as usize + 2) / 2;
    ball_quadrature(n, alpha, half.max(1), d as usize + 1, half.max(1))
}

fn nominal_degree(n: usize, radial: usize, phase: usize, modulus: usize) -> u32 {
    let mut d = (2 * radial - 1).min(phase - 1);
    if n > 1 {
        d = d.min(2 * modulus - 1);
    }
    d as u32
}

/// Uniform probability on `{τ ≥ 0, Σ τ_k = 1}` via the collapsed product
/// `τ_j = u_j Π_{i<j}(1 − u_i)`, where `u_j` has density `∝ (1−u)^{n−1−j}`.
fn simplex_rule(n: usize, l: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut out = vec![(Vec::with_capacity(n), 1.0)];
    let mut remaining = vec![1.0];
    for j in 1..n {
        let g = GaussJacobi::new(l, (n - 1 - j) as f64, 0.0)?;
        let mut next = Vec::with_capacity(out.len() * l);
        let mut next_rem = Vec::with_capacity(out.len() * l);
        for ((tau, w), rem) in out.iter().zip(&remaining) {
            for (&u, &wu) in g.nodes.iter().zip(&g.weights) {
                let mut t = tau.clone();
                t.push(rem * u);
                next.push((t, w * wu));
                next_rem.push(rem * (1.0 - u));
            }
        }
        out = next;
        remaining = next_rem;
    }
    for ((tau, _), rem) in out.iter_mut().zip(remaining) {
        tau.push(rem);
    }
    Ok(out)
}

/// Verifies the factor rules against their closed-form moments up to the
/// nominal degree; the product structure then carries exactness to the ball.
fn certify(rule: &QuadratureRule, rad: &GaussJacobi, simplex: &[(Vec<f64>, f64)]) -> Result<()> {
    let n = rule.n;
    let d = rule.exactness_degree;
    let fail = |what: &str, err: f64| {
        Err(Error::ConvergenceFailure(format!(
            "quadrature certificate failed for {what}: error {err:e}"
        )))
    };
    let total = compensated_sum(rule.weights.iter().copied());
    if (total - 1.0).abs() > 1e-12 {
        return fail("normalisation", (total - 1.0).abs());
    }
    // radial: E[t^k] = (n)_k / (n+α+1)_k
    for k in 0..=d {
        let got = rad.integrate(|t| t.powi(k as i32));
        let exact =
            (ln_pochhammer(n as f64, k) - ln_pochhammer(n as f64 + rule.alpha + 1.0, k)).exp();
        if (got - exact).abs() > TAU_QUAD * exact {
            return fail("radial moments", (got - exact).abs() / exact);
        }
    }
    // simplex: E[τ^γ] = γ! (n−1)! / (n−1+|γ|)!
    if n > 1 {
        for g in indices_up_to(n, d) {
            let got = compensated_sum(simplex.iter().map(|(tau, w)| {
                w * tau
                    .iter()
                    .zip(g.entries())
                    .map(|(x, &e)| x.powi(e as i32))
                    .product::<f64>()
            }));
            let exact = (g.ln_factorial() - ln_pochhammer(n as f64, g.degree())).exp();
            if (got - exact).abs() > TAU_QUAD * exact {
                return fail("simplex moments", (got - exact).abs() / exact);
            }
        }
    }
    Ok(())
}

/// `(∫ |f|^p dv_α)^{1/p}` with the rule's weight exponent.
pub fn lp_alpha_norm(f: &HoloFunction, p: f64, rule: &QuadratureRule) -> Result<f64> {
    check_p(p)?;
    check_dim(f, rule)?;
    Ok(rule
        .integrate_real(|z| f.eval(z).norm().powf(p))
        .powf(1.0 / p))
}

fn check_p(p: f64) -> Result<()> {
    if (1.0..f64::INFINITY).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("p must lie in [1, ∞), got {p}")))
    }
}

fn check_dim(f: &HoloFunction, rule: &QuadratureRule) -> Result<()> {
    if f.dim() == rule.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: rule.dim(),
            got: f.dim(),
        })
    }
}

/// Relative residual of `‖f‖^p_{L^p_α} = c_α ∫ |f(x·o)|^p (1−|x·o|²)^{α+n+1} dμ(x·o)`,
/// where the right side is evaluated on the group: each node `z` of a second
/// rule is lifted to `x = s(z) ∈ S`, and `f(x·o)`, `1 − |x·o|² = |d_x|^{−2}`
/// are read off the matrix.
pub fn group_norm_equiv_check(f: &HoloFunction, p: f64, rule: &QuadratureRule) -> Result<f64> {
    check_p(p)?;
    check_dim(f, rule)?;
    let n = rule.dim();
    let alpha = rule.alpha();
    let lhs = lp_alpha_norm(f, p, rule)?.powf(p);
    // second rule: integer part of α moved into the integrand, different orders
    let beta = if alpha >= 0.0 {
        alpha - alpha.floor()
    } else {
        alpha
    };
    let (r, m, l) = rule.orders();
    let other = ball_quadrature(n, beta, r + 2, m + 3, l + 2)?;
    let lifts: Vec<(Complex64, f64)> = other
        .nodes()
        .map(|z| {
            let x = s_from_point(&BallPoint::new(z.to_vec())?)?;
            let w = x.origin_image();
            let h = 1.0 / x.d().norm_sqr();
            Ok((f.eval_at(&w), h))
        })
        .collect::<Result<_>>()?;
    // dμ = dv / (1−|z|²)^{n+1} and dv = dv_β (1−|z|²)^{−β} / c_β
    let integral = par_sum(lifts.len(), |i| {
        let (fv, h) = lifts[i];
        other.weight(i)
            * fv.norm().powf(p)
            * h.powf(alpha + n as f64 + 1.0)
            * h.powf(-(n as f64) - 1.0 - beta)
    });
    let rhs = weight_constant(n, alpha) / weight_constant(n, beta) * integral;
    Ok((lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE))
}

/// `|∫ f(w) K_{σ−n−1}(z, w) dv_{σ−n−1}(w) − f(z)|` for a polynomial `f`.
pub fn reproduce_check(
    f: &HoloFunction,
    z: &[Complex64],
    sigma: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    check_dim(f, rule)?;
    let n = rule.dim();
    let alpha = sigma - n as f64 - 1.0;
    if (rule.alpha() - alpha).abs() > 1e-14 {
        return Err(Error::Domain(format!(
            "rule weight {} does not match σ−n−1 = {alpha}",
            rule.alpha()
        )));
    }
    if !f.is_polynomial() {
        return Err(Error::Domain("reproduce_check needs a polynomial".into()));
    }
    let v = rule.integrate(|w| f.eval(w) * super::norms::kernel_eval(z, w, alpha));
    Ok((v - f.eval(z)).norm())
}

/// Maximum relative error of the rule on `∫ z^γ z̄^δ dv_α` over `|γ|, |δ| ≤ d`
/// (absolute for the off-diagonal pairs).
pub fn monomial_moment_error(rule: &QuadratureRule, d: u32) -> f64 {
    let idx = indices_up_to(rule.dim(), d);
    let mut worst: f64 = 0.0;
    for (i, g) in idx.iter().enumerate() {
        for h in &idx[i..] {
            let got = rule.integrate(|z| {
                super::holo::monomial_value(g, z) * super::holo::monomial_value(h, z).conj()
            });
            let err = if g == h {
                let exact = monomial_norm(g, rule.alpha()).unwrap_or(f64::NAN);
                (got - Complex64::new(exact, 0.0)).norm() / exact
            } else {
                got.norm()
                    * (-0.5
                        * (ln_monomial_norm(g, rule.alpha()) + ln_monomial_norm(h, rule.alpha())))
                    .exp()
            };
            worst = worst.max(err);
        }
    }
    worst
}
