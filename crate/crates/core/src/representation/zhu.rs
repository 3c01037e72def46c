//! The integral operator
//! `S f(z) = (1 − |z|²)^a ∫ (1 − |w|²)^b f(w) |1 − ⟨z, w⟩|^{−(n+1+a+b)} dv(w)`
//! and its boundedness on `L^p_t = L^p((1 − |z|²)^t dv)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::group::pairing;
use crate::numeric::gamma::weight_constant;
use crate::numeric::jacobi::gauss_legendre;
use crate::numeric::sum::{compensated_sum, par_sum_complex};

/// Parameters of `S` on `L^p_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZhuParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub t: f64,
    pub p: f64,
}

impl ZhuParams {
    /// The operator attached to `A^p_α` and `π_σ`: `a = σ/2`, `b = σ/2 − n − 1`,
    /// `t = α − σp/2`.
    pub fn for_bergman(n: usize, sigma: f64, alpha: f64, p: f64) -> Self {
        Self {
            n,
            a: 0.5 * sigma,
            b: 0.5 * sigma - n as f64 - 1.0,
            t: alpha - 0.5 * sigma * p,
            p,
        }
    }

    /// Exponent `n + 1 + a + b` of the kernel.
    pub fn kernel_exponent(&self) -> f64 {
        self.n as f64 + 1.0 + self.a + self.b
    }
}

/// `−pa < t + 1 < p(b + 1)`.
pub fn zhu_bounded(a: f64, b: f64, t: f64, p: f64) -> bool {
    -p * a < t + 1.0 && t + 1.0 < p * (b + 1.0)
}

/// `S f(z)` by quadrature; the rule's weight `(1 − |w|²)^β` is divided out.
pub fn zhu_s_apply<F>(
    zp: &ZhuParams,
    f: F,
    z: &[Complex64],
    rule: &QuadratureRule,
) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    if z.len() != zp.n || rule.dim() != zp.n {
        return Err(Error::DimensionMismatch {
            expected: zp.n,
            got: z.len(),
        });
    }
    let beta = rule.alpha();
    let c = zp.kernel_exponent();
    let hz = 1.0 - z.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let integral = par_sum_complex(rule.len(), |i| {
        let w = rule.node(i);
        let hw = 1.0 - w.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let k = (Complex64::new(1.0, 0.0) - pairing(z, w)).norm().powf(-c);
        rule.weight(i) * f(w) * hw.powf(zp.b - beta) * k
    });
    Ok(hz.powf(zp.a) * integral / weight_constant(zp.n, beta))
}

/// Sphere average `A(q) = ∫_{S^{2n−1}} |1 − q ξ₁|^{−c} dσ(ξ)`, tabulated in
/// `Y = −ln(1 − q²)` and interpolated in `ln A`.
#[derive(Debug, Clone)]
pub struct SphereAverage {
    n: usize,
    c: f64,
    step: f64,
    ln_values: Vec<f64>,
}

const TABLE_STEP: f64 = 0.01;
const TABLE_MAX: f64 = 46.0;

impl SphereAverage {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        let m = (TABLE_MAX / TABLE_STEP).ceil() as usize + 1;
        let ys: Vec<f64> = (0..m).map(|k| k as f64 * TABLE_STEP).collect();
        let circle: Vec<f64> = ys
            .iter()
            .map(|&y| circle_average(c, -(-y).exp_m1(), (-y).exp()).map(f64::ln))
            .collect::<Result<_>>()?;
        let base = Self {
            n: 1,
            c,
            step: TABLE_STEP,
            ln_values: circle,
        };
        if n == 1 {
            return Ok(base);
        }
        let ln_values = ys
            .iter()
            .map(|&y| disc_average(&base, n, -(-y).exp_m1(), (-y).exp()).map(f64::ln))
            .collect::<Result<_>>()?;
        Ok(Self {
            n,
            c,
            step: TABLE_STEP,
            ln_values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> f64 {
        self.c
    }

    /// `A` at the point with `1 − q² = gap`.
    pub fn eval(&self, gap: f64) -> f64 {
        let y = -gap.max(1e-300).ln();
        let x = (y / self.step).clamp(0.0, (self.ln_values.len() - 1) as f64);
        let last = self.ln_values.len() - 1;
        // four-point Lagrange interpolation in ln A
        let i = (x.floor() as usize).clamp(1, last - 2);
        let s = x - i as f64;
        let v = &self.ln_values;
        let l = -s * (s - 1.0) * (s - 2.0) / 6.0 * v[i - 1]
            + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * v[i]
            - (s + 1.0) * s * (s - 2.0) / 2.0 * v[i + 1]
            + (s + 1.0) * s * (s - 1.0) / 6.0 * v[i + 2];
        l.exp()
    }
}

/// Geometric panels `[0, h], [h, 2h], [2h, 4h], …` up to `end`.
fn graded_panels(h: f64, end: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut lo = 0.0;
    let mut hi = h.min(end);
    while lo < end {
        out.push((lo, hi));
        lo = hi;
        hi = (2.0 * hi).min(end);
    }
    out
}

/// `(1/π) ∫_0^π |1 − q e^{iθ}|^{−c} dθ` with `q² = q2`, `1 − q² = gap`.
fn circle_average(c: f64, q2: f64, gap: f64) -> Result<f64> {
    let q = q2.sqrt();
    let one_minus_q = gap / (1.0 + q);
    let (gx, gw) = gauss_legendre(16, 0.0, 1.0)?;
    let mut terms = Vec::new();
    for (lo, hi) in graded_panels(one_minus_q.max(1e-300), std::f64::consts::PI) {
        for (x, w) in gx.iter().zip(&gw) {
            let th = lo + (hi - lo) * x;
            let s = (0.5 * th).sin();
            let base = one_minus_q * one_minus_q + 4.0 * q * s * s;
            terms.push(w * (hi - lo) * base.powf(-0.5 * c));
        }
    }
    Ok(compensated_sum(terms) / std::f64::consts::PI)
}

/// For `n ≥ 2`, `ξ₁ = √τ e^{iθ}` with `τ` of density `(n−1)(1−τ)^{n−2}`:
/// an average of the circle table over `τ`.
fn disc_average(circle: &SphereAverage, n: usize, q2: f64, gap: f64) -> Result<f64> {
    let (gx, gw) = gauss_legendre(16, 0.0, 1.0)?;
    let mut terms = Vec::new();
    // v = 1 − τ; the integrand varies on the scale 1 − q²
    for (lo, hi) in graded_panels(gap.max(1e-300), 1.0) {
        for (x, w) in gx.iter().zip(&gw) {
            let v = lo + (hi - lo) * x;
            let inner_gap = gap + q2 * v;
            terms.push(
                w * (hi - lo) * (n as f64 - 1.0) * v.powi(n as i32 - 2) * circle.eval(inner_gap),
            );
        }
    }
    Ok(compensated_sum(terms))
}

/// Radial test family `f_r(w) = (1 − |w|²)^a (1 − r²|w|²)^{−κ}` with
/// `κ = (t + pa + n + 1)/p`, as a function of `u = 1 − |w|²`.
fn test_profile(zp: &ZhuParams, r: f64, u: f64) -> f64 {
    let kappa = (zp.t + zp.p * zp.a + zp.n as f64 + 1.0) / zp.p;
    let gap = (1.0 - r * r) + r * r * u; // 1 − r²|w|²
    u.powf(zp.a) * gap.powf(-kappa)
}

/// Log-scale nodes `u = e^{−y}` on `(0, 1]` with weights for `du`.
fn log_nodes(y_max: f64) -> Result<Vec<(f64, f64)>> {
    let (gx, gw) = gauss_legendre(8, 0.0, 0.5)?;
    let panels = (y_max / 0.5).ceil() as usize;
    let mut out = Vec::with_capacity(panels * gx.len());
    for k in 0..panels {
        let y0 = 0.5 * k as f64;
        for (x, w) in gx.iter().zip(&gw) {
            let u = (-(y0 + x)).exp();
            out.push((u, w * u));
        }
    }
    Ok(out)
}

/// `‖S f_r‖_{L^p_t} / ‖f_r‖_{L^p_t}` for the radial test function `f_r`,
/// using the reduction of `S` to a one-dimensional integral against the
/// sphere average of the kernel.
pub fn zhu_radial_ratio(zp: &ZhuParams, avg: &SphereAverage, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius must lie in [0, 1), got {r}")));
    }
    if avg.dim() != zp.n || (avg.exponent() - zp.kernel_exponent()).abs() > 1e-12 {
        return Err(Error::Domain(
            "sphere average does not match the operator".into(),
        ));
    }
    let n = zp.n as f64;
    let decay = (zp.t + zp.p * zp.a + 1.0).min(zp.b + zp.a + 1.0).min(1.0);
    if !(decay > 0.0) {
        return Err(Error::Domain(
            "test family is not integrable at the boundary".into(),
        ));
    }
    let y_max = -(1.0 - r * r).ln() + 40.0 / decay;
    let nodes = log_nodes(y_max)?;
    let density = |u: f64| n * (1.0 - u).powf(n - 1.0);
    // inner integral for every outer node
    let sf: Vec<f64> = nodes
        .iter()
        .map(|&(uz, _)| {
            let inner = compensated_sum(nodes.iter().map(|&(us, ws)| {
                let gap = uz + us - uz * us;
                ws * density(us) * us.powf(zp.b) * test_profile(zp, r, us) * avg.eval(gap)
            }));
            uz.powf(zp.a) * inner
        })
        .collect();
    let norm_sf = compensated_sum(
        nodes
            .iter()
            .zip(&sf)
            .map(|(&(u, w), v)| w * density(u) * u.powf(zp.t) * v.abs().powf(zp.p)),
    );
    let norm_f = compensated_sum(
        nodes
            .iter()
            .map(|&(u, w)| w * density(u) * u.powf(zp.t) * test_profile(zp, r, u).powf(zp.p)),
    );
    Ok((norm_sf / norm_f).powf(1.0 / zp.p))
}

/// Empirical operator norms along a sweep of radii.
pub fn zhu_radial_sweep(zp: &ZhuParams, radii: &[f64]) -> Result<Vec<f64>> {
    let avg = SphereAverage::new(zp.n, zp.kernel_exponent())?;
    radii
        .iter()
        .map(|&r| zhu_radial_ratio(zp, &avg, r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::quadrature::ball_quadrature;
    use crate::numeric::gamma::ln_pochhammer;

    fn hypergeometric_series(c: f64, n: usize, x: f64) -> f64 {
        // Σ ((c/2)_k)² / (k! (n)_k) x^k
        let mut total = 0.0;
        for k in 0..4000u32 {
            let lt = 2.0 * ln_pochhammer(0.5 * c, k)
                - crate::numeric::gamma::ln_factorial(k)
                - ln_pochhammer(n as f64, k)
                + f64::from(k) * x.ln();
            total += lt.exp();
        }
        total
    }

    #[test]
    fn bounded_region_for_bergman_parameters() {
        // −1 < α < p(σ − n) − 1
        for &alpha in &[-0.5, 0.0, 1.0, 2.9] {
            let z = ZhuParams::for_bergman(1, 3.0, alpha, 2.0);
            assert!(zhu_bounded(z.a, z.b, z.t, z.p));
        }
        for &alpha in &[-1.0, 3.0, 3.5] {
            let z = ZhuParams::for_bergman(1, 3.0, alpha, 2.0);
            assert!(!zhu_bounded(z.a, z.b, z.t, z.p));
        }
    }

    #[test]
    fn sphere_average_matches_series() {
        for n in [1usize, 2] {
            let avg = SphereAverage::new(n, 3.0).unwrap();
            for &x in &[0.0f64, 0.3, 0.6, 0.9] {
                let series = hypergeometric_series(3.0, n, x.max(1e-300));
                assert!(
                    (avg.eval(1.0 - x) - series).abs() < 1e-7 * series,
                    "n = {n}, x = {x}"
                );
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let zp = ZhuParams::for_bergman(1, 3.0, 0.0, 2.0);
        let rule = ball_quadrature(1, -0.5, 8, 16, 1).unwrap();
        assert_eq!(
            zhu_s_apply(
                &zp,
                |_| Complex64::new(0.0, 0.0),
                &[Complex64::new(0.3, 0.0)],
                &rule
            )
            .unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn radial_reduction_matches_generic_quadrature() {
        let zp = ZhuParams::for_bergman(1, 3.0, 0.0, 2.0);
        let avg = SphereAverage::new(1, zp.kernel_exponent()).unwrap();
        let r = 0.5;
        let rule = ball_quadrature(1, zp.b, 60, 160, 1).unwrap();
        let f = |w: &[Complex64]| Complex64::new(test_profile(&zp, r, 1.0 - w[0].norm_sqr()), 0.0);
        for &rho in &[0.0f64, 0.3, 0.6] {
            let generic = zhu_s_apply(&zp, f, &[Complex64::new(rho, 0.0)], &rule)
                .unwrap()
                .re;
            let uz = 1.0 - rho * rho;
            let nodes = log_nodes(60.0).unwrap();
            let radial = uz.powf(zp.a)
                * compensated_sum(nodes.iter().map(|&(us, ws)| {
                    ws * us.powf(zp.b) * test_profile(&zp, r, us) * avg.eval(uz + us - uz * us)
                }));
            assert!(
                (generic - radial).abs() < 1e-7 * radial,
                "rho = {rho}: {generic} vs {radial}"
            );
        }
    }

    #[test]
    fn growth_outside_and_stability_inside() {
        let radii = [0.9, 0.99, 0.999, 0.9999];
        let inside = zhu_radial_sweep(&ZhuParams::for_bergman(1, 3.0, 0.0, 2.0), &radii).unwrap();
        let spread = inside.iter().cloned().fold(0.0, f64::max)
            / inside.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1.5, "{inside:?}");
        let outside = zhu_radial_sweep(&ZhuParams::for_bergman(1, 3.0, 3.5, 2.0), &radii).unwrap();
        assert!(outside.windows(2).all(|w| w[1] > w[0]), "{outside:?}");
    }
}
