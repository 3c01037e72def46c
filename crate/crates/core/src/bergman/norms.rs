//! Closed-form norms, the monomial orthonormal basis and reproducing kernels.

use num_complex::Complex64;

use super::holo::{monomial_value, principal_inv_power, HoloFunction};
use super::multi_index::{indices_of_degree, indices_up_to, MultiIndex};
use crate::error::{Error, Result};
use crate::group::pairing;
use crate::numeric::gamma::ln_pochhammer;
use crate::numeric::sum::compensated_sum_complex;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "weight exponent alpha must exceed -1, got {alpha}"
        )))
    }
}

/// `ln ‖z^γ‖²_α = ln γ! + ln Γ(n+α+1) − ln Γ(n+α+1+|γ|)`
pub fn ln_monomial_norm(gamma: &MultiIndex, alpha: f64) -> f64 {
    let n = gamma.dim() as f64;
    gamma.ln_factorial() - ln_pochhammer(n + alpha + 1.0, gamma.degree())
}

/// `‖z^γ‖²_α` in `A²_α`.
pub fn monomial_norm(gamma: &MultiIndex, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(ln_monomial_norm(gamma, alpha).exp())
}

/// The orthonormal basis element `φ_γ = z^γ / ‖z^γ‖_α` at `z`.
pub fn phi_gamma_eval(gamma: &MultiIndex, alpha: f64, z: &[Complex64]) -> Result<Complex64> {
    check_alpha(alpha)?;
    Ok(monomial_value(gamma, z) * (-0.5 * ln_monomial_norm(gamma, alpha)).exp())
}

/// `K_α(z, w) = (1 − ⟨z, w⟩)^{−(n+1+α)}` on the principal branch.
pub fn kernel_eval(z: &[Complex64], w: &[Complex64], alpha: f64) -> Complex64 {
    let n = z.len() as f64;
    principal_inv_power(Complex64::new(1.0, 0.0) - pairing(z, w), n + 1.0 + alpha)
}

/// `Σ_{|γ| ≤ K} φ_γ(z) conj(φ_γ(w))`.
pub fn kernel_partial_sum(z: &[Complex64], w: &[Complex64], alpha: f64, k_max: u32) -> Complex64 {
    let n = z.len();
    compensated_sum_complex(indices_up_to(n, k_max).iter().map(|g| {
        monomial_value(g, z) * monomial_value(g, w).conj() * (-ln_monomial_norm(g, alpha)).exp()
    }))
}

/// `‖z^γ‖²` in `L²` of the normalised sphere: `γ! Γ(n) / Γ(n + |γ|)`.
pub fn sphere_monomial_norm(gamma: &MultiIndex) -> f64 {
    let n = gamma.dim() as f64;
    (gamma.ln_factorial() - ln_pochhammer(n, gamma.degree())).exp()
}

/// Degree-`k` reproducing kernel of the sphere,
/// `H_k(z, w) = Σ_{|γ|=k} Γ(n+k)/(γ! Γ(n)) z^γ w̄^γ`.
pub fn sphere_kernel_hk(z: &[Complex64], w: &[Complex64], k: u32) -> Complex64 {
    let n = z.len();
    compensated_sum_complex(
        indices_of_degree(n, k)
            .iter()
            .map(|g| monomial_value(g, z) * monomial_value(g, w).conj() / sphere_monomial_norm(g)),
    )
}

/// `Γ(n+k) Γ(σ) / (Γ(n) Γ(σ+k))`: the ratio `‖p‖²_{V_σ} / ‖p‖²_{L²(S)}` for
/// homogeneous `p` of degree `k`.
pub fn sphere_to_bergman_norm_factor(n: usize, k: u32, sigma: f64) -> Result<f64> {
    if !(sigma > n as f64) {
        return Err(Error::Domain(format!(
            "sigma must exceed n = {n}, got {sigma}"
        )));
    }
    Ok((ln_pochhammer(n as f64, k) - ln_pochhammer(sigma, k)).exp())
}

/// Exact inner product in `V_σ = A²_{σ−n−1}` of two functions whose atoms all
/// carry the exponent `σ` (so every atom is a multiple of a kernel section).
pub fn inner_product_exact(f: &HoloFunction, g: &HoloFunction, sigma: f64) -> Result<Complex64> {
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.dim(),
        });
    }
    let alpha = sigma - n as f64 - 1.0;
    check_alpha(alpha)?;
    for a in f.atoms().iter().chain(g.atoms()) {
        if (a.exponent - sigma).abs() > 1e-12 * sigma.max(1.0) {
            return Err(Error::UnsupportedAtomExponent {
                exponent: a.exponent,
                sigma,
            });
        }
    }
    let mut terms: Vec<Complex64> = Vec::new();
    // monomial × monomial: orthogonal, weighted by the closed-form norm
    for (gm, cf) in f.monomials() {
        if let Some(cg) = g.monomials().find(|(h, _)| *h == gm).map(|(_, c)| *c) {
            terms.push(cf * cg.conj() * ln_monomial_norm(gm, alpha).exp());
        }
    }
    // ⟨h, K(·, w)⟩ = h(w)
    for a in g.atoms() {
        let f_mono: Complex64 = f
            .monomials()
            .map(|(gm, c)| c * monomial_value(gm, a.center.coords()))
            .sum();
        terms.push(f_mono * a.coeff.conj());
    }
    // ⟨K(·, w), h⟩ = conj(h(w)) for monomial h
    for a in f.atoms() {
        let g_mono: Complex64 = g
            .monomials()
            .map(|(gm, c)| c * monomial_value(gm, a.center.coords()))
            .sum();
        terms.push(a.coeff * g_mono.conj());
        // ⟨K(·, w₁), K(·, w₂)⟩ = K(w₂, w₁)
        for b in g.atoms() {
            terms.push(
                a.coeff * b.coeff.conj() * kernel_eval(b.center.coords(), a.center.coords(), alpha),
            );
        }
    }
    Ok(compensated_sum_complex(terms))
}

/// `‖f‖_{V_σ}` via [`inner_product_exact`].
pub fn norm_exact(f: &HoloFunction, sigma: f64) -> Result<f64> {
    Ok(inner_product_exact(f, f, sigma)?.re.max(0.0).sqrt())
}

/// `Σ_γ |c_γ|² ‖z^γ‖²_α` for a polynomial; the `A²_α` norm squared.
pub fn polynomial_norm_sqr(f: &HoloFunction, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !f.is_polynomial() {
        return Err(Error::Domain(
            "polynomial_norm_sqr needs a polynomial".into(),
        ));
    }
    Ok(f.monomials()
        .map(|(g, c)| c.norm_sqr() * ln_monomial_norm(g, alpha).exp())
        .sum())
}

/// Homogeneous expansion `f = Σ_k f_k` truncated at degree `k_max`. Each
/// atom `c (1 − ⟨z, w⟩)^{−s}` contributes `c (s)_k/γ! w̄^γ z^γ` at `|γ| = k`.
pub fn homogeneous_parts(f: &HoloFunction, k_max: u32) -> Vec<HoloFunction> {
    let n = f.dim();
    (0..=k_max)
        .map(|k| {
            let mut part = f.monomial_part_of_degree(k);
            for a in f.atoms() {
                let lp = ln_pochhammer(a.exponent, k);
                for g in indices_of_degree(n, k) {
                    let wbar: Vec<Complex64> = a.center.coords().iter().map(|v| v.conj()).collect();
                    let coeff = a.coeff * monomial_value(&g, &wbar) * (lp - g.ln_factorial()).exp();
                    part.add_monomial(coeff, g);
                }
            }
            part
        })
        .collect()
}

/// Result of the degreewise decay test for smooth vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// Whether the envelope `‖f_k‖ (1+k)^N` peaks strictly before the last
    /// supplied degree and does not rise again in the final quarter.
    pub smooth: bool,
    /// Minimal `C` with `‖f_k‖_{V_σ} ≤ C (1+k)^{−N}` for all supplied `k`.
    pub constant: f64,
    pub envelope: Vec<f64>,
}

/// Degreewise decay check `‖f_k‖_{V_σ} ≤ C (1+k)^{−N}` on parts `0..=k_max`.
///
/// Any finite sequence satisfies the bound with some `C`; the verdict is
/// whether the weighted envelope has already turned over inside the window.
pub fn smooth_decay_check(parts: &[HoloFunction], sigma: f64, order: f64) -> Result<DecayReport> {
    let Some(first) = parts.first() else {
        return Ok(DecayReport {
            smooth: true,
            constant: 0.0,
            envelope: vec![],
        });
    };
    let alpha = sigma - first.dim() as f64 - 1.0;
    let envelope: Vec<f64> = parts
        .iter()
        .enumerate()
        .map(|(k, p)| Ok(polynomial_norm_sqr(p, alpha)?.sqrt() * (1.0 + k as f64).powf(order)))
        .collect::<Result<_>>()?;
    let constant = envelope.iter().cloned().fold(0.0, f64::max);
    if constant == 0.0 {
        return Ok(DecayReport {
            smooth: true,
            constant,
            envelope,
        });
    }
    let last = envelope.len() - 1;
    let argmax = envelope.iter().position(|&v| v == constant).unwrap_or(0);
    let tail_start = last - last / 4;
    let tail_monotone = envelope[tail_start..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    Ok(DecayReport {
        smooth: argmax < last && tail_monotone,
        constant,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BallPoint;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_norm_examples() {
        assert_relative_eq!(
            monomial_norm(&MultiIndex(vec![1]), 0.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            monomial_norm(&MultiIndex(vec![0, 0, 0]), 2.7).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            monomial_norm(&MultiIndex(vec![3]), 2.0).unwrap(),
            0.05,
            epsilon = 1e-15
        );
        assert!(matches!(
            monomial_norm(&MultiIndex(vec![1]), -1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn no_overflow_at_high_degree() {
        let v = monomial_norm(&MultiIndex(vec![120, 110]), 3.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(
            phi_gamma_eval(&MultiIndex(vec![0, 0]), 1.0, &[c(0.3, 0.0), c(0.1, 0.0)]).unwrap(),
            c(1.0, 0.0)
        );
        let v = phi_gamma_eval(&MultiIndex(vec![1]), 0.0, &[c(0.5, 0.0)]).unwrap();
        assert_relative_eq!(v.re, 2f64.sqrt() * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(
            kernel_eval(&[c(0.3, 0.2)], &[c(0.0, 0.0)], 1.0),
            c(1.0, 0.0)
        );
        let v = kernel_eval(&[c(0.5, 0.0)], &[c(0.5, 0.0)], 0.0);
        assert_relative_eq!(v.re, 16.0 / 9.0, epsilon = 1e-14);
        let ps = kernel_partial_sum(&[c(0.5, 0.0)], &[c(0.5, 0.0)], 0.0, 60);
        assert_relative_eq!(ps.re, 16.0 / 9.0, epsilon = 1e-14);
        let o = kernel_eval(
            &[c(0.3, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(0.4, 0.0)],
            0.0,
        );
        assert_eq!(o, c(1.0, 0.0));
    }

    #[test]
    fn sphere_examples() {
        assert_relative_eq!(
            sphere_monomial_norm(&MultiIndex(vec![1, 0])),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            sphere_kernel_hk(&[c(0.2, 0.1)], &[c(0.4, 0.0)], 0).re,
            1.0,
            epsilon = 1e-15
        );
        let h = sphere_kernel_hk(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)], 1);
        assert_relative_eq!(h.re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn sphere_kernel_is_a_power_of_the_pairing() {
        // multinomial theorem: H_k = (n)_k / k! ⟨z, w⟩^k
        let z = [c(0.3, -0.4), c(0.5, 0.1), c(-0.2, 0.2)];
        let w = [c(0.1, 0.6), c(-0.3, 0.2), c(0.4, 0.4)];
        for k in 0..7 {
            let oracle = pairing(&z, &w).powu(k)
                * (ln_pochhammer(3.0, k) - crate::numeric::gamma::ln_factorial(k)).exp();
            assert!((sphere_kernel_hk(&z, &w, k) - oracle).norm() < 1e-13);
        }
    }

    #[test]
    fn norm_factor_examples_and_identity() {
        assert_relative_eq!(sphere_to_bergman_norm_factor(1, 0, 2.0).unwrap(), 1.0);
        assert_relative_eq!(
            sphere_to_bergman_norm_factor(1, 1, 2.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            sphere_to_bergman_norm_factor(2, 2, 3.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        for n in 1..=3usize {
            for &sigma in &[n as f64 + 0.5, n as f64 + 1.0, 2.0 * n as f64 + 1.0] {
                for k in 0..9 {
                    for g in indices_of_degree(n, k) {
                        let lhs = monomial_norm(&g, sigma - n as f64 - 1.0).unwrap();
                        let rhs = sphere_to_bergman_norm_factor(n, k, sigma).unwrap()
                            * sphere_monomial_norm(&g);
                        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn onb_is_orthonormal_under_exact_pairing() {
        let sigma = 3.5;
        let alpha = sigma - 3.0;
        let basis: Vec<HoloFunction> = indices_up_to(2, 3)
            .into_iter()
            .map(|g| {
                let s = (-0.5 * ln_monomial_norm(&g, alpha)).exp();
                HoloFunction::monomial(c(s, 0.0), g)
            })
            .collect();
        for (i, f) in basis.iter().enumerate() {
            for (j, g) in basis.iter().enumerate() {
                let ip = inner_product_exact(f, g, sigma).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn reproducing_pairings() {
        let sigma = 3.0;
        let w = BallPoint::new(vec![c(0.3, -0.2)]).unwrap();
        let atom = HoloFunction::atom(w.clone(), sigma).unwrap();
        let one = HoloFunction::one(1);
        assert!((inner_product_exact(&one, &atom, sigma).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let z2 = HoloFunction::monomial(c(1.0, 0.0), MultiIndex(vec![2]));
        let v = inner_product_exact(&z2, &atom, sigma).unwrap();
        assert!((v - w.coords()[0].powu(2)).norm() < 1e-15);
        let bad = HoloFunction::atom(w, 2.0).unwrap();
        assert!(matches!(
            inner_product_exact(&one, &bad, sigma),
            Err(Error::UnsupportedAtomExponent { .. })
        ));
    }

    #[test]
    fn homogeneous_parts_of_atom() {
        let w = BallPoint::new(vec![c(0.3, 0.2), c(-0.1, 0.25)]).unwrap();
        let s = 2.5;
        let f = HoloFunction::atom(w.clone(), s).unwrap();
        let parts = homogeneous_parts(&f, 60);
        let z = [c(0.4, -0.1), c(0.2, 0.3)];
        assert!((parts[1].eval(&z) - pairing(&z, w.coords()) * s).norm() < 1e-14);
        let total: Complex64 = parts.iter().map(|p| p.eval(&z)).sum();
        assert!((total - f.eval(&z)).norm() < 1e-8);
        // monomial input: single part
        let m = HoloFunction::monomial(c(1.0, 0.0), MultiIndex(vec![2, 1]));
        let mp = homogeneous_parts(&m, 5);
        assert!(mp.iter().enumerate().all(|(k, p)| p.is_zero() == (k != 3)));
    }

    #[test]
    fn smooth_decay_examples() {
        let poly = HoloFunction::from_monomials(
            1,
            [
                (c(1.0, 0.0), MultiIndex(vec![0])),
                (c(3.0, 0.0), MultiIndex(vec![4])),
            ],
        );
        let r = smooth_decay_check(&homogeneous_parts(&poly, 40), 3.0, 12.0).unwrap();
        assert!(r.smooth);
        let zero = HoloFunction::zero(1);
        let r = smooth_decay_check(&homogeneous_parts(&zero, 10), 3.0, 5.0).unwrap();
        assert!(r.smooth && r.constant == 0.0);
        // parts with ‖f_k‖ = (1+k)^{-2}: not O((1+k)^{-5})
        let parts: Vec<HoloFunction> = (0..=80u32)
            .map(|k| {
                let g = MultiIndex(vec![k]);
                let s = (1.0 + k as f64).powi(-2) * (-0.5 * ln_monomial_norm(&g, 1.0)).exp();
                HoloFunction::monomial(c(s, 0.0), g)
            })
            .collect();
        assert!(!smooth_decay_check(&parts, 3.0, 5.0).unwrap().smooth);
    }

    #[test]
    fn interior_atom_is_smooth_at_moderate_radius() {
        // ‖f_k‖² = (σ)_k/k! |w|^{2k}: geometric decay beats any power of k
        let f = HoloFunction::atom(BallPoint::from_real(&[0.9]).unwrap(), 3.0).unwrap();
        let parts = homogeneous_parts(&f, 80);
        let r = smooth_decay_check(&parts, 3.0, 5.0).unwrap();
        for (k, p) in parts.iter().enumerate() {
            let exact = (ln_pochhammer(3.0, k as u32)
                - crate::numeric::gamma::ln_factorial(k as u32))
            .exp()
                * 0.81f64.powi(k as i32);
            assert_relative_eq!(
                polynomial_norm_sqr(p, 1.0).unwrap(),
                exact,
                max_relative = 1e-12
            );
        }
        assert!(r.smooth);
        // closer to the boundary the envelope has not turned over by k = 80
        let g = HoloFunction::atom(BallPoint::from_real(&[0.99]).unwrap(), 3.0).unwrap();
        assert!(
            !smooth_decay_check(&homogeneous_parts(&g, 80), 3.0, 5.0)
                .unwrap()
                .smooth
        );
    }
}
