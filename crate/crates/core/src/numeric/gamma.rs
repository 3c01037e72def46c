//! Gamma-function ratios evaluated in the logarithmic domain.
//!
//! Every closed-form norm in the crate is a ratio of Gamma values whose
//! arguments grow with the polynomial degree; `Γ(x)` overflows a double near
//! `x ≈ 171`, the logarithms do not.

use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma called with x = {x}");
    statrs_ln_gamma(x)
}

/// `ln k!`
pub fn ln_factorial(k: u32) -> f64 {
    if k < 2 {
        return 0.0;
    }
    // exact products stay below 2^53 up to 18!
    if k <= 18 {
        return ((2..=u64::from(k)).product::<u64>() as f64).ln();
    }
    ln_gamma(f64::from(k) + 1.0)
}

/// `ln (Γ(a + k) / Γ(a))`, the log of the rising factorial `(a)_k`, for `a > 0`.
pub fn ln_pochhammer(a: f64, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if k <= 32 {
        // direct sum of logs is more accurate than the difference of two
        // large ln Γ values for short products
        return (0..k).map(|j| (a + f64::from(j)).ln()).sum();
    }
    ln_gamma(a + f64::from(k)) - ln_gamma(a)
}

/// `(s)_k / k!`, the k-th Taylor coefficient of `(1 - u)^{-s}`.
pub fn binomial_series_coeff(s: f64, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if s > 0.0 {
        (ln_pochhammer(s, k) - ln_factorial(k)).exp()
    } else {
        // generic recurrence, valid for any real s
        (0..k).fold(1.0, |acc, j| acc * (s + f64::from(j)) / f64::from(j + 1))
    }
}

/// `Γ(n + α + 1) / (n! Γ(α + 1))`, the normalising constant of `dv_α`.
pub fn weight_constant(n: usize, alpha: f64) -> f64 {
    (ln_gamma(n as f64 + alpha + 1.0) - ln_factorial(n as u32) - ln_gamma(alpha + 1.0)).exp()
}
