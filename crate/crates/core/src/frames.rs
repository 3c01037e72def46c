//! Frames and atomic decompositions built from the atoms `e_i = π_σ(x_i) ζ`
//! over a point family: analysis and synthesis, Gram matrices, spectral frame
//! bounds on the polynomial test space, coefficient solves and reconstruction.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bergman::holo::{principal_inv_power, AtomTerm, HoloFunction};
use crate::bergman::multi_index::{indices_up_to, MultiIndex};
use crate::bergman::norms::{
    inner_product_exact, ln_monomial_norm, norm_exact, phi_gamma_eval, polynomial_norm_sqr,
};
use crate::bergman::quadrature::{lp_alpha_norm, QuadratureRule};
use crate::error::{Error, Result};
use crate::group::pairing;
use crate::representation::action::{dbar_power, pi_apply, RepParams, DEFAULT_TRUNCATION};
use crate::representation::wavelet::wavelet;
use crate::sampling::PointFamily;

/// Smallest admissible singular value / eigenvalue.
pub const TAU_LIN: f64 = 1e-12;
/// Target relative residual for decompositions and reconstructions.
pub const TAU_REC: f64 = 1e-6;
/// Largest family for which a dense Gram matrix is assembled.
pub const MAX_GRAM_POINTS: usize = 8192;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// `(n, σ, α, p)` with `σ > n`, `1 ≤ p < ∞` and `−1 < α < p(σ − n) − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    pub n: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub p: f64,
}

impl FrameParams {
    pub fn new(n: usize, sigma: f64, alpha: f64, p: f64) -> Result<Self> {
        RepParams::new(n, sigma)?;
        if !(1.0..f64::INFINITY).contains(&p) {
            return Err(Error::Domain(format!("p must lie in [1, ∞), got {p}")));
        }
        let upper = p * (sigma - n as f64) - 1.0;
        if !(alpha > -1.0 && alpha < upper) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} outside (-1, {upper})"
            )));
        }
        Ok(Self { n, sigma, alpha, p })
    }

    pub fn rep(&self) -> RepParams {
        RepParams {
            n: self.n,
            sigma: self.sigma,
        }
    }

    /// `α + n + 1 − σp/2`, the weight exponent of coefficient sequences.
    pub fn coefficient_exponent(&self) -> f64 {
        self.alpha + self.n as f64 + 1.0 - 0.5 * self.sigma * self.p
    }

    /// `α + n + 1 − σ`, the exponent used by the spectral (p = 2) bounds.
    pub fn spectral_exponent(&self) -> f64 {
        self.alpha + self.n as f64 + 1.0 - self.sigma
    }
}

/// Coefficients indexed by the family together with their weight exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeq {
    pub values: Vec<Complex64>,
    pub weight_exponent: f64,
}

impl CoefficientSeq {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug)]
enum AtomKind {
    /// `e_i = a · d̄_i^{−σ} (1 − ⟨z, w_i⟩)^{−σ}`, i.e. `ζ = a` constant.
    Constant(Complex64),
    Polynomial,
}

/// Atoms `π_σ(x_i) ζ` over a point family with a polynomial test space of
/// degree `≤ K`. Caches are filled on first use and never mutated after.
#[derive(Debug)]
pub struct FrameSystem {
    params: FrameParams,
    family: PointFamily,
    atom: HoloFunction,
    kind: AtomKind,
    truncation: u32,
    transport_degree: u32,
    transported: OnceLock<Vec<(HoloFunction, f64)>>,
    gram: OnceLock<DMatrix<Complex64>>,
}

impl FrameSystem {
    /// System with the constant atom `ψ = 1`.
    pub fn new(params: FrameParams, family: PointFamily, truncation: u32) -> Result<Self> {
        let atom = HoloFunction::one(params.n);
        Self::with_atom(params, family, atom, truncation)
    }

    /// System with a polynomial atom `ζ`.
    pub fn with_atom(
        params: FrameParams,
        family: PointFamily,
        atom: HoloFunction,
        truncation: u32,
    ) -> Result<Self> {
        if family.dim() != params.n {
            return Err(Error::DimensionMismatch {
                expected: params.n,
                got: family.dim(),
            });
        }
        if atom.dim() != params.n {
            return Err(Error::DimensionMismatch {
                expected: params.n,
                got: atom.dim(),
            });
        }
        if !atom.is_polynomial() || atom.is_zero() {
            return Err(Error::Domain("atom must be a nonzero polynomial".into()));
        }
        let kind = if atom.polynomial_degree() == 0 {
            let a = atom.monomials().map(|(_, c)| *c).sum();
            AtomKind::Constant(a)
        } else {
            AtomKind::Polynomial
        };
        Ok(Self {
            params,
            family,
            atom,
            kind,
            truncation,
            transport_degree: DEFAULT_TRUNCATION,
            transported: OnceLock::new(),
            gram: OnceLock::new(),
        })
    }

    /// Degree to which polynomial atoms are re-expanded for synthesis and
    /// Gram assembly. Only meaningful before any cache is filled.
    pub fn with_transport_degree(mut self, degree: u32) -> Self {
        self.transport_degree = degree.max(self.truncation);
        self.transported = OnceLock::new();
        self.gram = OnceLock::new();
        self
    }

    pub fn params(&self) -> &FrameParams {
        &self.params
    }

    pub fn family(&self) -> &PointFamily {
        &self.family
    }

    pub fn atom(&self) -> &HoloFunction {
        &self.atom
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    fn rep(&self) -> RepParams {
        self.params.rep()
    }

    /// Phase `a · d̄_i^{−σ}` of a constant-atom system.
    fn phase(&self, i: usize, a: Complex64) -> Complex64 {
        a * dbar_power(&self.rep(), &self.family.entries()[i].x)
    }

    /// `π_σ(x_i) ζ` re-expanded to the transport degree, with tail bounds.
    fn transported(&self) -> Result<&[(HoloFunction, f64)]> {
        if let Some(t) = self.transported.get() {
            return Ok(t);
        }
        let rep = self.rep();
        let deg = self.transport_degree;
        let t: Vec<(HoloFunction, f64)> = self
            .family
            .entries()
            .par_iter()
            .map(|e| pi_apply(&rep, &e.x, &self.atom, deg).map(|t| (t.function, t.tail_bound)))
            .collect::<Result<_>>()?;
        Ok(self.transported.get_or_init(|| t))
    }

    fn check_capacity(&self) -> Result<()> {
        if self.len() > MAX_GRAM_POINTS {
            return Err(Error::CapacityExceeded {
                count: self.len(),
                max: MAX_GRAM_POINTS,
            });
        }
        Ok(())
    }
}

/// `c_i = ⟨f, π_σ(x_i) ζ⟩` in `A²_{σ−n−1}`, exactly.
pub fn analysis(sys: &FrameSystem, f: &HoloFunction) -> Result<CoefficientSeq> {
    let rep = sys.rep();
    if f.dim() != rep.n {
        return Err(Error::DimensionMismatch {
            expected: rep.n,
            got: f.dim(),
        });
    }
    let values: Vec<Complex64> = match sys.kind {
        AtomKind::Constant(a) => {
            if let Some(t) = f
                .atoms()
                .iter()
                .find(|t| (t.exponent - rep.sigma).abs() > 1e-12 * rep.sigma)
            {
                return Err(Error::UnsupportedAtomExponent {
                    exponent: t.exponent,
                    sigma: rep.sigma,
                });
            }
            (0..sys.len())
                .into_par_iter()
                .map(|i| sys.phase(i, a).conj() * f.eval_at(&sys.family.entries()[i].w))
                .collect()
        }
        AtomKind::Polynomial => sys
            .family
            .entries()
            .par_iter()
            .map(|e| wavelet(&rep, f, &sys.atom, &e.x))
            .collect::<Result<_>>()?,
    };
    Ok(CoefficientSeq {
        values,
        weight_exponent: sys.params.coefficient_exponent(),
    })
}

/// `Σ c_i π_σ(x_i) ζ` together with a sup-norm bound on the truncation error
/// (zero for constant atoms, which are carried as exact kernel sections).
pub fn synthesis_with_tail(sys: &FrameSystem, c: &[Complex64]) -> Result<(HoloFunction, f64)> {
    if c.len() != sys.len() {
        return Err(Error::DimensionMismatch {
            expected: sys.len(),
            got: c.len(),
        });
    }
    let mut out = HoloFunction::zero(sys.params.n);
    match sys.kind {
        AtomKind::Constant(a) => {
            for (i, ci) in c.iter().enumerate() {
                if *ci == ZERO {
                    continue;
                }
                let e = &sys.family.entries()[i];
                out.add_atom(AtomTerm {
                    coeff: ci * sys.phase(i, a),
                    center: e.w.clone(),
                    exponent: sys.params.sigma,
                });
            }
            Ok((out, 0.0))
        }
        AtomKind::Polynomial => {
            let t = sys.transported()?;
            let mut tail = 0.0;
            for (ci, (h, tb)) in c.iter().zip(t) {
                if *ci == ZERO {
                    continue;
                }
                out = out.add(&h.scale(*ci));
                tail += ci.norm() * tb;
            }
            Ok((out, tail))
        }
    }
}

/// `Σ c_i π_σ(x_i) ζ`.
pub fn synthesis(sys: &FrameSystem, c: &[Complex64]) -> Result<HoloFunction> {
    synthesis_with_tail(sys, c).map(|(f, _)| f)
}

/// `G_ij = ⟨e_j, e_i⟩`, so that `c^H G c = ‖Σ c_i e_i‖²` and `G c = analysis(Σ c_j e_j)`.
pub fn gram(sys: &FrameSystem) -> Result<&DMatrix<Complex64>> {
    if let Some(g) = sys.gram.get() {
        return Ok(g);
    }
    if sys.is_empty() {
        return Err(Error::DegenerateFamily(0.0));
    }
    sys.check_capacity()?;
    let n = sys.len();
    let sigma = sys.params.sigma;
    let rows: Vec<Vec<Complex64>> = match sys.kind {
        AtomKind::Constant(a) => {
            let phases: Vec<Complex64> = (0..n).map(|i| sys.phase(i, a)).collect();
            let entries = sys.family.entries();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let k = principal_inv_power(
                                ONE - pairing(entries[i].w.coords(), entries[j].w.coords()),
                                sigma,
                            );
                            phases[j] * phases[i].conj() * k
                        })
                        .collect()
                })
                .collect()
        }
        AtomKind::Polynomial => {
            let t = sys.transported()?;
            (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| inner_product_exact(&t[j].0, &t[i].0, sigma))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?
        }
    };
    let mut g = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    // symmetrise away rounding
    for i in 0..n {
        g[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
        for j in 0..i {
            let v = 0.5 * (g[(i, j)] + g[(j, i)].conj());
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(sys.gram.get_or_init(|| g))
}

/// Spectral frame bounds on the test space of polynomials of degree `≤ K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub a_est: f64,
    pub b_est: f64,
    pub truncation: u32,
    /// Bounds on degree `≤ K − 1`, when `K ≥ 1`.
    pub previous: Option<(f64, f64)>,
    /// `|A_K − A_{K−1}| / A_K`.
    pub k_stability: Option<f64>,
}

/// Weighted analysis matrix `M_{iγ} = (1 − |w_i|²)^{e/2} ⟨φ_γ, e_i⟩_σ` over the
/// `A²_α` orthonormal monomials of degree `≤ K`, with `e = α + n + 1 − σ`.
pub fn analysis_matrix(sys: &FrameSystem, k: u32) -> Result<(DMatrix<Complex64>, Vec<MultiIndex>)> {
    let p = &sys.params;
    let rep = sys.rep();
    let gammas = indices_up_to(p.n, k);
    let half_e = 0.5 * p.spectral_exponent();
    let rows: Vec<Vec<Complex64>> = sys
        .family
        .entries()
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let weight = e.one_minus_w2.powf(half_e);
            match sys.kind {
                AtomKind::Constant(a) => {
                    let ph = sys.phase(i, a).conj() * weight;
                    gammas
                        .iter()
                        .map(|g| phi_gamma_eval(g, p.alpha, e.w.coords()).map(|v| ph * v))
                        .collect::<Result<Vec<_>>>()
                }
                AtomKind::Polynomial => {
                    // ⟨z^γ, h⟩_σ only sees the degree-|γ| coefficients of h = π(x_i)ζ
                    let h = pi_apply(&rep, &e.x, &sys.atom, k)?.function;
                    Ok(gammas
                        .iter()
                        .map(|g| {
                            let hg = h
                                .monomials()
                                .find(|(m, _)| *m == g)
                                .map(|(_, c)| *c)
                                .unwrap_or(ZERO);
                            let scale = (ln_monomial_norm(g, rep.alpha())
                                - 0.5 * ln_monomial_norm(g, p.alpha))
                            .exp();
                            hg.conj() * scale * weight
                        })
                        .collect())
                }
            }
        })
        .collect::<Result<_>>()?;
    let m = DMatrix::from_fn(rows.len(), gammas.len(), |i, j| rows[i][j]);
    Ok((m, gammas))
}

fn extreme_singular_values(m: &DMatrix<Complex64>) -> (f64, f64) {
    if m.nrows() < m.ncols() {
        let s = m.clone().svd(false, false).singular_values;
        return (0.0, s.max());
    }
    let s = m.clone().svd(false, false).singular_values;
    (s.min(), s.max())
}

/// `(σ_min(M)², σ_max(M)²)` for `M` of [`analysis_matrix`], with the same pair
/// at degree `K − 1` for stability. Requires `p = 2`.
pub fn frame_bounds(sys: &FrameSystem) -> Result<FrameBounds> {
    if sys.params.p != 2.0 {
        return Err(Error::Domain(format!(
            "spectral frame bounds need p = 2, got {}",
            sys.params.p
        )));
    }
    if sys.is_empty() {
        return Err(Error::DegenerateFamily(0.0));
    }
    let k = sys.truncation;
    let (m, gammas) = analysis_matrix(sys, k)?;
    let (smin, smax) = extreme_singular_values(&m);
    if !(smin >= TAU_LIN) {
        return Err(Error::DegenerateFamily(smin));
    }
    let previous = if k >= 1 {
        let cols: Vec<usize> = gammas
            .iter()
            .enumerate()
            .filter(|(_, g)| g.degree() < k)
            .map(|(j, _)| j)
            .collect();
        let sub = m.select_columns(cols.iter());
        let (a, b) = extreme_singular_values(&sub);
        Some((a * a, b * b))
    } else {
        None
    };
    let a_est = smin * smin;
    Ok(FrameBounds {
        a_est,
        b_est: smax * smax,
        truncation: k,
        previous,
        k_stability: previous.map(|(a, _)| (a_est - a).abs() / a_est),
    })
}

/// `(Σ |c_i|^p (1 − |w_i|²)^e)^{1/p}`.
pub fn seq_norm(c: &[Complex64], family: &PointFamily, p: f64, e: f64) -> Result<f64> {
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [1, ∞), got {p}")));
    }
    if c.len() != family.len() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            got: c.len(),
        });
    }
    let s = crate::numeric::sum::compensated_sum(
        c.iter()
            .zip(family.entries())
            .map(|(ci, en)| ci.norm().powf(p) * en.one_minus_w2.powf(e)),
    );
    Ok(s.powf(1.0 / p))
}

/// Observed range of `seq_norm(analysis f)^p / ‖f‖^p_{A^p_α}` over `fs`, with
/// the `A^p_α` norm by quadrature (the rule must carry weight `α`).
pub fn empirical_norm_equiv(
    sys: &FrameSystem,
    fs: &[HoloFunction],
    rule: &QuadratureRule,
) -> Result<(f64, f64)> {
    let p = &sys.params;
    if (rule.alpha() - p.alpha).abs() > 1e-14 {
        return Err(Error::Domain(format!(
            "rule weight {} does not match alpha = {}",
            rule.alpha(),
            p.alpha
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for f in fs {
        let c = analysis(sys, f)?;
        let s = seq_norm(&c.values, &sys.family, p.p, c.weight_exponent)?.powf(p.p);
        let norm = lp_alpha_norm(f, p.p, rule)?.powf(p.p);
        if norm == 0.0 {
            continue;
        }
        lo = lo.min(s / norm);
        hi = hi.max(s / norm);
    }
    Ok((lo, hi))
}

/// Settings for [`decompose`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOptions {
    /// Relative residual at which iteration stops.
    pub tolerance: f64,
    /// Defaults to ten times the family size.
    pub max_iterations: Option<usize>,
    /// Iterations without a new best residual before declaring stagnation.
    pub stagnation_window: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: None,
            stagnation_window: 50,
        }
    }
}

/// Result of [`decompose`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub coefficients: CoefficientSeq,
    /// `‖synthesis(c) − f‖ / ‖f‖` in `A²_{σ−n−1}`.
    pub residual: f64,
    pub iterations: usize,
    /// Tikhonov parameter actually used (zero unless CG stagnated).
    pub regularization: f64,
    pub seq_norm: f64,
}

struct CgOutcome {
    c: DVector<Complex64>,
    residual_sqr: f64,
    iterations: usize,
    stagnated: bool,
}

fn dot(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.dotc(b)
}

/// `‖Σ c_i e_i − f‖² = ‖f‖² − 2 Re c^H b + c^H G c`.
fn misfit(
    f_sqr: f64,
    c: &DVector<Complex64>,
    b: &DVector<Complex64>,
    gc: &DVector<Complex64>,
) -> f64 {
    (f_sqr - 2.0 * dot(c, b).re + dot(c, gc).re).max(0.0)
}

/// Jacobi-preconditioned CG on `(G + λI) c = b` from `c = 0`; keeps the best
/// iterate measured by the function-space misfit. Search directions are
/// explicitly re-conjugated against all earlier ones (up to `N` of them),
/// which keeps convergence finite on badly conditioned Gram matrices.
fn conjugate_gradient(
    g: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    f_sqr: f64,
    lambda: f64,
    opts: &DecomposeOptions,
) -> CgOutcome {
    let n = b.len();
    let max_iter = opts.max_iterations.unwrap_or(10 * n);
    let target = opts.tolerance * opts.tolerance * f_sqr;
    let lam = Complex64::new(lambda, 0.0);
    let diag: Vec<f64> = (0..n)
        .map(|i| (g[(i, i)].re + lambda).max(f64::MIN_POSITIVE))
        .collect();
    let precond = |r: &DVector<Complex64>| DVector::from_fn(n, |i, _| r[i] / diag[i]);

    let mut c = DVector::from_element(n, ZERO);
    let mut gc = DVector::from_element(n, ZERO);
    let mut r = b.clone();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z).re;
    let mut history: Vec<(DVector<Complex64>, DVector<Complex64>, f64)> = Vec::new();
    let mut best = (c.clone(), f_sqr, 0usize);
    let mut stagnated = false;
    let mut iterations = 0;
    for it in 1..=max_iter {
        iterations = it;
        let gp_plain = g * &p;
        let gp = &gp_plain + &p * lam;
        let pgp = dot(&p, &gp).re;
        if !(pgp > 0.0) || rz == 0.0 {
            break;
        }
        let step = Complex64::new(dot(&p, &r).re / pgp, 0.0);
        c += &p * step;
        gc += &gp_plain * step;
        r -= &gp * step;
        if it % 50 == 0 {
            gc = g * &c;
            r = b - &gc - &c * lam;
        }
        let m = misfit(f_sqr, &c, b, &gc);
        if m < best.1 {
            best = (c.clone(), m, it);
        }
        if best.1 <= target {
            break;
        }
        if it - best.2 >= opts.stagnation_window {
            stagnated = true;
            break;
        }
        if history.len() < n {
            history.push((p.clone(), gp, pgp));
        }
        z = precond(&r);
        let rz_new = dot(&r, &z).re;
        p = &z + &p * Complex64::new(rz_new / rz, 0.0);
        for (pj, gpj, dj) in &history {
            let coef = dot(gpj, &p) / *dj;
            p -= pj * coef;
        }
        rz = rz_new;
    }
    if iterations == max_iter && best.1 > target {
        stagnated = true;
    }
    CgOutcome {
        c: best.0,
        residual_sqr: best.1,
        iterations,
        stagnated,
    }
}

fn solve_gram(
    sys: &FrameSystem,
    b: &[Complex64],
    f_sqr: f64,
    opts: &DecomposeOptions,
) -> Result<(CgOutcome, f64)> {
    let g = gram(sys)?;
    let bv = DVector::from_column_slice(b);
    let out = conjugate_gradient(g, &bv, f_sqr, 0.0, opts);
    if !out.stagnated || out.residual_sqr <= TAU_REC * TAU_REC * f_sqr {
        return Ok((out, 0.0));
    }
    let b_est = g.norm();
    let lambda = 1e-10 * b_est;
    let reg = conjugate_gradient(g, &bv, f_sqr, lambda, opts);
    if reg.residual_sqr < out.residual_sqr {
        Ok((reg, lambda))
    } else {
        Ok((out, 0.0))
    }
}

/// Coefficients `c` with `Σ c_i π_σ(x_i) ζ ≈ f` in `A²_{σ−n−1}`, by CG on the
/// Gram normal equations from `c = 0` (the minimum-ℓ² solution on the range).
pub fn decompose(
    sys: &FrameSystem,
    f: &HoloFunction,
    opts: &DecomposeOptions,
) -> Result<Decomposition> {
    let f_sqr = norm_exact(f, sys.params.sigma)?.powi(2);
    let b = analysis(sys, f)?;
    if f_sqr == 0.0 {
        let values = vec![ZERO; sys.len()];
        return Ok(Decomposition {
            coefficients: CoefficientSeq {
                values,
                weight_exponent: b.weight_exponent,
            },
            residual: 0.0,
            iterations: 0,
            regularization: 0.0,
            seq_norm: 0.0,
        });
    }
    let (out, lambda) = solve_gram(sys, &b.values, f_sqr, opts)?;
    let values: Vec<Complex64> = out.c.iter().copied().collect();
    let (g, tail) = synthesis_with_tail(sys, &values)?;
    let residual = match sys.kind {
        AtomKind::Constant(_) => norm_exact(&g.sub(f), sys.params.sigma)? / f_sqr.sqrt(),
        AtomKind::Polynomial => (out.residual_sqr / f_sqr).sqrt() + tail / f_sqr.sqrt(),
    };
    if !(residual <= TAU_REC) {
        return Err(Error::ConvergenceFailure(format!(
            "relative residual {residual:e} after {} iterations exceeds {TAU_REC:e}",
            out.iterations
        )));
    }
    let seq = seq_norm(&values, &sys.family, sys.params.p, b.weight_exponent)?;
    Ok(Decomposition {
        coefficients: CoefficientSeq {
            values,
            weight_exponent: b.weight_exponent,
        },
        residual,
        iterations: out.iterations,
        regularization: lambda,
        seq_norm: seq,
    })
}

/// How [`reconstruct_from_samples`] inverts the frame operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionMethod {
    /// Least squares `M a = y` on the degree-`≤ K` orthonormal basis of `A²_α`.
    LeastSquares,
    /// Orthogonal projection in `A²_{σ−n−1}` onto the span of the atoms.
    AtomProjection,
}

/// A reconstructed function and the method that produced it.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub function: HoloFunction,
    pub method: ReconstructionMethod,
}

/// Recovers `f` from `c = analysis(f)`.
pub fn reconstruct_from_samples(
    sys: &FrameSystem,
    samples: &CoefficientSeq,
    method: ReconstructionMethod,
) -> Result<Reconstruction> {
    if samples.len() != sys.len() {
        return Err(Error::DimensionMismatch {
            expected: sys.len(),
            got: samples.len(),
        });
    }
    let function = match method {
        ReconstructionMethod::LeastSquares => {
            let p = &sys.params;
            let (m, gammas) = analysis_matrix(sys, sys.truncation)?;
            let half_e = 0.5 * p.spectral_exponent();
            let y = DVector::from_fn(sys.len(), |i, _| {
                samples.values[i] * sys.family.entries()[i].one_minus_w2.powf(half_e)
            });
            let svd = m.svd(true, true);
            let smax = svd.singular_values.max();
            if !(svd.singular_values.min() >= TAU_LIN)
                || m_is_short(&svd.singular_values, gammas.len())
            {
                return Err(Error::DegenerateFamily(svd.singular_values.min()));
            }
            let a = svd
                .solve(&y, TAU_LIN * smax)
                .map_err(|e| Error::ConvergenceFailure(e.to_string()))?;
            HoloFunction::from_monomials(
                p.n,
                gammas
                    .iter()
                    .zip(a.iter())
                    .map(|(g, ag)| (ag * (-0.5 * ln_monomial_norm(g, p.alpha)).exp(), g.clone())),
            )
        }
        ReconstructionMethod::AtomProjection => {
            let b = &samples.values;
            // ‖f‖² is unknown from samples alone; any positive scale works for
            // the stopping rule, so use the squared sample norm
            let scale: f64 = b
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                .max(f64::MIN_POSITIVE);
            let opts = DecomposeOptions {
                tolerance: 0.0,
                ..DecomposeOptions::default()
            };
            let (out, _) = solve_gram(sys, b, scale, &opts)?;
            let c: Vec<Complex64> = out.c.iter().copied().collect();
            synthesis(sys, &c)?
        }
    };
    Ok(Reconstruction { function, method })
}

fn m_is_short(s: &DVector<f64>, cols: usize) -> bool {
    s.len() < cols
}

/// Relative error of a reconstruction: in `A²_α` for least squares, in
/// `A²_{σ−n−1}` for atom projection.
pub fn reconstruction_error(
    sys: &FrameSystem,
    rec: &Reconstruction,
    f: &HoloFunction,
) -> Result<f64> {
    let diff = rec.function.sub(f);
    match rec.method {
        ReconstructionMethod::LeastSquares => {
            let alpha = sys.params.alpha;
            let den = polynomial_norm_sqr(f, alpha)?;
            Ok((polynomial_norm_sqr(&diff, alpha)? / den).sqrt())
        }
        ReconstructionMethod::AtomProjection => {
            let sigma = sys.params.sigma;
            Ok(norm_exact(&diff, sigma)? / norm_exact(f, sigma)?)
        }
    }
}

/// Lower Riesz bound of the atoms from the Gram spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszBound {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `λ_min^{1/2}`: `‖Σ c_i e_i‖ ≥ bound · ‖c‖₂`.
    pub lower_bound: f64,
}

/// `λ_min(G)^{1/2}` at `p = 2`; `DegenerateFamily` when the atoms are
/// numerically dependent.
pub fn riesz_lower_bound(sys: &FrameSystem) -> Result<RieszBound> {
    let g = gram(sys)?;
    let eig = g.clone().symmetric_eigenvalues();
    let lambda_min = eig.min();
    if !(lambda_min >= TAU_LIN) {
        return Err(Error::DegenerateFamily(lambda_min));
    }
    Ok(RieszBound {
        lambda_min,
        lambda_max: eig.max(),
        lower_bound: lambda_min.sqrt(),
    })
}

/// Observed range of `‖Σ c_i e_i‖_{A^p_{σp/2−n−1}} / ‖c‖_p` over `trials`
/// seeded coefficient vectors with entries uniform in the unit square.
pub fn riesz_empirical(
    sys: &FrameSystem,
    rule: &QuadratureRule,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let p = &sys.params;
    let beta = 0.5 * p.sigma * p.p - p.n as f64 - 1.0;
    if (rule.alpha() - beta).abs() > 1e-14 {
        return Err(Error::Domain(format!(
            "rule weight {} does not match σp/2 − n − 1 = {beta}",
            rule.alpha()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for _ in 0..trials {
        let c: Vec<Complex64> = (0..sys.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let cn = c
            .iter()
            .map(|v| v.norm().powf(p.p))
            .sum::<f64>()
            .powf(1.0 / p.p);
        if cn == 0.0 {
            continue;
        }
        let f = synthesis(sys, &c)?;
        let r = lp_alpha_norm(&f, p.p, rule)? / cn;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}
