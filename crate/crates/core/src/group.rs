//! The group SU(n,1), its fractional linear action on the unit ball of `C^n`,
//! and coordinates on the solvable subgroup `S = AN`.
//!
//! A group element is stored as a dense `(n+1)×(n+1)` complex matrix
//!
//! ```text
//!     ⎛ a   b ⎞
//! x = ⎝ cᵗ  d ⎠ ,   a ∈ C^{n×n}, b, c ∈ C^n, d ∈ C,
//! ```
//!
//! with `det x = 1` and `x* J x = J`, `J = diag(-I_n, 1)`. It acts on the ball
//! by `x·z = (a z + b) / (cᵗ z + d)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the defining relations of a group element.
pub const TAU_GRP: f64 = 1e-10;
/// Tolerance on ball points produced by the action.
pub const TAU_PT: f64 = 1e-10;
/// Smallest admissible modulus of the action's denominator.
pub const TAU_DEN: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// The sesquilinear pairing `⟨z, w⟩ = Σ z_k w̄_k`.
pub fn pairing(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// A point of the open unit ball in `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("ball points need n >= 1 coordinates".into()));
        }
        let r2: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if !(r2 < 1.0) {
            return Err(Error::OutsideBall(r2));
        }
        Ok(Self { coords })
    }

    /// Convenience constructor from real coordinates.
    pub fn from_real(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The origin `o` of `C^n`.
    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![ZERO; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `1 - |z|²`
    pub fn one_minus_norm_sqr(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    pub fn pairing(&self, other: &BallPoint) -> Complex64 {
        pairing(&self.coords, &other.coords)
    }

    pub fn distance(&self, other: &BallPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// An element of SU(n,1).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    m: DMatrix<Complex64>,
}

/// Coordinates `a_t · n_{ζ,u}` of an element of `S = AN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SCoordinates {
    pub t: f64,
    pub zeta: Vec<Complex64>,
    pub u: f64,
}

impl SCoordinates {
    pub fn embed(&self, n: usize) -> Result<GroupElement> {
        Ok(a_element(n, self.t).multiply(&n_element(n, &self.zeta, self.u)?))
    }
}

fn j_form(n: usize) -> DMatrix<Complex64> {
    let mut j = DMatrix::from_element(n + 1, n + 1, ZERO);
    for k in 0..n {
        j[(k, k)] = -ONE;
    }
    j[(n, n)] = ONE;
    j
}

impl GroupElement {
    /// Builds `x` from its blocks and validates the defining relations.
    pub fn from_blocks(
        a: &DMatrix<Complex64>,
        b: &DVector<Complex64>,
        c: &DVector<Complex64>,
        d: Complex64,
    ) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::InvalidGroupElement(format!(
                "block a must be square n×n, got {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.len(),
            });
        }
        let mut m = DMatrix::from_element(n + 1, n + 1, ZERO);
        m.view_mut((0, 0), (n, n)).copy_from(a);
        for k in 0..n {
            m[(k, n)] = b[k];
            m[(n, k)] = c[k];
        }
        m[(n, n)] = d;
        Self::from_matrix(m)
    }

    /// Validates a full `(n+1)×(n+1)` matrix.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() < 2 || m.nrows() != m.ncols() {
            return Err(Error::InvalidGroupElement(format!(
                "matrix must be square of size >= 2, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let x = Self { m };
        let r = x.residuals();
        if r.form > TAU_GRP {
            return Err(Error::InvalidGroupElement(format!(
                "x*Jx - J has max entry {:e}",
                r.form
            )));
        }
        if r.det > TAU_GRP {
            return Err(Error::InvalidGroupElement(format!(
                "|det x - 1| = {:e}",
                r.det
            )));
        }
        if r.hyperbolic > TAU_GRP {
            return Err(Error::InvalidGroupElement(format!(
                "| |d|^2 - |b|^2 - 1 | = {:e}",
                r.hyperbolic
            )));
        }
        Ok(x)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n + 1, n + 1),
        }
    }

    /// Dimension `n` of the ball acted on.
    pub fn dim(&self) -> usize {
        self.m.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn a(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        self.m.view((0, 0), (n, n)).into_owned()
    }

    pub fn b(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|k| self.m[(k, n)]).collect()
    }

    pub fn c(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|k| self.m[(n, k)]).collect()
    }

    /// The lower-right entry `d`.
    pub fn d(&self) -> Complex64 {
        let n = self.dim();
        self.m[(n, n)]
    }

    /// Residuals of the three defining relations.
    pub fn residuals(&self) -> GroupResiduals {
        let n = self.dim();
        let j = j_form(n);
        let form = (self.m.adjoint() * &j * &self.m - &j)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let det = (self.m.determinant() - ONE).norm();
        let b2: f64 = self.b().iter().map(|v| v.norm_sqr()).sum();
        let hyperbolic = (self.d().norm_sqr() - b2 - 1.0).abs();
        GroupResiduals {
            form,
            det,
            hyperbolic,
        }
    }

    /// `x⁻¹ = J x* J`, i.e. the blocks `(a*, -c̄, -b̄ᵗ, d̄)`.
    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let mut m = self.m.adjoint();
        for k in 0..n {
            m[(k, n)] = -m[(k, n)];
            m[(n, k)] = -m[(n, k)];
        }
        Self { m }
    }

    pub fn multiply(&self, other: &GroupElement) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            m: &self.m * &other.m,
        }
    }

    /// `x·o = b/d`.
    pub fn origin_image(&self) -> BallPoint {
        let d = self.d();
        BallPoint {
            coords: self.b().iter().map(|bk| bk / d).collect(),
        }
    }

    /// Fractional linear action `x·z = (a z + b) / (⟨c, z̄⟩ + d)`.
    pub fn act(&self, z: &BallPoint) -> Result<BallPoint> {
        let n = self.dim();
        if z.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: z.dim(),
            });
        }
        let zc = z.coords();
        let den: Complex64 =
            (0..n).map(|k| self.m[(n, k)] * zc[k]).sum::<Complex64>() + self.m[(n, n)];
        if den.norm() < TAU_DEN {
            return Err(Error::Degenerate(den.norm()));
        }
        let mut out: Vec<Complex64> = (0..n)
            .map(|i| {
                ((0..n).map(|k| self.m[(i, k)] * zc[k]).sum::<Complex64>() + self.m[(i, n)]) / den
            })
            .collect();
        let r2: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        if r2 >= 1.0 {
            if r2 >= 1.0 + TAU_PT {
                return Err(Error::Degenerate(r2));
            }
            // rounding pushed an interior image onto the sphere
            let s = (1.0 - f64::EPSILON) / r2.sqrt();
            out.iter_mut().for_each(|c| *c *= s);
        }
        Ok(BallPoint { coords: out })
    }

    /// Whether `x` lies in `S = AN`. Since `S` acts freely and transitively,
    /// this holds iff `x` coincides with the `AN` element mapping `o` to `x·o`.
    pub fn is_in_s(&self, tol: f64) -> bool {
        let n = self.dim();
        let Ok(s) = s_coordinates_of_point(&self.origin_image()).embed(n) else {
            return false;
        };
        let scale = self.m.iter().map(|v| v.norm()).fold(1.0, f64::max);
        (&self.m - s.matrix())
            .iter()
            .all(|v| v.norm() <= tol * scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupResiduals {
    pub form: f64,
    pub det: f64,
    pub hyperbolic: f64,
}

impl GroupResiduals {
    pub fn max(&self) -> f64 {
        self.form.max(self.det).max(self.hyperbolic)
    }
}

/// The `d` block of `x`.
pub fn d_component(x: &GroupElement) -> Complex64 {
    x.d()
}

/// `|d_{y⁻¹x} − d̄_y d_x (1 − ⟨x·o, y·o⟩)|`.
pub fn cocycle_check(y: &GroupElement, x: &GroupElement) -> f64 {
    let w = x.origin_image();
    let z = y.origin_image();
    let lhs = y.inverse().multiply(x).d();
    let rhs = y.d().conj() * x.d() * (ONE - w.pairing(&z));
    (lhs - rhs).norm()
}

/// `a_t`: `cosh t` at the corners of the first/last coordinates, `sinh t` off-diagonal.
pub fn a_element(n: usize, t: f64) -> GroupElement {
    let mut m = DMatrix::identity(n + 1, n + 1);
    let (s, c) = (Complex64::new(t.sinh(), 0.0), Complex64::new(t.cosh(), 0.0));
    m[(0, 0)] = c;
    m[(n, n)] = c;
    m[(0, n)] = s;
    m[(n, 0)] = s;
    GroupElement { m }
}

/// `n_{ζ,u}` for `ζ ∈ C^{n-1}`, `u ∈ R` (Heisenberg group `N`).
pub fn n_element(n: usize, zeta: &[Complex64], u: f64) -> Result<GroupElement> {
    if zeta.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: zeta.len(),
        });
    }
    let half = 0.5 * zeta.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let iu = I * u;
    let mut m = DMatrix::identity(n + 1, n + 1);
    m[(0, 0)] = ONE - half + iu;
    m[(0, n)] = Complex64::new(half, 0.0) - iu;
    m[(n, 0)] = iu - half;
    m[(n, n)] = ONE + half - iu;
    for (j, z) in zeta.iter().enumerate() {
        let k = j + 1;
        m[(0, k)] = *z;
        m[(n, k)] = *z;
        m[(k, 0)] = -z.conj();
        m[(k, n)] = z.conj();
    }
    Ok(GroupElement { m })
}

/// `u_k = diag(k, conj(det k))` for unitary `k`.
pub fn k_element(k: &DMatrix<Complex64>) -> Result<GroupElement> {
    let n = k.nrows();
    if n == 0 || k.ncols() != n {
        return Err(Error::InvalidGroupElement(
            "k must be a square matrix".into(),
        ));
    }
    let unitary_defect = (k.adjoint() * k - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if unitary_defect > TAU_GRP {
        return Err(Error::InvalidGroupElement(format!(
            "k is not unitary (defect {unitary_defect:e})"
        )));
    }
    let mut m = DMatrix::from_element(n + 1, n + 1, ZERO);
    m.view_mut((0, 0), (n, n)).copy_from(k);
    m[(n, n)] = k.determinant().conj();
    Ok(GroupElement { m })
}

/// Number of coordinates of `S`: one `A` direction and `2n − 1` `N` directions.
pub fn s_dim(n: usize) -> usize {
    2 * n
}

/// Ordered product of one-parameter subgroups of `S`.
///
/// Coordinate order: `tvec[0]` drives `A`, `tvec[1]` the central `u`
/// direction of `N`, then `(Re ζ_j, Im ζ_j)` pairs for `j = 1..n-1`.
pub fn s_from_coords(tvec: &[f64]) -> Result<GroupElement> {
    if tvec.len() < 2 || tvec.len() % 2 != 0 {
        return Err(Error::Domain(format!(
            "S coordinates need an even length >= 2, got {}",
            tvec.len()
        )));
    }
    let n = tvec.len() / 2;
    let zero_zeta = vec![ZERO; n - 1];
    let mut x = a_element(n, tvec[0]).multiply(&n_element(n, &zero_zeta, tvec[1])?);
    for j in 0..n - 1 {
        for (part, unit) in [(tvec[2 + 2 * j], ONE), (tvec[3 + 2 * j], I)] {
            if part != 0.0 {
                let mut zeta = zero_zeta.clone();
                zeta[j] = unit * part;
                x = x.multiply(&n_element(n, &zeta, 0.0)?);
            }
        }
    }
    Ok(x)
}

/// Closed-form `AN` coordinates of the unique `s ∈ S` with `s·o = w`.
///
/// In the Siegel coordinates `ω₁ = (1+w₁)/(1−w₁)`, `ω' = w'/(1−w₁)`, the
/// group `A` acts by `(ω₁, ω') ↦ (e^{2t}ω₁, e^t ω')` and `n_{ζ,u}·o` sits at
/// `(1 + |ζ|² − 2iu, ζ̄)`.
pub fn s_coordinates_of_point(w: &BallPoint) -> SCoordinates {
    let c = w.coords();
    let one_minus = ONE - c[0];
    let omega1 = (ONE + c[0]) / one_minus;
    let omega_rest: Vec<Complex64> = c[1..].iter().map(|v| v / one_minus).collect();
    let h = w.one_minus_norm_sqr() / one_minus.norm_sqr();
    let t = 0.5 * h.ln();
    let et = t.exp();
    SCoordinates {
        t,
        zeta: omega_rest.iter().map(|v| v.conj() / et).collect(),
        u: -0.5 * omega1.im / (et * et),
    }
}

/// The element `s ∈ S` with `s·o = w`.
pub fn s_from_point(w: &BallPoint) -> Result<GroupElement> {
    let n = w.dim();
    let s = s_coordinates_of_point(w).embed(n)?;
    if s.origin_image().distance(w) <= TAU_PT {
        return Ok(s);
    }
    newton_s_from_point(w)
}

/// Newton iteration on `act(s_from_coords(tvec), o) = w` with a
/// finite-difference Jacobian.
fn newton_s_from_point(w: &BallPoint) -> Result<GroupElement> {
    let n = w.dim();
    let dim = s_dim(n);
    let residual = |tv: &[f64]| -> Result<Vec<f64>> {
        let p = s_from_coords(tv)?.origin_image();
        Ok(p.coords()
            .iter()
            .zip(w.coords())
            .flat_map(|(a, b)| [(a - b).re, (a - b).im])
            .collect())
    };
    let mut tv = vec![0.0; dim];
    for _ in 0..100 {
        let r = residual(&tv)?;
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 0.1 * TAU_PT {
            return s_from_coords(&tv);
        }
        let h = 1e-7;
        let mut jac = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for k in 0..dim {
            let mut tp = tv.clone();
            tp[k] += h;
            let rp = residual(&tp)?;
            for i in 0..dim {
                jac[(i, k)] = (rp[i] - r[i]) / h;
            }
        }
        let rhs = nalgebra::DVector::from_vec(r.iter().map(|v| -v).collect());
        let step = jac.lu().solve(&rhs).ok_or_else(|| {
            Error::ConvergenceFailure("singular Jacobian in S-coordinate solve".into())
        })?;
        // damped update keeps the iterate in a sane range
        let mut lambda = 1.0;
        loop {
            let cand: Vec<f64> = tv
                .iter()
                .zip(step.iter())
                .map(|(a, b)| a + lambda * b)
                .collect();
            let rn = residual(&cand)?.iter().map(|v| v * v).sum::<f64>().sqrt();
            if rn < norm || lambda < 1e-6 {
                tv = cand;
                break;
            }
            lambda *= 0.5;
        }
    }
    let s = s_from_coords(&tv)?;
    let err = s.origin_image().distance(w);
    if err <= TAU_PT {
        Ok(s)
    } else {
        Err(Error::ConvergenceFailure(format!(
            "s_from_point residual {err:e} > {TAU_PT:e}"
        )))
    }
}
