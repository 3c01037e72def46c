//! Finite combinations of monomials and kernel atoms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multi_index::MultiIndex;
use crate::error::{Error, Result};
use crate::group::{pairing, BallPoint};

/// `c · (1 − ⟨z, w⟩)^{−s}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomTerm {
    pub coeff: Complex64,
    pub center: BallPoint,
    pub exponent: f64,
}

impl AtomTerm {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.coeff
            * principal_inv_power(
                Complex64::new(1.0, 0.0) - pairing(z, self.center.coords()),
                self.exponent,
            )
    }

    fn same_key(&self, other: &AtomTerm) -> bool {
        self.exponent.to_bits() == other.exponent.to_bits() && self.center == other.center
    }
}

/// `u^{−s}` on the principal branch.
#[inline]
pub fn principal_inv_power(u: Complex64, s: f64) -> Complex64 {
    if s == s.round() && s.abs() <= 64.0 {
        u.powi(-(s as i32))
    } else {
        (-s * u.ln()).exp()
    }
}

/// A holomorphic function on the ball given by finitely many monomial terms
/// `c_γ z^γ` and atom terms `c (1 − ⟨z, w⟩)^{−s}`.
///
/// Monomial terms with the same multi-index are merged; atom terms are merged
/// only when center and exponent agree bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoloFunction {
    n: usize,
    monomials: BTreeMap<MultiIndex, Complex64>,
    atoms: Vec<AtomTerm>,
}

impl HoloFunction {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            monomials: BTreeMap::new(),
            atoms: Vec::new(),
        }
    }

    /// The constant function `ψ = 1`.
    pub fn one(n: usize) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), MultiIndex::zero(n))
    }

    pub fn monomial(coeff: Complex64, gamma: MultiIndex) -> Self {
        let mut f = Self::zero(gamma.dim());
        f.add_monomial(coeff, gamma);
        f
    }

    /// The atom `(1 − ⟨z, w⟩)^{−s}`.
    pub fn atom(center: BallPoint, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) {
            return Err(Error::Domain(format!(
                "atom exponent must be positive, got {exponent}"
            )));
        }
        let mut f = Self::zero(center.dim());
        f.atoms.push(AtomTerm {
            coeff: Complex64::new(1.0, 0.0),
            center,
            exponent,
        });
        Ok(f)
    }

    pub fn from_monomials<I: IntoIterator<Item = (Complex64, MultiIndex)>>(
        n: usize,
        terms: I,
    ) -> Self {
        let mut f = Self::zero(n);
        for (c, g) in terms {
            f.add_monomial(c, g);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add_monomial(&mut self, coeff: Complex64, gamma: MultiIndex) {
        assert_eq!(
            gamma.dim(),
            self.n,
            "multi-index length must match the dimension"
        );
        *self
            .monomials
            .entry(gamma)
            .or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn add_atom(&mut self, term: AtomTerm) {
        assert_eq!(
            term.center.dim(),
            self.n,
            "atom center dimension must match"
        );
        match self.atoms.iter_mut().find(|a| a.same_key(&term)) {
            Some(a) => a.coeff += term.coeff,
            None => self.atoms.push(term),
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.monomials.iter()
    }

    pub fn atoms(&self) -> &[AtomTerm] {
        &self.atoms
    }

    pub fn is_polynomial(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| a.coeff == Complex64::new(0.0, 0.0))
            && self
                .monomials
                .values()
                .all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Largest monomial degree with a nonzero coefficient (atoms ignored).
    pub fn polynomial_degree(&self) -> u32 {
        self.monomials
            .iter()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(g, _)| g.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mono: Complex64 = self
            .monomials
            .iter()
            .map(|(g, c)| c * monomial_value(g, z))
            .sum();
        let atoms: Complex64 = self.atoms.iter().map(|a| a.eval(z)).sum();
        mono + atoms
    }

    pub fn eval_at(&self, z: &BallPoint) -> Complex64 {
        self.eval(z.coords())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut f = self.clone();
        f.monomials.values_mut().for_each(|c| *c *= s);
        f.atoms.iter_mut().for_each(|a| a.coeff *= s);
        f
    }

    pub fn add(&self, other: &HoloFunction) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in HoloFunction::add");
        let mut f = self.clone();
        for (g, c) in &other.monomials {
            f.add_monomial(*c, g.clone());
        }
        for a in &other.atoms {
            f.add_atom(a.clone());
        }
        f
    }

    pub fn sub(&self, other: &HoloFunction) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Product of the monomial parts, dropping terms of degree above `max_degree`.
    pub fn mul_truncated(&self, other: &HoloFunction, max_degree: u32) -> Self {
        debug_assert!(self.is_polynomial() && other.is_polynomial());
        let mut f = Self::zero(self.n);
        for (g1, c1) in &self.monomials {
            let d1 = g1.degree();
            if d1 > max_degree {
                continue;
            }
            for (g2, c2) in &other.monomials {
                if d1 + g2.degree() <= max_degree {
                    f.add_monomial(c1 * c2, g1.add(g2));
                }
            }
        }
        f
    }

    /// Homogeneous part of degree `k` of the monomial terms.
    pub fn monomial_part_of_degree(&self, k: u32) -> Self {
        Self::from_monomials(
            self.n,
            self.monomials
                .iter()
                .filter(|(g, _)| g.degree() == k)
                .map(|(g, c)| (*c, g.clone())),
        )
    }
}

/// `z^γ`
pub fn monomial_value(gamma: &MultiIndex, z: &[Complex64]) -> Complex64 {
    gamma
        .entries()
        .iter()
        .zip(z)
        .fold(Complex64::new(1.0, 0.0), |acc, (&g, zk)| {
            if g == 0 {
                acc
            } else {
                acc * zk.powu(g)
            }
        })
}
