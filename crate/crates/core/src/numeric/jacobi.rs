//! Gauss–Jacobi rules on `[0, 1]` via the Golub–Welsch eigenvalue method.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes and weights of an `m`-point Gauss rule for the weight
/// `(1 - t)^a t^b` on `[0, 1]`. Weights are normalised to sum to one, so the
/// rule integrates against the corresponding Beta probability measure and is
/// exact for polynomials of degree `2m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobi {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl GaussJacobi {
    pub fn new(m: usize, a: f64, b: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain(
                "Gauss–Jacobi rule needs at least one node".into(),
            ));
        }
        if a <= -1.0 || b <= -1.0 {
            return Err(Error::Domain(format!(
                "Jacobi exponents must exceed -1 (a = {a}, b = {b})"
            )));
        }
        // Recurrence of the monic Jacobi polynomials on [-1, 1] with weight
        // (1-x)^a (1+x)^b; t = (1+x)/2 maps onto the [0, 1] weight.
        let (al, be) = (a, b);
        let ab = al + be;
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m.saturating_sub(1)];
        for (k, d) in diag.iter_mut().enumerate() {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            *d = if k == 0 {
                (be - al) / (ab + 2.0)
            } else {
                (be * be - al * al) / (s * (s + 2.0))
            };
        }
        for (i, o) in off.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            let s = 2.0 * k + ab;
            let beta_k = if i == 0 {
                // k = 1 written without the removable 0/0 at a + b = -1
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
            } else {
                4.0 * k * (k + al) * (k + be) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            *o = beta_k.sqrt();
        }
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            jac[(i, i)] = diag[i];
            if i + 1 < m {
                jac[(i, i + 1)] = off[i];
                jac[(i + 1, i)] = off[i];
            }
        }
        let eig = SymmetricEigen::new(jac);
        let mut pairs: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let x = eig.eigenvalues[i];
                let v0 = eig.eigenvectors[(0, i)];
                (0.5 * (1.0 + x), v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
            a,
            b,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` against the normalised weight.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        crate::numeric::sum::compensated_sum(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(&t, &w)| w * f(t)),
        )
    }
}

/// Gauss–Legendre on `[lo, hi]` with unnormalised weights (summing to `hi - lo`).
pub fn gauss_legendre(m: usize, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = GaussJacobi::new(m, 0.0, 0.0)?;
    let h = hi - lo;
    Ok((
        rule.nodes.iter().map(|t| lo + h * t).collect(),
        rule.weights.iter().map(|w| w * h).collect(),
    ))
}
