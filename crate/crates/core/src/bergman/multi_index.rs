use serde::{Deserialize, Serialize};

use crate::numeric::gamma::ln_factorial;

/// A multi-index `γ ∈ Z₊ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `γ = k e_j`
    pub fn unit(n: usize, j: usize, k: u32) -> Self {
        let mut v = vec![0; n];
        v[j] = k;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|γ| = γ₁ + … + γ_n`
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `ln γ! = Σ ln γ_k!`
    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&g| ln_factorial(g)).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// All multi-indices of length `n` with `|γ| = k`, in lexicographically
/// decreasing order of the leading entries.
pub fn indices_of_degree(n: usize, k: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if n == 1 {
            prefix.push(k);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(n - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, k, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// All multi-indices with `|γ| ≤ k_max`, grouped by increasing degree.
pub fn indices_up_to(n: usize, k_max: u32) -> Vec<MultiIndex> {
    (0..=k_max).flat_map(|k| indices_of_degree(n, k)).collect()
}

/// `dim P_k = C(k+n-1, k)`, the number of monomials of degree `k` in `n` variables.
pub fn dim_pk(n: usize, k: u32) -> u64 {
    assert!(n >= 1, "dim_pk needs n >= 1");
    let mut r: u64 = 1;
    // C(k+n-1, n-1) built incrementally stays integral at every step
    for j in 1..n as u64 {
        r = r * (u64::from(k) + j) / j;
    }
    debug_assert!((r as f64) <= (1.0 + f64::from(k)).powi(n as i32));
    r
}
