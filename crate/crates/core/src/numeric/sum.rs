//! Compensated and partition-independent summation.
//!
//! Parallel reductions split the input into fixed-size chunks, sum each chunk
//! with Neumaier compensation, then fold the chunk partials in order. The
//! chunk boundaries do not depend on the worker count, so results are
//! bit-identical for any thread pool size.

use num_complex::Complex64;
use rayon::prelude::*;

/// Fixed chunk length for parallel reductions.
pub const CHUNK: usize = 4096;

/// Neumaier (improved Kahan–Babuška) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Complex accumulator: independent compensation of real and imaginary parts.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

pub fn compensated_sum_complex<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    iter.into_iter().collect::<ComplexSum>().value()
}

/// Deterministic parallel `Σ_i f(i)` over `0..len`.
pub fn par_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| compensated_sum((c * CHUNK..((c + 1) * CHUNK).min(len)).map(&f)))
        .collect();
    compensated_sum(partials)
}

/// Deterministic parallel complex `Σ_i f(i)` over `0..len`.
pub fn par_sum_complex<F>(len: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let partials: Vec<Complex64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| compensated_sum_complex((c * CHUNK..((c + 1) * CHUNK).min(len)).map(&f)))
        .collect();
    compensated_sum_complex(partials)
}

/// Deterministic parallel sum of vector-valued terms: `f(i, buf)` writes the
/// `width` entries of term `i` into `buf`, and every entry is reduced as in
/// [`par_sum_complex`].
pub fn par_sum_complex_vec<F>(len: usize, width: usize, f: F) -> Vec<Complex64>
where
    F: Fn(usize, &mut [Complex64]) + Sync,
{
    let partials: Vec<Vec<Complex64>> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![ComplexSum::new(); width];
            let mut buf = vec![Complex64::new(0.0, 0.0); width];
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                f(i, &mut buf);
                acc.iter_mut().zip(&buf).for_each(|(a, v)| a.add(*v));
            }
            acc.iter().map(ComplexSum::value).collect()
        })
        .collect();
    (0..width)
        .map(|k| compensated_sum_complex(partials.iter().map(|p| p[k])))
        .collect()
}
