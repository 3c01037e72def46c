//! Weighted Bergman spaces on the complex unit ball as coorbit spaces of the
//! holomorphic discrete series of SU(n,1): group action, reproducing kernels,
//! wavelet transforms, lattices in `S = AN`, frames and atomic decompositions.

pub mod bergman;
pub mod error;
pub mod frames;
pub mod group;
pub mod numeric;
pub mod representation;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
