//! Numerical building blocks shared by the analytic modules.

pub mod gamma;
pub mod jacobi;
pub mod sum;
