//! The holomorphic discrete series `π_σ` of SU(n,1) on `A²_{σ−n−1}`, its
//! wavelet transforms, the reproducing convolution and the integral operator
//! controlling boundedness on `L^p_t`.

pub mod action;
pub mod convolution;
pub mod wavelet;
pub mod zhu;

pub use action::{
    pi_apply, pi_apply_atom, pi_apply_pointwise, pi_transport_monomial, RepParams, Transported,
    DEFAULT_TRUNCATION,
};
pub use convolution::{
    convolve_on_ball, fit_constant, reproducing_constant, reproducing_constant_closed_form,
    reproducing_convolutions, ReproducingFit,
};
pub use wavelet::{
    abs_wavelet_psi, coorbit_norm, log_envelope_check, lp_membership, lp_membership_empirical,
    membership_exponent, wavelet, wavelet_psi, MembershipSweep,
};
pub use zhu::{
    zhu_bounded, zhu_radial_ratio, zhu_radial_sweep, zhu_s_apply, SphereAverage, ZhuParams,
};
