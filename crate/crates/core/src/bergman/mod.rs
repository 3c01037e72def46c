//! Weighted Bergman spaces `A²_α` on the unit ball of `Cⁿ`.

pub mod holo;
pub mod multi_index;
pub mod norms;
pub mod quadrature;

pub use holo::{AtomTerm, HoloFunction};
pub use multi_index::{dim_pk, indices_of_degree, indices_up_to, MultiIndex};
pub use norms::{
    homogeneous_parts, inner_product_exact, kernel_eval, kernel_partial_sum, monomial_norm,
    norm_exact, phi_gamma_eval, polynomial_norm_sqr, smooth_decay_check, sphere_kernel_hk,
    sphere_monomial_norm, sphere_to_bergman_norm_factor, DecayReport,
};
pub use quadrature::{
    ball_quadrature, ball_quadrature_for_degree, group_norm_equiv_check, lp_alpha_norm,
    monomial_moment_error, reproduce_check, QuadratureRule,
};
