//! Special functions used by the closed-form oracles and the statistics kit.
//!
//! Accuracy target on 1e-6 ≤ z ≤ 700 and |p| ≤ 50: relative 1e-10,
//! absolute 1e-12 (see [`AccuracyContract`]).

pub mod bessel;
pub mod complex;
pub mod gamma;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_ik_pair, bessel_j, bessel_jy_pair, bessel_j_zero, bessel_k, bessel_k_scaled, bessel_y,
    IkPair, JyPair, Scaled,
};
pub use complex::{hyp0f1_ratio, k_ratio};
pub use gamma::{erf, erfc, gamma_fn, ln_gamma, reg_inc_gamma_lower, reg_inc_gamma_upper};

/// Tolerances promised by every function in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyContract {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub max_order: f64,
}

impl Default for AccuracyContract {
    fn default() -> Self {
        AccuracyContract {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            z_min: 1e-6,
            z_max: 700.0,
            max_order: 50.0,
        }
    }
}
