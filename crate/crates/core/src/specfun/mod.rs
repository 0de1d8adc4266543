//! Special functions: gamma, incomplete gamma and beta, error function and
//! the a = 1 Gauss hypergeometric function.
//!
//! All functions are pure.

mod beta;
mod erf;
mod gamma;
mod hypergeom;

pub use beta::{
    binomial_complement_sum, binomial_power_sum, complete_beta, incomplete_beta,
    incomplete_beta_half_p, incomplete_beta_half_q, incomplete_beta_integer_q, ln_beta,
    ln_incomplete_beta, regularized_incomplete_beta, BinomialSum,
};
pub use erf::{erf, erfc};
pub use gamma::{
    gamma, ln_gamma, ln_regularized_lower, ln_regularized_upper, lower_incomplete_gamma,
    regularized_lower, regularized_upper, upper_incomplete_gamma, GAMMA_MAX_ARG,
};
pub use hypergeom::{
    family_2f1, family_of, gauss_2f1_series, gauss_2f1_unit, EvalPath, Family, FamilyValue,
    CANCELLATION_LIMIT,
};

/// A function value with an advisory absolute error estimate (last series
/// term or continued-fraction tail).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub abs_error_bound: f64,
}

impl SpecialValue {
    pub fn new(value: f64, abs_error_bound: f64) -> Self {
        SpecialValue {
            value,
            abs_error_bound: abs_error_bound.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        SpecialValue {
            value,
            abs_error_bound: 0.0,
        }
    }
}
