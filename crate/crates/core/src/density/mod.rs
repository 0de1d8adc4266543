//! The λ-density route: the kernel F_{n,d}, the eigenpair density J(e₁, λ),
//! the absolute-determinant moment, and quadrature over λ ~ N(0, 1).

mod kernel;
mod montecarlo;
mod quadrature;

pub use kernel::{expected_abs_det, f_density, j_density, ln_expected_abs_det, ln_f_density};
pub use montecarlo::{mc_abs_det, EstimateWithError};
pub use quadrature::{
    adaptive_simpson, expected_count_quadrature, gauss_hermite, normal_expectation,
    QuadratureConfig, Scheme,
};
