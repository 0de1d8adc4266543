//! Empirical side: gaussian tensors and Bombieri–Weyl systems, exact (n = 2)
//! and homotopy (n ≥ 3) counting of real eigenpair classes, and the count
//! histograms of the sampling experiment.

mod experiment;
mod homotopy;
mod poly;
mod sturm;

pub use experiment::{
    bw_variance_test, chi_square_two_sample, run_experiment, run_experiment_with, BwVarianceReport,
    ChiSquare, CountHistogram, ExperimentConfig, ExperimentResult, HomotopySummary, SystemSource,
};
pub use homotopy::{
    count_classes_homotopy, count_classes_homotopy_retrying, Eigenclass, HomotopyConfig,
    HomotopyDiagnostics, HomotopyOutcome,
};
pub use poly::{
    contract, monomials, multinomial, sample_bw_system, sample_bw_system_from,
    sample_gaussian_tensor, GaussianTensor, PolySystem,
};
pub use sturm::{binary_form, count_classes_n2, sturm_count};
