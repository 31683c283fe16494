//! Ensemble statistics: density of states, Wegner/Minami/decorrelation
//! estimates, Poisson and independence tests.

pub mod dos;
pub mod estimates;
pub mod independence;
pub mod poisson;
pub mod report;
pub mod sample;

pub use dos::{dos_from_counts, dos_profile, estimate_dos, trial_counts, DosEstimate};
pub use estimates::{decorrelation_check, garwood_interval, minami_check, wegner_check};
pub use independence::{
    chi_square_independence, default_t_grid, empirical_cf_factorization, independence_test, pearson,
    CfFactorization, CfOptions, ContingencyTest, Correlation,
};
pub use poisson::{
    chi_square_poisson, kolmogorov_sf, ks_exponential, ks_gap_test, poisson_test, pooled_poisson_bins,
    theoretical_poisson_cf, CountBin, PoissonInput,
};
pub use report::{non_increasing_up_to_overlap, Provenance, SeriesPoint, TestReport, Thresholds, Verdict};
pub use sample::{EnsembleSample, SampleMeta, TrialRecord};
