//! Eigenvalue counting, location, the dense oracle, and resolvent probes.

pub mod bisect;
pub mod dense;
pub mod green;
pub mod inertia;
pub mod moments;

pub use bisect::{count_in, default_tolerance, eigenvalues_in, kth_eigenvalue, next_eigenvalue_above};
pub use dense::{dense_spectrum, dense_spectrum_capped, DEFAULT_ORACLE_CAP};
pub use green::{green_entry, green_entry_with_residual, ShiftedFactor};
pub use inertia::{count_leq, count_leq_report, sturm_count, InertiaCount};
pub use moments::{fractional_moment_estimate, support_indices, FractionalMoments};
