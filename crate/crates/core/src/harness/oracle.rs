//! Randomized comparison of the inertia engine against the dense oracle.

use rand_core::RngCore;
use rayon::prelude::*;

use crate::error::Result;
use crate::model::{build_lattice_hamiltonian, sample_potential, CubeSpec, DisorderSpec, LatticeCube};
use crate::seeding::{derive_trial_seed, trial_rng, uniform01};
use crate::spectral::{count_in, dense_spectrum, eigenvalues_in};
use crate::stats::{TestReport, Thresholds, Verdict};

/// Outcome of one random instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleInstance {
    pub dimension: usize,
    pub size: usize,
    pub intervals: usize,
    pub count_mismatches: usize,
    pub max_eigenvalue_error: f64,
}

/// Draws a 1D (even index) or 2D (odd index) Anderson instance with at most
/// `max_size` sites and compares counts and eigenvalues on three random
/// intervals.
pub fn oracle_instance(seed: u64, index: u64, max_size: usize) -> Result<OracleInstance> {
    let mut rng = trial_rng(seed);
    let dimension = if index % 2 == 0 { 1 } else { 2 };
    let max_side = match dimension {
        1 => max_size.max(2),
        _ => ((max_size as f64).sqrt().floor() as usize).max(2),
    };
    let side = 2 + (rng.next_u64() % (max_side as u64 - 1)) as usize;
    let w = 8.0 * uniform01(&mut rng);
    let cube = LatticeCube::with_side(dimension, side)?;
    let disorder = DisorderSpec::uniform(w)?;
    let potential = sample_potential(&disorder, &CubeSpec::Lattice(cube), rng.next_u64())?;
    let h = build_lattice_hamiltonian(&cube, &potential)?;
    let spectrum = dense_spectrum(&h)?;
    let (lo, hi) = h.gershgorin();
    let mut mismatches = 0;
    let mut max_err: f64 = 0.0;
    let intervals = 3;
    for _ in 0..intervals {
        let x = lo - 0.5 + (hi - lo + 1.0) * uniform01(&mut rng);
        let y = lo - 0.5 + (hi - lo + 1.0) * uniform01(&mut rng);
        let (a, b) = (x.min(y), x.max(y));
        let expected: Vec<f64> = spectrum.iter().copied().filter(|&l| l > a && l <= b).collect();
        if count_in(&h, a, b)? != expected.len() {
            mismatches += 1;
        }
        let got = eigenvalues_in(&h, a, b, 1e-12)?;
        if got.len() != expected.len() {
            mismatches += 1;
        } else {
            for (g, e) in got.iter().zip(&expected) {
                max_err = max_err.max((g - e).abs());
            }
        }
    }
    Ok(OracleInstance {
        dimension,
        size: h.size(),
        intervals,
        count_mismatches: mismatches,
        max_eigenvalue_error: max_err,
    })
}

/// Runs `instances` random comparisons; PASS when every count agrees and
/// every eigenvalue is within `tolerance`.
pub fn oracle_check(
    instances: usize,
    master_seed: u64,
    max_size: usize,
    tolerance: f64,
    thresholds: &Thresholds,
) -> Result<TestReport> {
    let results: Vec<OracleInstance> = (0..instances as u64)
        .into_par_iter()
        .map(|i| oracle_instance(derive_trial_seed(master_seed, i), i, max_size))
        .collect::<Result<_>>()?;
    let mismatches: usize = results.iter().map(|r| r.count_mismatches).sum();
    let max_err = results.iter().map(|r| r.max_eigenvalue_error).fold(0.0, f64::max);
    let largest = results.iter().map(|r| r.size).max().unwrap_or(0);
    let mut report = TestReport::new("oracle", *thresholds);
    report.sample_size = instances;
    report.statistic = Some(max_err);
    report.metric("instances", instances as f64);
    report.metric("instances_2d", results.iter().filter(|r| r.dimension == 2).count() as f64);
    report.metric("count_mismatches", mismatches as f64);
    report.metric("max_eigenvalue_error", max_err);
    report.metric("tolerance", tolerance);
    report.metric("largest_size", largest as f64);
    report.verdict = Verdict::from_bool(instances > 0 && mismatches == 0 && max_err <= tolerance);
    Ok(report)
}
