//! Density of states from eigenvalue counts in a small energy bin.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::numeric::{mean_var, normal_critical};
use crate::seeding::derive_trial_seed;
use crate::spectral::{count_in, count_leq};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosEstimate {
    pub energy: f64,
    pub bin: f64,
    pub value: f64,
    pub ci: (f64, f64),
    pub std_err: f64,
    /// Half-width contributed by the integer resolution `1/(V·bin)` of a
    /// single count.
    pub resolution: f64,
    pub trials: usize,
    pub volume: f64,
}

/// Aggregates per-trial counts in `(E - bin/2, E + bin/2]` into `n̂(E)`.
///
/// The interval adds one unit of count resolution to the sampling error,
/// so deterministic (`W = 0`) ensembles still get an honest width.
pub fn dos_from_counts(energy: f64, bin: f64, volume: f64, counts: &[u32], ci_level: f64) -> Result<DosEstimate> {
    if counts.is_empty() {
        return Err(Error::EmptyEnsemble("no trials for the density of states".into()));
    }
    if !(bin > 0.0) || !(volume > 0.0) {
        return Err(Error::Config(format!("bin {bin} and volume {volume} must be positive")));
    }
    let scale = volume * bin;
    let xs: Vec<f64> = counts.iter().map(|&c| c as f64 / scale).collect();
    let (value, var) = mean_var(&xs);
    let std_err = (var / xs.len() as f64).sqrt();
    let resolution = 1.0 / scale;
    let half = normal_critical(ci_level) * std_err + resolution;
    Ok(DosEstimate {
        energy,
        bin,
        value,
        ci: (value - half, value + half),
        std_err,
        resolution,
        trials: counts.len(),
        volume,
    })
}

/// Per-trial eigenvalue counts of the global operator in `(lo, hi]`.
pub fn trial_counts(model: &ModelSpec, lo: f64, hi: f64, trials: usize, master_seed: u64) -> Result<Vec<u32>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let real = model.realize(derive_trial_seed(master_seed, t as u64))?;
            Ok(count_in(&real.hamiltonian, lo, hi)? as u32)
        })
        .collect()
}

/// Monte-Carlo estimate of `n(E)` over `trials` realizations.
pub fn estimate_dos(
    model: &ModelSpec,
    energy: f64,
    bin: f64,
    trials: usize,
    master_seed: u64,
    ci_level: f64,
) -> Result<DosEstimate> {
    if trials == 0 {
        return Err(Error::EmptyEnsemble("trials = 0".into()));
    }
    let counts = trial_counts(model, energy - 0.5 * bin, energy + 0.5 * bin, trials, master_seed)?;
    dos_from_counts(energy, bin, model.cube.volume(), &counts, ci_level)
}

/// Histogram of `n̂` over equal bins covering `(lo, hi]`, as
/// `(center, n̂)` pairs.
pub fn dos_profile(
    model: &ModelSpec,
    lo: f64,
    hi: f64,
    bins: usize,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::Interval { a: lo, b: hi });
    }
    if trials == 0 {
        return Err(Error::EmptyEnsemble("trials = 0".into()));
    }
    let width = (hi - lo) / bins as f64;
    let volume = model.cube.volume();
    let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
    let per_trial: Vec<Vec<usize>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let real = model.realize(derive_trial_seed(master_seed, t as u64))?;
            let below: Vec<usize> = edges.iter().map(|&e| count_leq(&real.hamiltonian, e)).collect();
            Ok(below.windows(2).map(|w| w[1] - w[0]).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..bins)
        .map(|k| {
            let total: usize = per_trial.iter().map(|c| c[k]).sum();
            let center = lo + width * (k as f64 + 0.5);
            (center, total as f64 / (trials as f64 * volume * width))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DisorderSpec, LatticeCube};

    #[test]
    fn counts_aggregate() {
        let est = dos_from_counts(0.0, 0.5, 100.0, &[10, 12, 14], 0.95).unwrap();
        assert!((est.value - 12.0 / 50.0).abs() < 1e-12);
        assert!(est.ci.0 < est.value && est.value < est.ci.1);
        assert!(dos_from_counts(0.0, 0.5, 100.0, &[], 0.95).is_err());
    }

    #[test]
    fn free_chain_profile_has_unit_mass() {
        let model = ModelSpec::lattice(
            LatticeCube::with_side(1, 64).unwrap(),
            DisorderSpec::uniform(0.0).unwrap(),
        );
        let prof = dos_profile(&model, -2.5, 2.5, 20, 1, 0).unwrap();
        let mass: f64 = prof.iter().map(|&(_, n)| n * 0.25).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }
}
