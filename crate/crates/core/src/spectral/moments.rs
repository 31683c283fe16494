//! Monte Carlo fractional moments `E|G(x, y; E + iε)|^s` and their decay.
//!
//! On the discretized continuum the coupling sites `x`, `y` are integer
//! points; the entry is replaced by the largest `|G(i, j)|` over grid
//! points `i`, `j` in the supports of the bumps at `y` and `x`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BumpProfile, CubeSpec, ModelSpec, Site};
use crate::numeric::{fit_line, normal_critical, CompensatedSum};
use crate::seeding::derive_trial_seed;
use crate::spectral::green::ShiftedFactor;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalMoments {
    pub s: f64,
    pub energy: f64,
    pub eps: f64,
    pub trials: usize,
    /// Euclidean separations `|x - y|`.
    pub separations: Vec<f64>,
    pub means: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    /// Least-squares slope of `ln(mean)` against separation.
    pub decay_slope: Option<f64>,
    pub decay_intercept: Option<f64>,
    pub r_squared: Option<f64>,
    /// Trials whose solve failed the residual bound.
    pub excluded: usize,
}

/// Grid indices carrying the coupling at `site`.
pub fn support_indices(model: &ModelSpec, site: &Site) -> Result<Vec<usize>> {
    match &model.cube {
        CubeSpec::Lattice(c) => c
            .index_of(site)
            .map(|i| vec![i])
            .ok_or_else(|| Error::Config(format!("site {site:?} lies outside the cube"))),
        CubeSpec::Continuum(b) => {
            let d = b.dimension;
            let m = b.points_per_axis();
            let mut axes: Vec<Vec<usize>> = Vec::with_capacity(d);
            for j in 0..d {
                let (lo, hi) = b.integer_range(j);
                if site[j] < lo || site[j] > hi {
                    return Err(Error::Config(format!("point {site:?} lies outside the box")));
                }
                let n = site[j] as f64;
                let ks: Vec<usize> = (0..m)
                    .filter(|&k| {
                        let t = b.grid_coordinate(j, k) - n;
                        match model.bump {
                            BumpProfile::Indicator => t > -0.5 && t <= 0.5,
                            BumpProfile::Tent => t.abs() < 1.0,
                        }
                    })
                    .collect();
                axes.push(ks);
            }
            let mut out = vec![0usize];
            for (j, ks) in axes.iter().enumerate() {
                let stride = b.grid_stride(j);
                out = out
                    .iter()
                    .flat_map(|&base| ks.iter().map(move |&k| base + k * stride))
                    .collect();
            }
            out.sort_unstable();
            Ok(out)
        }
    }
}

fn distance(x: &Site, y: &Site) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| ((a - b) as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

// One realization: |G|^s (or the support-max proxy) for every target.
fn trial_moments(
    model: &ModelSpec,
    seed: u64,
    x_support: &[usize],
    y_supports: &[Vec<usize>],
    z: Complex64,
    s: f64,
) -> Result<Vec<f64>> {
    let real = model.realize(seed)?;
    let factor = ShiftedFactor::new(&real.hamiltonian, z)?;
    let mut best = vec![0.0f64; y_supports.len()];
    for &xi in x_support {
        let (col, _) = factor.column(xi)?;
        for (b, ys) in best.iter_mut().zip(y_supports) {
            for &yi in ys {
                *b = b.max(col[yi].norm());
            }
        }
    }
    Ok(best.into_iter().map(|g| g.powf(s)).collect())
}

/// Mean of `|G(x, y)|^s` over `trials` realizations for each target `y`,
/// with normal confidence intervals and a log-linear decay fit.
#[allow(clippy::too_many_arguments)]
pub fn fractional_moment_estimate(
    model: &ModelSpec,
    x: Site,
    ys: &[Site],
    energy: f64,
    eps: f64,
    s: f64,
    trials: usize,
    master_seed: u64,
    ci_level: f64,
) -> Result<FractionalMoments> {
    if trials == 0 {
        return Err(Error::EmptyEnsemble("fractional moment needs trials >= 1".into()));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Config(format!("s must lie in (0, 1), got {s}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let x_support = support_indices(model, &x)?;
    let y_supports = ys
        .iter()
        .map(|y| support_indices(model, y))
        .collect::<Result<Vec<_>>>()?;
    let z = Complex64::new(energy, eps);

    let per_trial: Vec<Option<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_trial_seed(master_seed, t as u64);
            match trial_moments(model, seed, &x_support, &y_supports, z, s) {
                Ok(v) => Ok(Some(v)),
                Err(Error::Numerical { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let kept: Vec<&Vec<f64>> = per_trial.iter().flatten().collect();
    let excluded = trials - kept.len();
    if kept.is_empty() {
        return Err(Error::EmptyEnsemble("every resolvent solve failed".into()));
    }
    let n = kept.len() as f64;
    let z_crit = normal_critical(ci_level);
    let mut means = Vec::with_capacity(ys.len());
    let mut ci_low = Vec::with_capacity(ys.len());
    let mut ci_high = Vec::with_capacity(ys.len());
    for j in 0..ys.len() {
        let mean = kept.iter().map(|v| v[j]).collect::<CompensatedSum>().value() / n;
        let ss = kept
            .iter()
            .map(|v| (v[j] - mean).powi(2))
            .collect::<CompensatedSum>()
            .value();
        let se = if kept.len() > 1 { (ss / (n - 1.0) / n).sqrt() } else { 0.0 };
        means.push(mean);
        ci_low.push(mean - z_crit * se);
        ci_high.push(mean + z_crit * se);
    }
    let separations: Vec<f64> = ys.iter().map(|y| distance(&x, y)).collect();
    let logs: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let fit = if logs.iter().all(|l| l.is_finite()) {
        fit_line(&separations, &logs)
    } else {
        None
    };
    Ok(FractionalMoments {
        s,
        energy,
        eps,
        trials,
        separations,
        means,
        ci_low,
        ci_high,
        decay_slope: fit.map(|f| f.slope),
        decay_intercept: fit.map(|f| f.intercept),
        r_squared: fit.map(|f| f.r_squared),
        excluded,
    })
}
