//! The single-site law μ of the i.i.d. couplings and potential sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::cube::CubeSpec;
use crate::seeding::{trial_rng, uniform01};

/// Distribution family of the couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DisorderFamily {
    /// Uniform on `[-W/2, W/2]`.
    Uniform { strength: f64 },
    /// Piecewise-linear density through equally spaced nodes on `[lo, hi]`.
    Tabulated { lo: f64, hi: f64, density: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    #[serde(flatten)]
    pub family: DisorderFamily,
    /// Free-form description of the density for reports.
    #[serde(default)]
    pub description: String,
}

impl DisorderSpec {
    pub fn uniform(strength: f64) -> Result<Self> {
        let spec = Self {
            family: DisorderFamily::Uniform { strength },
            description: format!("uniform on [{}, {}]", -strength / 2.0, strength / 2.0),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tabulated(lo: f64, hi: f64, density: Vec<f64>) -> Result<Self> {
        let spec = Self {
            family: DisorderFamily::Tabulated { lo, hi, density },
            description: format!("tabulated density on [{lo}, {hi}]"),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Width of the support; this is `W` for the uniform family. Zero
    /// strength is accepted and yields the disorder-free operator.
    pub fn strength(&self) -> f64 {
        match &self.family {
            DisorderFamily::Uniform { strength } => *strength,
            DisorderFamily::Tabulated { lo, hi, .. } => hi - lo,
        }
    }

    /// Support `[lo, hi]` of the single-site law.
    pub fn support(&self) -> (f64, f64) {
        match &self.family {
            DisorderFamily::Uniform { strength } => (-strength / 2.0, strength / 2.0),
            DisorderFamily::Tabulated { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            DisorderFamily::Uniform { strength } => {
                if !(*strength >= 0.0) || !strength.is_finite() {
                    return Err(Error::Config(format!(
                        "disorder strength must be finite and nonnegative, got {strength}"
                    )));
                }
            }
            DisorderFamily::Tabulated { lo, hi, density } => {
                if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::Config(format!("empty density support [{lo}, {hi}]")));
                }
                if density.len() < 2 {
                    return Err(Error::Config("tabulated density needs at least two nodes".into()));
                }
                if density.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                    return Err(Error::Config("density values must be finite and nonnegative".into()));
                }
                let mass = trapezoid_mass(*lo, *hi, density);
                if (mass - 1.0).abs() > 1e-6 {
                    return Err(Error::Config(format!(
                        "density integrates to {mass}, expected 1 within 1e-6"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Draw one coupling from a uniform variate `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match &self.family {
            DisorderFamily::Uniform { strength } => strength * (u - 0.5),
            DisorderFamily::Tabulated { lo, hi, density } => {
                tabulated_quantile(*lo, *hi, density, u)
            }
        }
    }
}

fn trapezoid_mass(lo: f64, hi: f64, density: &[f64]) -> f64 {
    let dx = (hi - lo) / (density.len() - 1) as f64;
    density.windows(2).map(|w| 0.5 * (w[0] + w[1]) * dx).sum()
}

// Inverse CDF of the piecewise-linear density; exact within each cell.
fn tabulated_quantile(lo: f64, hi: f64, density: &[f64], u: f64) -> f64 {
    let dx = (hi - lo) / (density.len() - 1) as f64;
    let total = trapezoid_mass(lo, hi, density);
    let target = u * total;
    let mut acc = 0.0;
    for (k, w) in density.windows(2).enumerate() {
        let cell = 0.5 * (w[0] + w[1]) * dx;
        if acc + cell >= target && cell > 0.0 {
            // Solve p0 t + (p1 - p0) t² / (2 dx) = target - acc for t ∈ [0, dx].
            let need = target - acc;
            let slope = (w[1] - w[0]) / dx;
            let t = if slope.abs() < 1e-300 {
                need / w[0]
            } else {
                let disc = (w[0] * w[0] + 2.0 * slope * need).max(0.0);
                (disc.sqrt() - w[0]) / slope
            };
            return lo + k as f64 * dx + t.clamp(0.0, dx);
        }
        acc += cell;
    }
    hi
}

/// One coupling per lattice site (lattice) or per integer point of the box
/// (continuum), reproducible from `seed`.
pub fn sample_potential(disorder: &DisorderSpec, cube: &CubeSpec, seed: u64) -> Result<Vec<f64>> {
    disorder.validate()?;
    let mut rng = trial_rng(seed);
    Ok((0..cube.potential_len())
        .map(|_| disorder.quantile(uniform01(&mut rng)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::cube::LatticeCube;

    fn line(side: usize) -> CubeSpec {
        CubeSpec::Lattice(LatticeCube::with_side(1, side).unwrap())
    }

    #[test]
    fn uniform_support() {
        let d = DisorderSpec::uniform(4.0).unwrap();
        let v = sample_potential(&d, &line(1000), 17).unwrap();
        assert_eq!(v.len(), 1000);
        assert!(v.iter().all(|&x| (-2.0..=2.0).contains(&x)));
    }

    #[test]
    fn same_seed_same_sequence() {
        let d = DisorderSpec::uniform(4.0).unwrap();
        let a = sample_potential(&d, &line(64), 5).unwrap();
        let b = sample_potential(&d, &line(64), 5).unwrap();
        assert_eq!(a, b);
        let c = sample_potential(&d, &line(64), 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_mean_clt() {
        let w = 4.0;
        let n = 100_000;
        let d = DisorderSpec::uniform(w).unwrap();
        let v = sample_potential(&d, &line(n), 2024).unwrap();
        let mean = v.iter().sum::<f64>() / n as f64;
        let bound = 3.0 * (w / 12f64.sqrt()) / (n as f64).sqrt();
        assert!(mean.abs() <= bound, "mean {mean} exceeds {bound}");
    }

    #[test]
    fn tabulated_validation() {
        assert!(DisorderSpec::tabulated(0.0, 1.0, vec![1.0, 1.0]).is_ok());
        assert!(DisorderSpec::tabulated(0.0, 1.0, vec![1.0, 1.2]).is_err());
        assert!(DisorderSpec::tabulated(0.0, 1.0, vec![-1.0, 3.0]).is_err());
        assert!(DisorderSpec::tabulated(1.0, 0.0, vec![1.0, 1.0]).is_err());
        assert!(DisorderSpec::uniform(-1.0).is_err());
    }

    #[test]
    fn tabulated_triangle_quantiles() {
        // Density 2x on [0, 1]: CDF x², quantile √u.
        let d = DisorderSpec::tabulated(0.0, 1.0, vec![0.0, 2.0]).unwrap();
        for &u in &[0.01, 0.25, 0.5, 0.81, 0.99] {
            assert!((d.quantile(u) - f64::sqrt(u)).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_family_is_config_error() {
        let r: std::result::Result<DisorderSpec, _> =
            serde_json::from_str(r#"{"family":"cauchy","strength":1.0}"#);
        assert!(r.is_err());
    }
}
