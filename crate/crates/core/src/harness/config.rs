//! Experiment configuration: one JSON document, every default materialized.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{BumpProfile, ContinuumBox, CubeSpec, DisorderSpec, LatticeCube, ModelSpec};
use crate::pointprocess::{VolumeMap, Window};
use crate::stats::{default_t_grid, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    #[default]
    Lattice,
    Continuum,
}

/// Settings of the `dos` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DosSettings {
    pub bin: f64,
    /// Known value of `n(E)` to test against, if any.
    pub reference: Option<f64>,
    /// Bins of the total-mass histogram over the spectral bounds.
    pub profile_bins: usize,
}

impl Default for DosSettings {
    fn default() -> Self {
        Self {
            bin: 0.05,
            reference: None,
            profile_bins: 100,
        }
    }
}

/// Settings of the `green` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreenSettings {
    pub s: f64,
    pub eps: f64,
    /// Distances `r` of the targets `y = x + r e_1`.
    pub separations: Vec<i64>,
}

impl Default for GreenSettings {
    fn default() -> Self {
        Self {
            s: 0.5,
            eps: 1e-3,
            separations: (1..=10).map(|k| 5 * k).collect(),
        }
    }
}

/// Settings of the `oracle-check` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSettings {
    /// Largest matrix size drawn.
    pub max_size: usize,
    /// Eigenvalue agreement tolerance.
    pub tolerance: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            max_size: 200,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub flavor: Flavor,
    pub dimension: usize,
    /// Ladder of scales: lattice side in sites, or continuum box length.
    pub sides: Vec<usize>,
    pub beta: f64,
    /// Sub-cube side overriding `⌈side^β⌉`.
    pub ell: Option<usize>,
    /// Continuum grid spacing.
    pub spacing: f64,
    pub bump: BumpProfile,
    pub disorder: DisorderSpec,
    pub energy: f64,
    pub energy_prime: f64,
    pub window_a: Window,
    pub window_b: Window,
    pub wegner_lengths: Vec<f64>,
    pub trials: usize,
    /// Trials of the independent pilot ensemble estimating `n(E)`;
    /// defaults to `trials`.
    pub pilot_trials: Option<usize>,
    pub seed: u64,
    pub volume_map: VolumeMap,
    pub thresholds: Thresholds,
    pub t_grid: Vec<f64>,
    /// Bootstrap replicates for the CF gap (0 disables).
    pub bootstrap: usize,
    /// Bisection tolerance for point extraction, in rescaled units.
    pub point_tolerance: f64,
    pub dos: DosSettings,
    pub green: GreenSettings,
    pub oracle: OracleSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            flavor: Flavor::Lattice,
            dimension: 1,
            sides: vec![2048],
            beta: 0.7,
            ell: None,
            spacing: 0.25,
            bump: BumpProfile::Indicator,
            disorder: DisorderSpec::uniform(4.0).expect("valid default disorder"),
            energy: 0.0,
            energy_prime: 1.0,
            window_a: Window::interval(-2.0, 2.0).expect("valid default window"),
            window_b: Window::interval(-2.0, 2.0).expect("valid default window"),
            wegner_lengths: vec![0.5, 1.0, 2.0, 4.0],
            trials: 1000,
            pilot_trials: None,
            seed: 0,
            volume_map: VolumeMap::VolumeNormalized,
            thresholds: Thresholds::default(),
            t_grid: default_t_grid(),
            bootstrap: 0,
            point_tolerance: 1e-9,
            dos: DosSettings::default(),
            green: GreenSettings::default(),
            oracle: OracleSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn pilot_trials(&self) -> usize {
        self.pilot_trials.unwrap_or(self.trials)
    }

    /// Lowercase hex SHA-256 of the canonical JSON echo.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks that hold for every command.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sides.is_empty() {
            return Err(Error::Config("the ladder of sides is empty".into()));
        }
        if self.sides.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("sides must increase strictly, got {:?}", self.sides)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Config(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.point_tolerance > 0.0) {
            return Err(Error::Config("point_tolerance must be positive".into()));
        }
        if self.t_grid.is_empty() {
            return Err(Error::Config("empty t-grid".into()));
        }
        self.disorder.validate()?;
        for &side in &self.sides {
            self.cube(side)?;
        }
        Ok(())
    }

    /// The finite volume at one rung of the ladder.
    pub fn cube(&self, side: usize) -> Result<CubeSpec> {
        Ok(match self.flavor {
            Flavor::Lattice => CubeSpec::Lattice(LatticeCube::with_side(self.dimension, side)?),
            Flavor::Continuum => CubeSpec::Continuum(ContinuumBox::new(self.dimension, side as f64, self.spacing)?),
        })
    }

    pub fn model(&self, side: usize) -> Result<ModelSpec> {
        Ok(ModelSpec {
            cube: self.cube(side)?,
            disorder: self.disorder.clone(),
            bump: self.bump,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), c);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"sides": [512, 1024], "disorder": {"family": "uniform", "strength": 2.0},
                "window_a": [[-1.0, 0.0], [0.5, 1.0]], "thresholds": {"ks_max": 0.07}}"#,
        )
        .unwrap();
        assert_eq!(c.sides, vec![512, 1024]);
        assert_eq!(c.disorder.strength(), 2.0);
        assert_eq!(c.window_a.intervals().len(), 2);
        assert_eq!(c.thresholds.ks_max, 0.07);
        assert_eq!(c.thresholds.r2_min, 0.99);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = ExperimentConfig::default();
        c.trials = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ExperimentConfig::default();
        c.sides = vec![1024, 512];
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::from_json(r#"{"window_a": [[1.0, 0.0]]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"no_such_field": 1}"#).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), a.clone().hash());
    }
}
