//! Per-trial records produced by an ensemble run.

use serde::{Deserialize, Serialize};

/// Scale and normalization shared by every record of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub flavor: String,
    pub dimension: usize,
    /// Edge length in sites (lattice) or box length (continuum).
    pub side: f64,
    pub ell: Option<usize>,
    pub n_l: Option<usize>,
    pub volume: f64,
    pub energy: f64,
    pub energy_prime: f64,
    /// Whether `E + A/V` and `E' + B/V` are disjoint at this scale.
    pub windows_disjoint: bool,
}

/// Counts and points from one realization `ω`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    /// `η_{L,E}(A)` of the global operator.
    pub eta_a: u32,
    /// `η_{L,E'}(B)` of the global operator.
    pub eta_b: u32,
    pub zeta_a: Option<u32>,
    pub zeta_b: Option<u32>,
    /// `η_{p,E,L}(A)` per sub-cube.
    pub sub_a: Vec<u32>,
    /// `η_{p,E',L}(B)` per sub-cube.
    pub sub_b: Vec<u32>,
    /// Per sub-cube count in the union `(E + A/V) ∪ (E' + B/V)`, counted
    /// directly on the merged window.
    pub sub_union: Vec<u32>,
    /// Global count in `E + B_k/V` for each length of the Wegner grid.
    pub length_global: Vec<u32>,
    /// Per-length, per-sub-cube counts for the Wegner grid.
    pub length_sub: Vec<Vec<u32>>,
    /// Rescaled points of the global operator in `A` around `E`.
    pub points: Vec<f64>,
    pub gaps: Vec<f64>,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSample {
    pub meta: SampleMeta,
    pub records: Vec<TrialRecord>,
}

impl EnsembleSample {
    /// Records that were not excluded, in trial order.
    pub fn kept(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| !r.excluded)
    }

    pub fn kept_len(&self) -> usize {
        self.kept().count()
    }

    /// `(η_E(A), η_E'(B))` per kept trial.
    pub fn eta_pairs(&self) -> Vec<(u32, u32)> {
        self.kept().map(|r| (r.eta_a, r.eta_b)).collect()
    }

    /// `(ζ_E(A), ζ_E'(B))` per kept trial, when sub-cubes exist.
    pub fn zeta_pairs(&self) -> Option<Vec<(u32, u32)>> {
        self.kept()
            .map(|r| Some((r.zeta_a?, r.zeta_b?)))
            .collect()
    }
}
