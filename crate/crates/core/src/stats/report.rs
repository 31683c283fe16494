//! Test outcomes and the thresholds they were judged against.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The statistic is undefined for this sample (e.g. constant columns).
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Decision thresholds; every report carries the values it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Minimum R² for the Wegner linearity fit.
    pub r2_min: f64,
    /// Maximum Kolmogorov-Smirnov distance for the gap test.
    pub ks_max: f64,
    /// Maximum characteristic-function factorization gap.
    pub cf_gap_max: f64,
    /// Significance level for p-value tests.
    pub significance: f64,
    /// Confidence level of reported intervals.
    pub ci_level: f64,
    /// Upper bound for the Wegner ratio slope / (n(E)/n_L).
    pub wegner_c: f64,
    /// Minimum R² of the log-linear fractional-moment decay fit.
    pub decay_r2_min: f64,
    /// Optional upper bound for `n_L Σ_p P(η_p ≥ 2) / |B|²`. The constant
    /// is not known, so by default only the trend is judged.
    pub minami_c: Option<f64>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            r2_min: 0.99,
            ks_max: 0.05,
            cf_gap_max: 0.05,
            significance: 0.01,
            ci_level: 0.95,
            wegner_c: 1.2,
            minami_c: None,
            decay_r2_min: 0.9,
        }
    }
}

/// One point of a per-scale or per-length series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub bound_ratio: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub sample_size: usize,
    pub verdict: Verdict,
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default)]
    pub series: BTreeMap<String, Vec<SeriesPoint>>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub thresholds: Thresholds,
    pub provenance: Option<Provenance>,
}

impl TestReport {
    pub fn new(name: impl Into<String>, thresholds: Thresholds) -> Self {
        Self {
            name: name.into(),
            statistic: None,
            p_value: None,
            bound_ratio: None,
            ci: None,
            sample_size: 0,
            verdict: Verdict::Inconclusive,
            metrics: BTreeMap::new(),
            series: BTreeMap::new(),
            notes: Vec::new(),
            thresholds,
            provenance: None,
        }
    }

    /// Records a metric; non-finite values become a note so the report
    /// stays valid JSON.
    pub fn metric(&mut self, key: impl Into<String>, value: f64) {
        let key = key.into();
        if value.is_finite() {
            self.metrics.insert(key, value);
        } else {
            self.notes.push(format!("{key} is not finite ({value})"));
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

pub(crate) fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Two intervals share at least one point.
pub(crate) fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0.max(b.0) <= a.1.min(b.1)
}

/// Each consecutive pair either does not increase or has overlapping CIs.
pub fn non_increasing_up_to_overlap(points: &[SeriesPoint]) -> bool {
    points.windows(2).all(|w| {
        w[1].value <= w[0].value || overlaps((w[0].ci_low, w[0].ci_high), (w[1].ci_low, w[1].ci_high))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: f64, lo: f64, hi: f64) -> SeriesPoint {
        SeriesPoint {
            x: 0.0,
            value: v,
            ci_low: lo,
            ci_high: hi,
        }
    }

    #[test]
    fn trend_rule() {
        assert!(non_increasing_up_to_overlap(&[sp(3.0, 2.0, 4.0), sp(1.0, 0.5, 1.5)]));
        assert!(non_increasing_up_to_overlap(&[sp(1.0, 0.5, 1.5), sp(1.2, 0.9, 1.6)]));
        assert!(!non_increasing_up_to_overlap(&[sp(1.0, 0.9, 1.1), sp(2.0, 1.8, 2.2)]));
    }

    #[test]
    fn nonfinite_metric_becomes_note() {
        let mut r = TestReport::new("t", Thresholds::default());
        r.metric("x", f64::NAN);
        assert!(r.metrics.is_empty());
        assert_eq!(r.notes.len(), 1);
    }
}
