//! Goodness of fit against the Poisson point process.

use num_complex::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

use crate::error::{Error, Result};
use crate::stats::report::{finite, TestReport, Thresholds, Verdict};

/// `exp((e^{it} − 1) λ)`.
pub fn theoretical_poisson_cf(t: f64, lambda: f64) -> Complex64 {
    debug_assert!(lambda >= 0.0, "negative Poisson mean {lambda}");
    ((Complex64::new(0.0, t).exp() - 1.0) * lambda).exp()
}

/// A bin `[lo, hi]` of count values (`hi = None` for an open tail).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountBin {
    pub lo: u64,
    pub hi: Option<u64>,
    pub expected: f64,
    pub observed: u64,
}

/// Bins of Poisson(`lambda`) for `n` draws, merged so that every expected
/// count is at least `min_expected`.
pub fn pooled_poisson_bins(lambda: f64, n: usize, min_expected: f64) -> Vec<CountBin> {
    let dist = Poisson::new(lambda).expect("positive Poisson mean");
    let n = n as f64;
    let mut bins: Vec<CountBin> = Vec::new();
    let mut lo = 0u64;
    let mut acc = 0.0;
    let mut k = 0u64;
    loop {
        let tail = if k == 0 { n } else { n * dist.sf(k - 1) };
        if tail < 2.0 * min_expected {
            bins.push(CountBin {
                lo,
                hi: None,
                expected: acc + tail,
                observed: 0,
            });
            break;
        }
        acc += n * dist.pmf(k);
        if acc >= min_expected {
            bins.push(CountBin {
                lo,
                hi: Some(k),
                expected: acc,
                observed: 0,
            });
            lo = k + 1;
            acc = 0.0;
        }
        k += 1;
    }
    if bins.len() > 1 && bins[bins.len() - 1].expected < min_expected {
        let last = bins.pop().unwrap();
        let prev = bins.last_mut().unwrap();
        prev.hi = None;
        prev.expected += last.expected;
    }
    bins
}

/// Chi-square goodness of fit of `counts` against Poisson(`lambda`).
pub fn chi_square_poisson(counts: &[u32], lambda: f64, thresholds: &Thresholds) -> Result<TestReport> {
    if counts.is_empty() {
        return Err(Error::EmptyEnsemble("no counts for the Poisson test".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::Config(format!("Poisson mean must be positive, got {lambda}")));
    }
    let mut bins = pooled_poisson_bins(lambda, counts.len(), 5.0);
    for &c in counts {
        let c = c as u64;
        let bin = bins
            .iter_mut()
            .find(|b| c >= b.lo && b.hi.is_none_or(|hi| c <= hi))
            .expect("bins cover every count");
        bin.observed += 1;
    }
    let stat: f64 = bins
        .iter()
        .map(|b| (b.observed as f64 - b.expected).powi(2) / b.expected)
        .sum();
    let dof = bins.len().saturating_sub(1);
    let mut report = TestReport::new("poisson_counts", *thresholds);
    report.sample_size = counts.len();
    report.statistic = finite(stat);
    report.metric("chi_square", stat);
    report.metric("dof", dof as f64);
    report.metric("bins", bins.len() as f64);
    report.metric("lambda", lambda);
    report.metric("mean_count", counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64);
    if dof == 0 {
        report.notes.push("a single pooled bin leaves no degrees of freedom".into());
        return Ok(report);
    }
    let p = ChiSquared::new(dof as f64).expect("positive dof").sf(stat).clamp(0.0, 1.0);
    report.p_value = Some(p);
    report.metric("p_value", p);
    report.verdict = Verdict::from_bool(p > thresholds.significance);
    Ok(report)
}

/// Kolmogorov distribution tail `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * x * x).exp();
        s += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Two-sided KS distance between `xs` and Exponential(`rate`), with its
/// asymptotic p-value.
pub fn ks_exponential(xs: &[f64], rate: f64) -> (f64, f64) {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = 1.0 - (-rate * x.max(0.0)).exp();
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    (d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d))
}

/// KS test of `gaps` against Exponential(`rate`).
pub fn ks_gap_test(gaps: &[f64], rate: f64, thresholds: &Thresholds) -> Result<TestReport> {
    if gaps.is_empty() {
        return Err(Error::EmptyEnsemble("no gaps for the Poisson test".into()));
    }
    if !(rate > 0.0) {
        return Err(Error::Config(format!("gap rate must be positive, got {rate}")));
    }
    let (d, p) = ks_exponential(gaps, rate);
    let mut report = TestReport::new("poisson_gaps", *thresholds);
    report.sample_size = gaps.len();
    report.statistic = Some(d);
    report.p_value = Some(p);
    report.metric("ks_distance", d);
    report.metric("p_value", p);
    report.metric("rate", rate);
    report.verdict = Verdict::from_bool(d <= thresholds.ks_max);
    Ok(report)
}

/// Input of [`poisson_test`].
#[derive(Debug, Clone, Copy)]
pub enum PoissonInput<'a> {
    Counts(&'a [u32]),
    Gaps(&'a [f64]),
}

/// Chi-square for counts, KS for gaps; `lambda` is the Poisson mean or the
/// gap rate respectively.
pub fn poisson_test(input: PoissonInput<'_>, lambda: f64, thresholds: &Thresholds) -> Result<TestReport> {
    match input {
        PoissonInput::Counts(c) => chi_square_poisson(c, lambda, thresholds),
        PoissonInput::Gaps(g) => ks_gap_test(g, lambda, thresholds),
    }
}
