//! Wegner, Minami and decorrelation estimates over sub-cube counts.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::numeric::{fit_line, mean_var, normal_critical, sum};
use crate::stats::report::{finite, non_increasing_up_to_overlap, SeriesPoint, TestReport, Thresholds, Verdict};
use crate::stats::sample::EnsembleSample;

/// Exact (Garwood) confidence interval for a Poisson mean given `k`
/// observed events.
pub fn garwood_interval(k: u64, level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    let lo = if k == 0 {
        0.0
    } else {
        ChiSquared::new(2.0 * k as f64)
            .expect("positive dof")
            .inverse_cdf(alpha / 2.0)
            / 2.0
    };
    let hi = ChiSquared::new(2.0 * k as f64 + 2.0)
        .expect("positive dof")
        .inverse_cdf(1.0 - alpha / 2.0)
        / 2.0;
    (lo, hi)
}

/// Per-trial rate of a rare event count with an exact interval.
fn rate_point(x: f64, events: u64, trials: usize, level: f64) -> SeriesPoint {
    let n = trials as f64;
    let (lo, hi) = garwood_interval(events, level);
    SeriesPoint {
        x,
        value: events as f64 / n,
        ci_low: lo / n,
        ci_high: hi / n,
    }
}

fn check_subcubes(sample: &EnsembleSample, what: &str) -> Result<usize> {
    match sample.meta.n_l {
        Some(n) if n > 0 => Ok(n),
        _ => Err(Error::InsufficientDesign(format!(
            "{what} needs a sub-cube partition (side {})",
            sample.meta.side
        ))),
    }
}

/// Linearity and slope of `E[η_p(B)]` in `|B|`.
///
/// `lengths[k]` must match `length_global[k]` and `length_sub[k]` of every
/// record. With `dos = None`, `n(E)` is taken from a fit through the origin
/// of the mean global counts.
pub fn wegner_check(
    sample: &EnsembleSample,
    lengths: &[f64],
    dos: Option<f64>,
    thresholds: &Thresholds,
) -> Result<TestReport> {
    if lengths.len() < 3 {
        return Err(Error::InsufficientDesign(format!(
            "the Wegner fit needs at least 3 window lengths, got {}",
            lengths.len()
        )));
    }
    let n_l = check_subcubes(sample, "the Wegner estimate")?;
    let trials = sample.kept_len();
    if trials == 0 {
        return Err(Error::EmptyEnsemble("no kept trials for the Wegner estimate".into()));
    }
    let z = normal_critical(thresholds.ci_level);
    let mut report = TestReport::new("wegner", *thresholds);
    report.sample_size = trials;

    let mut sub_means = Vec::with_capacity(lengths.len());
    let mut global_means = Vec::with_capacity(lengths.len());
    let mut max_sub_mean = Vec::with_capacity(lengths.len());
    let mut points = Vec::with_capacity(lengths.len());
    for (k, &len) in lengths.iter().enumerate() {
        // Average over sub-cubes within each trial, then over trials.
        let per_trial: Vec<f64> = sample
            .kept()
            .map(|r| sum(r.length_sub[k].iter().map(|&c| c as f64)) / r.length_sub[k].len().max(1) as f64)
            .collect();
        let (m, v) = mean_var(&per_trial);
        let half = z * (v / trials as f64).sqrt();
        sub_means.push(m);
        points.push(SeriesPoint {
            x: len,
            value: m,
            ci_low: m - half,
            ci_high: m + half,
        });
        global_means.push(sum(sample.kept().map(|r| r.length_global[k] as f64)) / trials as f64);
        let worst = (0..n_l)
            .map(|p| sum(sample.kept().map(|r| r.length_sub[k].get(p).copied().unwrap_or(0) as f64)) / trials as f64)
            .fold(0.0, f64::max);
        max_sub_mean.push(worst);
    }
    let fit = fit_line(lengths, &sub_means).ok_or_else(|| {
        Error::InsufficientDesign("window lengths must not all coincide".into())
    })?;
    let n_hat = match dos {
        Some(n) => n,
        None => {
            let sxy = sum(lengths.iter().zip(&global_means).map(|(x, y)| x * y));
            let sxx = sum(lengths.iter().map(|x| x * x));
            sxy / sxx
        }
    };
    report.metric("slope", fit.slope);
    report.metric("intercept", fit.intercept);
    report.metric("r_squared", fit.r_squared);
    report.metric("n_hat", n_hat);
    report.metric("n_l", n_l as f64);
    report.statistic = finite(fit.r_squared);
    report.series.insert("subcube_mean".into(), points);

    let all_zero = sub_means.iter().all(|&m| m == 0.0);
    if all_zero {
        report.metric("bound_ratio", 0.0);
        report.bound_ratio = Some(0.0);
        report.notes.push("all sub-cube counts vanish; bound holds trivially".into());
        report.verdict = Verdict::Pass;
        return Ok(report);
    }
    if !(n_hat > 0.0) {
        report.notes.push("density of states estimate is zero with non-zero sub-cube counts".into());
        report.verdict = Verdict::Fail;
        return Ok(report);
    }
    let ratio = fit.slope * n_l as f64 / n_hat;
    // Per-sub-cube worst case, expressed in the same units.
    let worst_ratio = lengths
        .iter()
        .zip(&max_sub_mean)
        .map(|(&len, &m)| m * n_l as f64 / (n_hat * len))
        .fold(0.0, f64::max);
    report.metric("bound_ratio", ratio);
    report.metric("worst_subcube_ratio", worst_ratio);
    report.bound_ratio = finite(ratio);
    report.verdict = Verdict::from_bool(fit.r_squared >= thresholds.r2_min && ratio <= thresholds.wegner_c);
    Ok(report)
}

/// `Σ_p P(η_p(A) ≥ 2)` along a ladder of scales.
///
/// Each sample is one scale; `window_len` is `|A|`.
pub fn minami_check(samples: &[EnsembleSample], window_len: f64, thresholds: &Thresholds) -> Result<TestReport> {
    if samples.len() < 2 {
        return Err(Error::InsufficientDesign(format!(
            "the Minami trend needs at least 2 scales, got {}",
            samples.len()
        )));
    }
    let mut report = TestReport::new("minami", *thresholds);
    let mut points = Vec::with_capacity(samples.len());
    let mut normalized = Vec::with_capacity(samples.len());
    for s in samples {
        let n_l = check_subcubes(s, "the Minami estimate")?;
        let trials = s.kept_len();
        if trials == 0 {
            return Err(Error::EmptyEnsemble(format!("no kept trials at side {}", s.meta.side)));
        }
        let events: u64 = s
            .kept()
            .map(|r| r.sub_a.iter().filter(|&&c| c >= 2).count() as u64)
            .sum();
        let pt = rate_point(s.meta.side, events, trials, thresholds.ci_level);
        let norm = pt.value * n_l as f64 / (window_len * window_len);
        report.metric(format!("sum_p_ge2@{}", s.meta.side), pt.value);
        report.metric(format!("normalized@{}", s.meta.side), norm);
        report.sample_size += trials;
        normalized.push(norm);
        points.push(pt);
    }
    let trend = non_increasing_up_to_overlap(&points);
    let worst = normalized.iter().copied().fold(0.0, f64::max);
    report.metric("bound_ratio", worst);
    report.bound_ratio = finite(worst);
    report.statistic = points.last().map(|p| p.value);
    report.ci = points.last().map(|p| (p.ci_low, p.ci_high));
    if !trend {
        report.notes.push("sum increases between scales beyond CI overlap".into());
    }
    report.series.insert("sum_p_ge2".into(), points);
    let bounded = thresholds.minami_c.is_none_or(|c| worst <= c);
    report.verdict = Verdict::from_bool(trend && bounded);
    Ok(report)
}

/// Decay of `Σ_p P(η_p(A) ≥ 1, η_p(B) ≥ 1)` along a ladder of scales, with
/// the pointwise inclusion `{both ≥ 1} ⊂ {union ≥ 2}` checked per sub-cube.
pub fn decorrelation_check(samples: &[EnsembleSample], thresholds: &Thresholds) -> Result<TestReport> {
    if samples.len() < 2 {
        return Err(Error::InsufficientDesign(format!(
            "the decorrelation trend needs at least 2 scales, got {}",
            samples.len()
        )));
    }
    if let Some(s) = samples.iter().find(|s| s.meta.energy == s.meta.energy_prime) {
        return Err(Error::DisjointnessUndefined(s.meta.energy));
    }
    let mut report = TestReport::new("decorrelation", *thresholds);
    let mut both_pts = Vec::with_capacity(samples.len());
    let mut union_pts = Vec::with_capacity(samples.len());
    let mut violations = 0u64;
    let mut additivity = 0u64;
    let mut triples = 0u64;
    let mut dominated = true;
    let mut disjoint = true;
    for s in samples {
        check_subcubes(s, "the decorrelation estimate")?;
        let trials = s.kept_len();
        if trials == 0 {
            return Err(Error::EmptyEnsemble(format!("no kept trials at side {}", s.meta.side)));
        }
        let mut both = 0u64;
        let mut union = 0u64;
        for r in s.kept() {
            for ((&a, &b), &u) in r.sub_a.iter().zip(&r.sub_b).zip(&r.sub_union) {
                let hit = a >= 1 && b >= 1;
                both += hit as u64;
                union += (u >= 2) as u64;
                violations += (hit && u < 2) as u64;
                // Disjoint windows count additively.
                additivity += (s.meta.windows_disjoint && u != a + b) as u64;
                triples += 1;
            }
        }
        dominated &= both <= union;
        disjoint &= s.meta.windows_disjoint;
        if !s.meta.windows_disjoint {
            report.notes.push(format!("windows overlap at side {}", s.meta.side));
        }
        report.metric(format!("sum_both@{}", s.meta.side), both as f64 / trials as f64);
        report.metric(format!("sum_union_ge2@{}", s.meta.side), union as f64 / trials as f64);
        report.sample_size += trials;
        both_pts.push(rate_point(s.meta.side, both, trials, thresholds.ci_level));
        union_pts.push(rate_point(s.meta.side, union, trials, thresholds.ci_level));
    }
    let trend_both = non_increasing_up_to_overlap(&both_pts);
    let trend_union = non_increasing_up_to_overlap(&union_pts);
    report.metric("inclusion_violations", violations as f64);
    report.metric("additivity_violations", additivity as f64);
    report.metric("checked_subcubes", triples as f64);
    report.metric("dominated", dominated as u8 as f64);
    report.statistic = both_pts.last().map(|p| p.value);
    report.ci = both_pts.last().map(|p| (p.ci_low, p.ci_high));
    if violations > 0 {
        report.notes.push(format!("{violations} sub-cube inclusion violations"));
    }
    report.series.insert("sum_both".into(), both_pts);
    report.series.insert("sum_union_ge2".into(), union_pts);
    report.verdict = Verdict::from_bool(violations == 0 && additivity == 0 && dominated && disjoint && trend_both && trend_union);
    Ok(report)
}
