//! Independence of paired counts taken from the same realization.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::numeric::{normal_critical, normal_sf, CompensatedSum};
use crate::seeding::trial_rng;
use crate::stats::poisson::theoretical_poisson_cf;
use crate::stats::report::{finite, TestReport, Thresholds, Verdict};

/// The grid `{−3, −2.5, …, 3}`.
pub fn default_t_grid() -> Vec<f64> {
    (-6..=6).map(|k| 0.5 * k as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub ci: Option<(f64, f64)>,
    pub p_value: Option<f64>,
}

/// Pearson correlation with a Fisher-z interval; `None` when either
/// coordinate is constant.
pub fn pearson(pairs: &[(f64, f64)], level: f64) -> Option<Correlation> {
    let n = pairs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pairs.iter().map(|p| p.0).collect::<CompensatedSum>().value() / nf;
    let my = pairs.iter().map(|p| p.1).collect::<CompensatedSum>().value() / nf;
    let mut sxx = CompensatedSum::new();
    let mut syy = CompensatedSum::new();
    let mut sxy = CompensatedSum::new();
    for &(x, y) in pairs {
        sxx.add((x - mx) * (x - mx));
        syy.add((y - my) * (y - my));
        sxy.add((x - mx) * (y - my));
    }
    let (sxx, syy, sxy) = (sxx.value(), syy.value(), sxy.value());
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    if n <= 3 {
        return Some(Correlation { r, ci: None, p_value: None });
    }
    let se = 1.0 / (nf - 3.0).sqrt();
    let z = r.clamp(-1.0 + 1e-15, 1.0 - 1e-15).atanh();
    let zc = normal_critical(level);
    let ci = ((z - zc * se).tanh(), (z + zc * se).tanh());
    let p = (2.0 * normal_sf(z.abs() / se)).clamp(0.0, 1.0);
    Some(Correlation { r, ci: Some(ci), p_value: Some(p) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub rows: usize,
    pub cols: usize,
}

/// Merges the category at `i` into its adjacent neighbor with the smaller
/// total.
fn merge_category(table: &mut Vec<Vec<f64>>, totals: &[f64], i: usize, by_row: bool) {
    let len = totals.len();
    let j = if i == 0 {
        1
    } else if i == len - 1 || totals[i - 1] <= totals[i + 1] {
        i - 1
    } else {
        i + 1
    };
    if by_row {
        let row = table.remove(i);
        let j = if j > i { j - 1 } else { j };
        for (c, v) in row.into_iter().enumerate() {
            table[j][c] += v;
        }
    } else {
        for row in table.iter_mut() {
            let v = row.remove(i);
            let j = if j > i { j - 1 } else { j };
            row[j] += v;
        }
    }
}

/// Chi-square test of independence on the contingency table of the pairs,
/// with adjacent values merged until every expected cell is at least 5.
/// `None` when merging collapses either margin to one category.
pub fn chi_square_independence(pairs: &[(u32, u32)]) -> Option<ContingencyTest> {
    if pairs.is_empty() {
        return None;
    }
    let xs: Vec<u32> = {
        let mut v: Vec<u32> = pairs.iter().map(|p| p.0).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let ys: Vec<u32> = {
        let mut v: Vec<u32> = pairs.iter().map(|p| p.1).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let xi: BTreeMap<u32, usize> = xs.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let yi: BTreeMap<u32, usize> = ys.iter().enumerate().map(|(i, &y)| (y, i)).collect();
    let mut table = vec![vec![0.0; ys.len()]; xs.len()];
    for &(x, y) in pairs {
        table[xi[&x]][yi[&y]] += 1.0;
    }
    let n = pairs.len() as f64;
    loop {
        let rows = table.len();
        let cols = table[0].len();
        if rows < 2 || cols < 2 {
            return None;
        }
        let rt: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
        let ct: Vec<f64> = (0..cols).map(|c| table.iter().map(|r| r[c]).sum()).collect();
        let (ri, rmin) = argmin(&rt);
        let (ci, cmin) = argmin(&ct);
        if rmin * cmin / n >= 5.0 {
            let mut stat = 0.0;
            for (r, row) in table.iter().enumerate() {
                for (c, &o) in row.iter().enumerate() {
                    let e = rt[r] * ct[c] / n;
                    stat += (o - e) * (o - e) / e;
                }
            }
            let dof = (rows - 1) * (cols - 1);
            let p = ChiSquared::new(dof as f64).expect("positive dof").sf(stat).clamp(0.0, 1.0);
            return Some(ContingencyTest { statistic: stat, dof, p_value: p, rows, cols });
        }
        if rmin <= cmin {
            merge_category(&mut table, &rt, ri, true);
        } else {
            merge_category(&mut table, &ct, ci, false);
        }
    }
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, x)| if x < acc.1 { (i, x) } else { acc })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfFactorization {
    pub grid: Vec<f64>,
    /// `joint[i][j] = φ̂(grid[i], grid[j])`.
    pub joint: Vec<Vec<Complex64>>,
    pub marginal_1: Vec<Complex64>,
    pub marginal_2: Vec<Complex64>,
    pub gap: f64,
    /// Grid point where the gap is attained.
    pub argmax: (f64, f64),
    /// Max deviation of the joint table from the Poisson product, when
    /// means were supplied.
    pub theoretical_deviation: Option<f64>,
    pub gap_ci: Option<(f64, f64)>,
}

/// Options of [`empirical_cf_factorization`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CfOptions {
    /// Poisson means `(λ₁, λ₂)` of the product null.
    pub poisson_means: Option<(f64, f64)>,
    /// `(replicates, seed, level)` of a percentile bootstrap for the gap.
    pub bootstrap: Option<(usize, u64, f64)>,
}

/// `e^{itN}` for every grid point and every distinct value.
fn phase_table(grid: &[f64], values: impl Iterator<Item = u32>) -> BTreeMap<u32, Vec<Complex64>> {
    let mut out = BTreeMap::new();
    for v in values {
        out.entry(v)
            .or_insert_with(|| grid.iter().map(|&t| Complex64::new(0.0, t * v as f64).exp()).collect());
    }
    out
}

struct CfTables {
    joint: Vec<Vec<Complex64>>,
    m1: Vec<Complex64>,
    m2: Vec<Complex64>,
}

fn cf_tables(
    pairs: &[(u32, u32)],
    idx: &mut dyn Iterator<Item = usize>,
    grid: &[f64],
    p1: &BTreeMap<u32, Vec<Complex64>>,
    p2: &BTreeMap<u32, Vec<Complex64>>,
) -> CfTables {
    let g = grid.len();
    let mut jr = vec![CompensatedSum::new(); g * g];
    let mut ji = vec![CompensatedSum::new(); g * g];
    let mut m1 = vec![(CompensatedSum::new(), CompensatedSum::new()); g];
    let mut m2 = vec![(CompensatedSum::new(), CompensatedSum::new()); g];
    let mut n = 0usize;
    for k in idx {
        let (a, b) = pairs[k];
        let (ea, eb) = (&p1[&a], &p2[&b]);
        for i in 0..g {
            m1[i].0.add(ea[i].re);
            m1[i].1.add(ea[i].im);
            m2[i].0.add(eb[i].re);
            m2[i].1.add(eb[i].im);
            for j in 0..g {
                let z = ea[i] * eb[j];
                jr[i * g + j].add(z.re);
                ji[i * g + j].add(z.im);
            }
        }
        n += 1;
    }
    let nf = n as f64;
    let avg = |re: &CompensatedSum, im: &CompensatedSum| Complex64::new(re.value() / nf, im.value() / nf);
    CfTables {
        joint: (0..g)
            .map(|i| (0..g).map(|j| avg(&jr[i * g + j], &ji[i * g + j])).collect())
            .collect(),
        m1: m1.iter().map(|(r, i)| avg(r, i)).collect(),
        m2: m2.iter().map(|(r, i)| avg(r, i)).collect(),
    }
}

fn max_gap(t: &CfTables, grid: &[f64]) -> (f64, (f64, f64)) {
    let mut best = (0.0, (grid[0], grid[0]));
    for (i, row) in t.joint.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let d = (z - t.m1[i] * t.m2[j]).norm();
            if d > best.0 {
                best = (d, (grid[i], grid[j]));
            }
        }
    }
    best
}

/// Empirical joint and marginal characteristic functions of the pairs and
/// their factorization gap `max |φ̂(t₁,t₂) − φ̂₁(t₁) φ̂₂(t₂)|`.
pub fn empirical_cf_factorization(pairs: &[(u32, u32)], grid: &[f64], options: CfOptions) -> Result<CfFactorization> {
    if grid.is_empty() {
        return Err(Error::Config("empty t-grid".into()));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyEnsemble("no pairs for the characteristic function".into()));
    }
    let p1 = phase_table(grid, pairs.iter().map(|p| p.0));
    let p2 = phase_table(grid, pairs.iter().map(|p| p.1));
    let tables = cf_tables(pairs, &mut (0..pairs.len()), grid, &p1, &p2);
    let (gap, argmax) = max_gap(&tables, grid);

    let theoretical_deviation = options.poisson_means.map(|(l1, l2)| {
        let mut d: f64 = 0.0;
        for (i, &t1) in grid.iter().enumerate() {
            for (j, &t2) in grid.iter().enumerate() {
                let prod = theoretical_poisson_cf(t1, l1) * theoretical_poisson_cf(t2, l2);
                d = d.max((tables.joint[i][j] - prod).norm());
            }
        }
        d
    });

    let gap_ci = options.bootstrap.filter(|b| b.0 > 0).map(|(reps, seed, level)| {
        let n = pairs.len();
        let mut rng = trial_rng(seed);
        let mut gaps: Vec<f64> = (0..reps)
            .map(|_| {
                let picks: Vec<usize> = (0..n).map(|_| (rng.next_u64() % n as u64) as usize).collect();
                let t = cf_tables(pairs, &mut picks.into_iter(), grid, &p1, &p2);
                max_gap(&t, grid).0
            })
            .collect();
        gaps.sort_by(f64::total_cmp);
        let q = |p: f64| gaps[((p * (reps - 1) as f64).round() as usize).min(reps - 1)];
        let alpha = 1.0 - level;
        (q(alpha / 2.0), q(1.0 - alpha / 2.0))
    });

    Ok(CfFactorization {
        grid: grid.to_vec(),
        joint: tables.joint,
        marginal_1: tables.m1,
        marginal_2: tables.m2,
        gap,
        argmax,
        theoretical_deviation,
        gap_ci,
    })
}

/// Correlation, contingency chi-square and CF gap of paired counts; PASS
/// when the correlation CI covers 0, the chi-square p-value exceeds the
/// significance level and the gap is within threshold.
pub fn independence_test(
    pairs: &[(u32, u32)],
    grid: &[f64],
    poisson_means: Option<(f64, f64)>,
    thresholds: &Thresholds,
) -> Result<TestReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyEnsemble("no pairs for the independence test".into()));
    }
    let mut report = TestReport::new("independence", *thresholds);
    report.sample_size = pairs.len();

    let fpairs: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
    let corr = pearson(&fpairs, thresholds.ci_level);
    let corr_ok = match corr {
        Some(c) => {
            report.metric("correlation", c.r);
            report.statistic = finite(c.r);
            report.ci = c.ci;
            if let Some((lo, hi)) = c.ci {
                report.metric("correlation_ci_low", lo);
                report.metric("correlation_ci_high", hi);
                report.metric("correlation_half_width", 0.5 * (hi - lo));
            }
            if let Some(p) = c.p_value {
                report.metric("correlation_p_value", p);
            }
            c.ci.map(|(lo, hi)| lo <= 0.0 && 0.0 <= hi)
        }
        None => {
            report.notes.push("correlation undefined: a coordinate is constant".into());
            None
        }
    };

    let chi_ok = match chi_square_independence(pairs) {
        Some(c) => {
            report.metric("chi_square", c.statistic);
            report.metric("chi_square_dof", c.dof as f64);
            report.metric("chi_square_p_value", c.p_value);
            report.p_value = Some(c.p_value);
            Some(c.p_value > thresholds.significance)
        }
        None => {
            report.notes.push("contingency table collapses to one category after pooling".into());
            None
        }
    };

    let cf = empirical_cf_factorization(
        pairs,
        grid,
        CfOptions {
            poisson_means,
            bootstrap: None,
        },
    )?;
    report.metric("cf_gap", cf.gap);
    if let Some(d) = cf.theoretical_deviation {
        report.metric("cf_theoretical_deviation", d);
    }
    let gap_ok = cf.gap <= thresholds.cf_gap_max;

    report.verdict = match (corr_ok, chi_ok) {
        (Some(a), Some(b)) => Verdict::from_bool(a && b && gap_ok),
        // Undefined sub-tests cannot certify independence, but a violated
        // one still refutes it.
        (Some(false), _) | (_, Some(false)) => Verdict::Fail,
        _ if !gap_ok => Verdict::Fail,
        _ => Verdict::Inconclusive,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_distr::{Distribution, Poisson};

    fn poisson_pairs(n: usize, seed: u64, correlated: bool) -> Vec<(u32, u32)> {
        let mut rng = trial_rng(seed);
        let d = Poisson::new(1.0).unwrap();
        (0..n)
            .map(|_| {
                let a = d.sample(&mut rng) as u32;
                let b = if correlated { a } else { d.sample(&mut rng) as u32 };
                (a, b)
            })
            .collect()
    }

    #[test]
    fn single_sample_has_unit_modulus() {
        let cf = empirical_cf_factorization(&[(3, 5)], &default_t_grid(), CfOptions::default()).unwrap();
        for row in &cf.joint {
            for z in row {
                assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
        assert!(cf.gap < 1e-12);
    }

    #[test]
    fn independent_pairs_factorize() {
        let pairs = poisson_pairs(10_000, 1, false);
        let cf = empirical_cf_factorization(
            &pairs,
            &default_t_grid(),
            CfOptions {
                poisson_means: Some((1.0, 1.0)),
                bootstrap: Some((50, 9, 0.95)),
            },
        )
        .unwrap();
        assert!(cf.gap <= 0.05, "gap {}", cf.gap);
        assert!(cf.theoretical_deviation.unwrap() <= 0.05);
        let (lo, hi) = cf.gap_ci.unwrap();
        assert!(lo <= hi);
    }

    #[test]
    fn correlated_pairs_do_not_factorize() {
        let pairs = poisson_pairs(10_000, 2, true);
        let pi = std::f64::consts::PI;
        let cf = empirical_cf_factorization(&pairs, &[pi], CfOptions::default()).unwrap();
        // Joint CF at (π, π) is 1; the product is about e^{-4}.
        assert!(cf.gap >= 0.95, "gap {}", cf.gap);
    }

    #[test]
    fn empty_grid_errors() {
        assert!(empirical_cf_factorization(&[(1, 1)], &[], CfOptions::default()).is_err());
    }

    #[test]
    fn independent_poisson_passes() {
        let pairs = poisson_pairs(10_000, 4, false);
        let rep = independence_test(&pairs, &default_t_grid(), Some((1.0, 1.0)), &Thresholds::default()).unwrap();
        assert!(rep.get("correlation").unwrap().abs() < 0.05);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn identical_pairs_fail() {
        let pairs = poisson_pairs(2000, 6, true);
        let rep = independence_test(&pairs, &default_t_grid(), None, &Thresholds::default()).unwrap();
        assert!((rep.get("correlation").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rep.verdict, Verdict::Fail);
    }

    #[test]
    fn constant_column_is_undefined() {
        let pairs: Vec<(u32, u32)> = (0..100).map(|k| (2, k % 3)).collect();
        assert!(pearson(&pairs.iter().map(|&(a, b)| (a as f64, b as f64)).collect::<Vec<_>>(), 0.95).is_none());
        let rep = independence_test(&pairs, &default_t_grid(), None, &Thresholds::default()).unwrap();
        assert!(rep.get("correlation").is_none());
        assert!(rep.notes.iter().any(|n| n.contains("undefined")));
    }

    #[test]
    fn fisher_interval_reference() {
        // n = 103 gives a Fisher standard error of exactly 0.1.
        let n = 103;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let x = (k as f64 * 0.7).sin();
                let y = (k as f64 * 1.3).cos();
                (x, y)
            })
            .collect();
        let c = pearson(&pairs, 0.95).unwrap();
        let z = c.r.atanh();
        let (lo, hi) = c.ci.unwrap();
        assert!((lo - (z - 1.959964 * 0.1).tanh()).abs() < 1e-6);
        assert!((hi - (z + 1.959964 * 0.1).tanh()).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn cf_invariants(pairs in proptest::collection::vec((0u32..6, 0u32..6), 1..60)) {
            let grid = [-1.0, 0.0, 0.5, 2.0];
            let cf = empirical_cf_factorization(&pairs, &grid, CfOptions::default()).unwrap();
            for row in &cf.joint {
                for z in row {
                    prop_assert!(z.norm() <= 1.0 + 1e-12);
                }
            }
            // t = 0 is index 1.
            prop_assert!(cf.joint[1][1] == Complex64::new(1.0, 0.0));
            prop_assert!(cf.marginal_1[1] == Complex64::new(1.0, 0.0));
        }

        #[test]
        fn contingency_p_in_unit_interval(pairs in proptest::collection::vec((0u32..5, 0u32..5), 1..400)) {
            if let Some(c) = chi_square_independence(&pairs) {
                prop_assert!((0.0..=1.0).contains(&c.p_value));
            }
        }
    }
}
