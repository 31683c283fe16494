//! Small numerical helpers shared by the estimators.

use statrs::distribution::{ContinuousCDF, Normal};

/// Neumaier-compensated running sum. Accumulating in a fixed order gives
/// bit-identical results regardless of how the summands were produced.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<CompensatedSum>().value()
}

/// Sample mean and unbiased variance (variance 0 for fewer than two points).
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum(xs.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = sum(xs.iter().map(|&x| (x - mean) * (x - mean)));
    (mean, ss / (n - 1) as f64)
}

/// Two-sided standard normal critical value for confidence `level`.
pub fn normal_critical(level: f64) -> f64 {
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    std.inverse_cdf(0.5 + 0.5 * level)
}

/// Upper tail `P(Z > z)` of the standard normal.
pub fn normal_sf(z: f64) -> f64 {
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    std.sf(z)
}

/// Normal-approximation confidence interval for a mean.
pub fn mean_ci(xs: &[f64], level: f64) -> (f64, (f64, f64)) {
    let (mean, var) = mean_var(xs);
    let half = normal_critical(level) * (var / xs.len() as f64).sqrt();
    (mean, (mean - half, mean + half))
}

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the responses are constant
    /// and fitted exactly.
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = sum(xs.iter().copied()) / n as f64;
    let my = sum(ys.iter().copied()) / n as f64;
    let sxx = sum(xs.iter().map(|&x| (x - mx) * (x - mx)));
    if sxx == 0.0 {
        return None;
    }
    let sxy = sum(xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)));
    let syy = sum(ys.iter().map(|&y| (y - my) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = sum(
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| (y - intercept - slope * x).powi(2)),
    );
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
    })
}
