//! Interval counts and eigenvalue location by bisection on `count_leq`.

use crate::error::{Error, Result};
use crate::model::OperatorMatrix;
use crate::spectral::inertia::count_leq;

/// Eigenvalues in the half-open interval `(a, b]`.
pub fn count_in(h: &OperatorMatrix, a: f64, b: f64) -> Result<usize> {
    check_interval(a, b)?;
    if a == b {
        return Ok(0);
    }
    Ok(count_leq(h, b) - count_leq(h, a))
}

/// Default bisection tolerance `1e-10 · max(1, ‖H‖∞)`.
pub fn default_tolerance(h: &OperatorMatrix) -> f64 {
    1e-10 * h.inf_norm().max(1.0)
}

/// Every eigenvalue in `(a, b]`, located to within `tol`, with multiplicity.
pub fn eigenvalues_in(h: &OperatorMatrix, a: f64, b: f64, tol: f64) -> Result<Vec<f64>> {
    check_interval(a, b)?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!("bisection tolerance must be positive, got {tol}")));
    }
    let mut out = Vec::new();
    if a == b {
        return Ok(out);
    }
    let (ca, cb) = (count_leq(h, a), count_leq(h, b));
    let mut stack = vec![(a, b, ca, cb)];
    while let Some((lo, hi, clo, chi)) = stack.pop() {
        if chi <= clo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            out.extend(std::iter::repeat_n(mid, chi - clo));
            continue;
        }
        let cm = count_leq(h, mid);
        stack.push((mid, hi, cm, chi));
        stack.push((lo, mid, clo, cm));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// The `k`-th smallest eigenvalue (0-based) to within `tol`.
pub fn kth_eigenvalue(h: &OperatorMatrix, k: usize, tol: f64) -> Option<f64> {
    if k >= h.size() {
        return None;
    }
    let (glo, ghi) = h.gershgorin();
    let pad = 1e-9 * (1.0 + glo.abs().max(ghi.abs()));
    let (mut lo, mut hi) = (glo - pad, ghi + pad);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_leq(h, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Smallest eigenvalue strictly above `x`, if any.
pub fn next_eigenvalue_above(h: &OperatorMatrix, x: f64, tol: f64) -> Option<f64> {
    kth_eigenvalue(h, count_leq(h, x), tol)
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a > b || a.is_nan() || b.is_nan() {
        Err(Error::Interval { a, b })
    } else {
        Ok(())
    }
}
