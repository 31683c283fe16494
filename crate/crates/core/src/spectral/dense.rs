//! Dense symmetric eigendecomposition used as an independent oracle.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::OperatorMatrix;

pub const DEFAULT_ORACLE_CAP: usize = 2000;

/// All eigenvalues in ascending order, via Householder tridiagonalization
/// and implicitly shifted QR. Refuses matrices larger than `cap`.
pub fn dense_spectrum_capped(h: &OperatorMatrix, cap: usize) -> Result<Vec<f64>> {
    let n = h.size();
    if n > cap {
        return Err(Error::OracleSize { n, cap });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = DMatrix::from_row_slice(n, n, &h.to_dense());
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn dense_spectrum(h: &OperatorMatrix) -> Result<Vec<f64>> {
    dense_spectrum_capped(h, DEFAULT_ORACLE_CAP)
}
