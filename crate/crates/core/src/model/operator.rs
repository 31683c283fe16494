//! Symmetric banded storage for finite-volume Hamiltonians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::cube::{ContinuumBox, LatticeCube};

/// Where an operator came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OperatorKind {
    Lattice(LatticeCube),
    Continuum(ContinuumBox),
    Generic,
}

/// Real symmetric matrix stored as its lower band.
///
/// Row `i` holds `H[i][i-k..=i]` at `lower[i*(k+1) ..]`, left-padded with
/// zeros for `i < k`. Only one triangle is stored, so the matrix is exactly
/// symmetric by construction. The standard basis vector `e_i` plays the
/// role of `δ_x` for the site `x` with index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    n: usize,
    bandwidth: usize,
    lower: Vec<f64>,
    kind: OperatorKind,
}

impl OperatorMatrix {
    pub fn zeros(n: usize, bandwidth: usize, kind: OperatorKind) -> Self {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        Self {
            n,
            bandwidth,
            lower: vec![0.0; n * (bandwidth + 1)],
            kind,
        }
    }

    /// Symmetric tridiagonal matrix from its diagonal and off-diagonal.
    pub fn tridiagonal(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if off.len() + 1 != n.max(1) {
            return Err(Error::Dimension {
                expected: n.saturating_sub(1),
                got: off.len(),
            });
        }
        let mut h = Self::zeros(n, 1, OperatorKind::Generic);
        for (i, &d) in diag.iter().enumerate() {
            h.set(i, i, d);
        }
        for (i, &e) in off.iter().enumerate() {
            h.set(i + 1, i, e);
        }
        Ok(h)
    }

    pub fn diagonal_matrix(diag: &[f64]) -> Self {
        let mut h = Self::zeros(diag.len(), 0, OperatorKind::Generic);
        for (i, &d) in diag.iter().enumerate() {
            h.set(i, i, d);
        }
        h
    }

    /// From a row-major dense matrix; fails unless it is exactly symmetric.
    pub fn from_dense(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: data.len(),
            });
        }
        let mut bandwidth = 0;
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::Contract(format!(
                        "matrix is not symmetric at ({i}, {j}): {} vs {}",
                        data[i * n + j],
                        data[j * n + i]
                    )));
                }
                if data[i * n + j] != 0.0 {
                    bandwidth = bandwidth.max(i - j);
                }
            }
        }
        let mut h = Self::zeros(n, bandwidth, OperatorKind::Generic);
        for i in 0..n {
            for j in i.saturating_sub(bandwidth)..=i {
                h.set(i, j, data[i * n + j]);
            }
        }
        Ok(h)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn is_tridiagonal(&self) -> bool {
        self.bandwidth <= 1
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bandwidth {
            0.0
        } else {
            self.lower[r * (self.bandwidth + 1) + self.bandwidth + c - r]
        }
    }

    /// Sets `H[i][j]` and `H[j][i]`.
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        assert!(r - c <= self.bandwidth, "entry ({r}, {c}) outside the band");
        self.lower[r * (self.bandwidth + 1) + self.bandwidth + c - r] = v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// First sub-diagonal `H[i+1][i]`.
    pub fn subdiagonal(&self) -> Vec<f64> {
        (1..self.n).map(|i| self.get(i, i - 1)).collect()
    }

    /// Stored band of row `i`: `(first column, entries H[i][first..=i])`.
    pub fn lower_row(&self, i: usize) -> (usize, &[f64]) {
        let first = i.saturating_sub(self.bandwidth);
        let base = i * (self.bandwidth + 1);
        let skip = self.bandwidth - (i - first);
        (first, &self.lower[base + skip..base + self.bandwidth + 1])
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let (first, row) = self.lower_row(i);
            for (off, &v) in row.iter().enumerate() {
                let j = first + off;
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    /// `max |H[i][j] - H[j][i]|` over the dense expansion.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let d = self.to_dense();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((d[i * n + j] - d[j * n + i]).abs());
            }
        }
        worst
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            let (first, row) = self.lower_row(i);
            for (off, &v) in row.iter().enumerate() {
                let j = first + off;
                sums[i] += v.abs();
                if j != i {
                    sums[j] += v.abs();
                }
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        if self.n == 0 {
            return (0.0, 0.0);
        }
        let mut radius = vec![0.0; self.n];
        for i in 0..self.n {
            let (first, row) = self.lower_row(i);
            for (off, &v) in row.iter().enumerate() {
                let j = first + off;
                if j != i {
                    radius[i] += v.abs();
                    radius[j] += v.abs();
                }
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, r) in radius.iter().enumerate() {
            let d = self.get(i, i);
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let (first, row) = self.lower_row(i);
            for (off, &v) in row.iter().enumerate() {
                let j = first + off;
                y[i] += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
        }
        y
    }
}
