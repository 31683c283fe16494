//! Resolvent entries `⟨δ_x, (H - E - iε)^{-1} δ_y⟩`.
//!
//! `H - z` with `Im z ≠ 0` has no real eigenvalues, so every leading
//! principal submatrix is invertible and the banded complex-symmetric
//! `LDLᵀ` factorization exists without pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::OperatorMatrix;

/// Residual bound for a resolvent solve, relative to `1 + ‖δ_y‖`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Banded complex-symmetric `LDLᵀ` factorization of `H - z`.
pub struct ShiftedFactor<'a> {
    h: &'a OperatorMatrix,
    z: Complex64,
    k: usize,
    /// Row `i` holds `L[i][i-k..i]`, left-padded.
    lower: Vec<Complex64>,
    diag: Vec<Complex64>,
}

impl<'a> ShiftedFactor<'a> {
    pub fn new(h: &'a OperatorMatrix, z: Complex64) -> Result<Self> {
        let n = h.size();
        let k = h.bandwidth();
        let mut lower = vec![Complex64::new(0.0, 0.0); n * k.max(1)];
        let mut diag = vec![Complex64::new(0.0, 0.0); n];
        let li = |i: usize, j: usize| i * k.max(1) + (k + j - i) - 1;
        for j in 0..n {
            let first = j.saturating_sub(k);
            let mut d = Complex64::new(h.get(j, j), 0.0) - z;
            for p in first..j {
                let l = lower[li(j, p)];
                d -= l * l * diag[p];
            }
            if d.norm() == 0.0 || !d.is_finite() {
                return Err(Error::Numerical {
                    what: format!("zero pivot at row {j} in resolvent factorization"),
                    residual: f64::INFINITY,
                });
            }
            diag[j] = d;
            for i in j + 1..(j + k + 1).min(n) {
                let mut s = Complex64::new(h.get(i, j), 0.0);
                for p in i.saturating_sub(k)..j {
                    s -= lower[li(i, p)] * lower[li(j, p)] * diag[p];
                }
                lower[li(i, j)] = s / d;
            }
        }
        Ok(Self {
            h,
            z,
            k,
            lower,
            diag,
        })
    }

    fn l(&self, i: usize, j: usize) -> Complex64 {
        self.lower[i * self.k.max(1) + (self.k + j - i) - 1]
    }

    fn solve_raw(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.diag.len();
        let k = self.k;
        let mut x = rhs.to_vec();
        for i in 0..n {
            for p in i.saturating_sub(k)..i {
                let v = self.l(i, p) * x[p];
                x[i] -= v;
            }
        }
        for i in 0..n {
            x[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            for q in i + 1..(i + k + 1).min(n) {
                let v = self.l(q, i) * x[q];
                x[i] -= v;
            }
        }
        x
    }

    fn residual(&self, x: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        let mut r: Vec<Complex64> = (0..n).map(|i| -self.z * x[i] - rhs[i]).collect();
        for i in 0..n {
            let (first, row) = self.h.lower_row(i);
            for (off, &v) in row.iter().enumerate() {
                let j = first + off;
                r[i] += v * x[j];
                if j != i {
                    r[j] += v * x[i];
                }
            }
        }
        r
    }

    /// Solves `(H - z) x = rhs` with one step of iterative refinement when
    /// the first residual exceeds the tolerance.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        let bound = RESIDUAL_TOL * (1.0 + norm(rhs));
        let mut x = self.solve_raw(rhs);
        let mut res = self.residual(&x, rhs);
        let mut rn = norm(&res);
        if rn > bound {
            let dx = self.solve_raw(&res);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi -= d;
            }
            res = self.residual(&x, rhs);
            rn = norm(&res);
        }
        if rn > bound || !rn.is_finite() {
            return Err(Error::Numerical {
                what: "resolvent solve did not reach the residual bound".into(),
                residual: rn,
            });
        }
        Ok((x, rn))
    }

    /// Column `G(·, y)` of the resolvent.
    pub fn column(&self, y: usize) -> Result<(Vec<Complex64>, f64)> {
        let mut rhs = vec![Complex64::new(0.0, 0.0); self.diag.len()];
        rhs[y] = Complex64::new(1.0, 0.0);
        self.solve(&rhs)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨δ_x, (H - E - iε)^{-1} δ_y⟩` for basis indices `x`, `y`.
pub fn green_entry(h: &OperatorMatrix, x: usize, y: usize, energy: f64, eps: f64) -> Result<Complex64> {
    Ok(green_entry_with_residual(h, x, y, energy, eps)?.0)
}

/// As [`green_entry`], also returning the residual norm of the solve.
pub fn green_entry_with_residual(
    h: &OperatorMatrix,
    x: usize,
    y: usize,
    energy: f64,
    eps: f64,
) -> Result<(Complex64, f64)> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let n = h.size();
    if x >= n || y >= n {
        return Err(Error::Dimension {
            expected: n,
            got: x.max(y) + 1,
        });
    }
    let factor = ShiftedFactor::new(h, Complex64::new(energy, eps))?;
    let (col, res) = factor.column(y)?;
    Ok((col[x], res))
}
