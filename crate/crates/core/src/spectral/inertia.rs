//! Eigenvalue counting through matrix inertia.
//!
//! By Sylvester's law the number of eigenvalues of `H` not exceeding `a`
//! is the number of nonpositive pivots in a symmetric factorization of
//! `H - aI`. Tridiagonal matrices use the Sturm recursion. Wider bands are
//! treated as block tridiagonal with blocks of the bandwidth size: the
//! inertia is accumulated over successive Schur complements
//! (Haynsworth additivity), each block being eliminated with
//! Bunch-Kaufman diagonal pivoting restricted to that block.

use crate::model::OperatorMatrix;

/// Outcome of one counting call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaCount {
    /// Number of eigenvalues `<= a` (at the possibly shifted threshold).
    pub count: usize,
    /// Pivots replaced by `-pivmin` in the Sturm recursion.
    pub guard_hits: usize,
    /// Threshold actually used when a singular block pivot forced a
    /// micro-shift, otherwise `None`.
    pub shifted_to: Option<f64>,
}

/// Relative size of the micro-shift applied after a singular block pivot.
pub const MICRO_SHIFT: f64 = 1e-12;

const BK_ALPHA: f64 = 0.640_388_203_202_208_4; // (1 + √17) / 8

/// Eigenvalues of `h` that are `<= a`.
pub fn count_leq(h: &OperatorMatrix, a: f64) -> usize {
    count_leq_report(h, a).count
}

/// As [`count_leq`], also reporting guard hits and micro-shifts.
pub fn count_leq_report(h: &OperatorMatrix, a: f64) -> InertiaCount {
    if h.size() == 0 {
        return InertiaCount {
            count: 0,
            guard_hits: 0,
            shifted_to: None,
        };
    }
    if h.is_tridiagonal() {
        return sturm_count(&h.diagonal(), &h.subdiagonal(), a);
    }
    let scale = h.inf_norm().max(a.abs()).max(1.0);
    match block_inertia(h, a, scale) {
        Some(count) => InertiaCount {
            count,
            guard_hits: 0,
            shifted_to: None,
        },
        None => {
            let shifted = a + MICRO_SHIFT * h.inf_norm().max(1.0);
            let count = block_inertia(h, shifted, scale)
                .unwrap_or_else(|| block_inertia_forced(h, shifted, scale));
            InertiaCount {
                count,
                guard_hits: 0,
                shifted_to: Some(shifted),
            }
        }
    }
}

/// Sturm count for the tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off`. A pivot with `|q| < pivmin` is replaced by `-pivmin`,
/// which counts an eigenvalue sitting exactly at `a` as `<= a`.
pub fn sturm_count(diag: &[f64], off: &[f64], a: f64) -> InertiaCount {
    let max_off2 = off.iter().map(|e| e * e).fold(1.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_off2;
    let mut count = 0;
    let mut guard_hits = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 {
            d - a
        } else {
            (d - a) - off[i - 1] * off[i - 1] / q
        };
        if q.abs() < pivmin {
            q = -pivmin;
            guard_hits += 1;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    InertiaCount {
        count,
        guard_hits,
        shifted_to: None,
    }
}

// Returns None when a non-final block meets a singular pivot.
fn block_inertia(h: &OperatorMatrix, a: f64, scale: f64) -> Option<usize> {
    block_inertia_impl(h, a, scale, false)
}

fn block_inertia_forced(h: &OperatorMatrix, a: f64, scale: f64) -> usize {
    block_inertia_impl(h, a, scale, true).expect("forced elimination always completes")
}

fn block_inertia_impl(h: &OperatorMatrix, a: f64, scale: f64, force: bool) -> Option<usize> {
    let n = h.size();
    let k = h.bandwidth().max(1);
    let tol = 64.0 * f64::EPSILON * scale;
    let starts: Vec<usize> = (0..n).step_by(k).collect();
    let block = |b: usize| starts[b]..(starts[b] + k).min(n);

    let first = block(0);
    let mut schur = DenseSym::from_fn(first.len(), |i, j| {
        h.get(first.start + i, first.start + j) - if i == j { a } else { 0.0 }
    });
    let mut count = 0;
    for b in 0..starts.len() {
        let cur = block(b);
        if b + 1 == starts.len() {
            let (nonpos, _) = schur.eliminate(cur.len(), tol);
            count += nonpos;
            break;
        }
        let next = block(b + 1);
        let m = cur.len();
        let t = m + next.len();
        let mut aug = DenseSym::zeros(t);
        for i in 0..m {
            for j in 0..m {
                aug.set(i, j, schur.get(i, j));
            }
        }
        for i in 0..next.len() {
            for j in 0..m {
                let v = h.get(next.start + i, cur.start + j);
                aug.set(m + i, j, v);
                aug.set(j, m + i, v);
            }
            for j in 0..next.len() {
                let v = h.get(next.start + i, next.start + j) - if i == j { a } else { 0.0 };
                aug.set(m + i, m + j, v);
            }
        }
        let (nonpos, singular) = aug.eliminate(m, tol);
        if singular && !force {
            return None;
        }
        count += nonpos;
        schur = aug.trailing(m);
    }
    Some(count)
}

/// Full-storage symmetric scratch matrix.
#[derive(Debug, Clone)]
struct DenseSym {
    n: usize,
    data: Vec<f64>,
}

impl DenseSym {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    fn swap_sym(&mut self, p: usize, q: usize) {
        if p == q {
            return;
        }
        let n = self.n;
        for j in 0..n {
            self.data.swap(p * n + j, q * n + j);
        }
        for i in 0..n {
            self.data.swap(i * n + p, i * n + q);
        }
    }

    fn trailing(&self, m: usize) -> DenseSym {
        let t = self.n - m;
        DenseSym::from_fn(t, |i, j| self.get(m + i, m + j))
    }

    /// Eliminates the leading `m` indices with Bunch-Kaufman pivoting
    /// confined to them, leaving the Schur complement in the trailing block.
    /// Returns the number of nonpositive pivot eigenvalues and whether any
    /// pivot was numerically singular.
    fn eliminate(&mut self, m: usize, tol: f64) -> (usize, bool) {
        let n = self.n;
        let mut nonpos = 0;
        let mut singular = false;
        let mut k = 0;
        while k < m {
            let absakk = self.get(k, k).abs();
            let (mut r, mut colmax) = (k, 0.0);
            for i in k + 1..m {
                let v = self.get(i, k).abs();
                if v > colmax {
                    colmax = v;
                    r = i;
                }
            }
            let two_by_two = if absakk >= BK_ALPHA * colmax || colmax == 0.0 {
                false
            } else {
                let mut rowmax: f64 = 0.0;
                for j in k..m {
                    if j != r {
                        rowmax = rowmax.max(self.get(r, j).abs());
                    }
                }
                if absakk * rowmax >= BK_ALPHA * colmax * colmax {
                    false
                } else if self.get(r, r).abs() >= BK_ALPHA * rowmax {
                    self.swap_sym(k, r);
                    false
                } else {
                    self.swap_sym(k + 1, r);
                    true
                }
            };

            if !two_by_two {
                let d = self.get(k, k);
                if d.abs() <= tol {
                    singular = true;
                }
                if d <= 0.0 || d.abs() <= tol {
                    nonpos += 1;
                }
                if d != 0.0 {
                    for i in k + 1..n {
                        let l = self.get(i, k) / d;
                        if l == 0.0 {
                            continue;
                        }
                        for j in k + 1..n {
                            let v = self.get(i, j) - l * self.get(k, j);
                            self.set(i, j, v);
                        }
                    }
                }
                k += 1;
            } else {
                let (a, b, c) = (self.get(k, k), self.get(k + 1, k), self.get(k + 1, k + 1));
                let det = a * c - b * b;
                let mid = 0.5 * (a + c);
                let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                for ev in [mid - rad, mid + rad] {
                    if ev.abs() <= tol {
                        singular = true;
                    }
                    if ev <= 0.0 || ev.abs() <= tol {
                        nonpos += 1;
                    }
                }
                if det != 0.0 {
                    // Rows of W = [col_k col_{k+1}] D^{-1}.
                    let (ia, ib, ic) = (c / det, -b / det, a / det);
                    for i in k + 2..n {
                        let (xi, yi) = (self.get(i, k), self.get(i, k + 1));
                        let w0 = xi * ia + yi * ib;
                        let w1 = xi * ib + yi * ic;
                        if w0 == 0.0 && w1 == 0.0 {
                            continue;
                        }
                        for j in k + 2..n {
                            let v = self.get(i, j) - w0 * self.get(k, j) - w1 * self.get(k + 1, j);
                            self.set(i, j, v);
                        }
                    }
                }
                k += 2;
            }
        }
        (nonpos, singular)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_counts() {
        let h = OperatorMatrix::diagonal_matrix(&[-1.0, 0.0, 1.0]);
        assert_eq!(count_leq(&h, 0.0), 2);
        assert_eq!(count_leq(&h, -1.5), 0);
        assert_eq!(count_leq(&h, 1.0), 3);
    }

    #[test]
    fn two_by_two() {
        let h = OperatorMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(count_leq(&h, 0.0), 1);
        assert_eq!(count_leq(&h, -1.0), 1);
        assert_eq!(count_leq(&h, 1.0), 2);
        let r = count_leq_report(&h, 0.0);
        assert_eq!(r.guard_hits, 1);
    }

    #[test]
    fn block_path_on_plaquette() {
        // 2x2 square lattice: eigenvalues -2, 0, 0, 2.
        let d = [
            0.0, 1.0, 1.0, 0.0, //
            1.0, 0.0, 0.0, 1.0, //
            1.0, 0.0, 0.0, 1.0, //
            0.0, 1.0, 1.0, 0.0,
        ];
        let h = OperatorMatrix::from_dense(4, &d).unwrap();
        assert_eq!(h.bandwidth(), 2);
        assert_eq!(count_leq(&h, -2.5), 0);
        assert_eq!(count_leq(&h, -2.0), 1);
        assert_eq!(count_leq(&h, -0.5), 1);
        assert_eq!(count_leq(&h, 0.0), 3);
        assert_eq!(count_leq(&h, 1.0), 3);
        assert_eq!(count_leq(&h, 2.0), 4);
    }

    #[test]
    fn singular_leading_block_shifts() {
        // Leading 2x2 block is singular at a = 0: [[0,0],[0,0]].
        let d = [
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            1.0, 0.0, 3.0, 0.0, //
            0.0, 1.0, 0.0, 3.0,
        ];
        let h = OperatorMatrix::from_dense(4, &d).unwrap();
        let r = count_leq_report(&h, 0.0);
        // Eigenvalues (3 ± √13)/2, each twice: two negative.
        assert_eq!(r.count, 2);
        assert!(r.shifted_to.is_some());
    }
}
