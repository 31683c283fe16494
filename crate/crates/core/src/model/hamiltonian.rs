//! Assembly of the lattice and discretized-continuum random Hamiltonians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::cube::{ContinuumBox, LatticeCube};
use crate::model::operator::{OperatorKind, OperatorMatrix};

/// Nearest-neighbour adjacency of the cube plus the diagonal potential,
/// truncated at the cube boundary (no wraparound).
pub fn build_lattice_hamiltonian(cube: &LatticeCube, potential: &[f64]) -> Result<OperatorMatrix> {
    let n = cube.site_count();
    if potential.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: potential.len(),
        });
    }
    let d = cube.dimension;
    let bandwidth = if d == 1 { 1 } else { cube.stride(0) };
    let mut h = OperatorMatrix::zeros(n, bandwidth, OperatorKind::Lattice(*cube));
    for (i, &w) in potential.iter().enumerate() {
        h.set(i, i, w);
    }
    for i in 0..n {
        let site = cube.site_of(i);
        for j in 0..d {
            if ((site[j] - cube.origin[j]) as usize) + 1 < cube.side {
                h.set(i + cube.stride(j), i, 1.0);
            }
        }
    }
    Ok(h)
}

/// Disjoint translates of a sub-cube covering a lattice cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcubePartition {
    /// `⌈side^β⌉` before adjustment.
    pub requested_side: usize,
    /// Largest divisor of the side not exceeding the request.
    pub side: usize,
    /// Number of sub-cubes, `(side / ℓ)^d`.
    pub count: usize,
    pub cubes: Vec<LatticeCube>,
}

/// Partition with sub-side `⌈side^β⌉` rounded down to a divisor of the side.
pub fn partition_subcubes(cube: &LatticeCube, beta: f64) -> Result<SubcubePartition> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Config(format!("beta must lie in (0, 1), got {beta}")));
    }
    let requested = ((cube.side as f64).powf(beta).ceil() as usize).clamp(1, cube.side);
    partition_with_request(cube, requested)
}

/// Partition with an explicitly requested sub-side (adjusted down to a divisor).
pub fn partition_with_side(cube: &LatticeCube, ell: usize) -> Result<SubcubePartition> {
    partition_with_request(cube, ell.min(cube.side))
}

fn partition_with_request(cube: &LatticeCube, requested: usize) -> Result<SubcubePartition> {
    let ell = (2..=requested).rev().find(|l| cube.side % l == 0).ok_or(
        Error::DegeneratePartition {
            side: cube.side,
            requested,
        },
    )?;
    let per_axis = cube.side / ell;
    let d = cube.dimension;
    let count = per_axis.pow(d as u32);
    let cubes = (0..count)
        .map(|p| {
            let mut origin = cube.origin;
            let mut rest = p;
            for j in (0..d).rev() {
                origin[j] += ((rest % per_axis) * ell) as i64;
                rest /= per_axis;
            }
            LatticeCube {
                dimension: d,
                origin,
                side: ell,
            }
        })
        .collect();
    Ok(SubcubePartition {
        requested_side: requested,
        side: ell,
        count,
        cubes,
    })
}

/// Restriction of a site-indexed potential on `cube` to `sub`.
pub fn restrict_potential(cube: &LatticeCube, sub: &LatticeCube, potential: &[f64]) -> Vec<f64> {
    sub.sites()
        .map(|s| {
            let idx = cube
                .index_of(&s)
                .expect("sub-cube must lie inside the parent cube");
            potential[idx]
        })
        .collect()
}

/// `h_{p,L}` for every sub-cube, each built from the shared potential
/// restricted to that sub-cube.
pub fn build_subcube_hamiltonians(
    cube: &LatticeCube,
    partition: &SubcubePartition,
    potential: &[f64],
) -> Result<Vec<OperatorMatrix>> {
    if potential.len() != cube.site_count() {
        return Err(Error::Dimension {
            expected: cube.site_count(),
            got: potential.len(),
        });
    }
    partition
        .cubes
        .iter()
        .map(|sub| build_lattice_hamiltonian(sub, &restrict_potential(cube, sub, potential)))
        .collect()
}

/// Single-site profile `u` of the continuum couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpProfile {
    /// Indicator of the unit cell `(n - 1/2, n + 1/2]^d`.
    #[default]
    Indicator,
    /// Product tent `Π_j max(0, 1 - |x_j - n_j|)`.
    Tent,
}

impl BumpProfile {
    fn axis_weights(&self, x: f64) -> [(i64, f64); 2] {
        match self {
            BumpProfile::Indicator => [((x - 0.5).ceil() as i64, 1.0), (0, 0.0)],
            BumpProfile::Tent => {
                let f = x.floor();
                let t = x - f;
                [(f as i64, 1.0 - t), (f as i64 + 1, t)]
            }
        }
    }
}

/// Dirichlet finite-difference `-Δ` on the box grid plus the multiplication
/// operator `Σ_n ω_n u(x - n)` over integer points of the box.
pub fn build_continuum_hamiltonian(
    bx: &ContinuumBox,
    bump: BumpProfile,
    potential: &[f64],
) -> Result<OperatorMatrix> {
    if bx.spacing >= 1.0 {
        return Err(Error::Resolution { h: bx.spacing });
    }
    let expected = bx.integer_point_count();
    if potential.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: potential.len(),
        });
    }
    let (field, coverage) = continuum_field(bx, bump, potential);
    if let Some((index, &min_coverage)) = coverage
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        if min_coverage <= 1e-12 {
            return Err(Error::Covering {
                min_coverage,
                index,
            });
        }
    }
    let d = bx.dimension;
    let m = bx.points_per_axis();
    let n = bx.grid_size();
    let inv_h2 = 1.0 / (bx.spacing * bx.spacing);
    let bandwidth = if d == 1 { 1 } else { bx.grid_stride(0) };
    let mut h = OperatorMatrix::zeros(n, bandwidth, OperatorKind::Continuum(*bx));
    for i in 0..n {
        h.set(i, i, 2.0 * d as f64 * inv_h2 + field[i]);
        let mut rest = i;
        for j in (0..d).rev() {
            let k = rest % m;
            rest /= m;
            if k + 1 < m {
                h.set(i + bx.grid_stride(j), i, -inv_h2);
            }
        }
    }
    Ok(h)
}

// Potential and bump coverage Σ_n u(x - n) at every grid point.
fn continuum_field(bx: &ContinuumBox, bump: BumpProfile, potential: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = bx.dimension;
    let m = bx.points_per_axis();
    let per_axis = bx.integer_points_per_axis();
    let n = bx.grid_size();
    let mut field = vec![0.0; n];
    let mut coverage = vec![0.0; n];
    let ranges: Vec<(i64, i64)> = (0..d).map(|j| bx.integer_range(j)).collect();
    for i in 0..n {
        let mut ks = [0usize; 3];
        let mut rest = i;
        for j in (0..d).rev() {
            ks[j] = rest % m;
            rest /= m;
        }
        let weights: Vec<[(i64, f64); 2]> = (0..d)
            .map(|j| bump.axis_weights(bx.grid_coordinate(j, ks[j])))
            .collect();
        // Enumerate the (at most 2^d) integer points with nonzero weight.
        for combo in 0..(1usize << d) {
            let mut w = 1.0;
            let mut idx = 0usize;
            let mut inside = true;
            for j in 0..d {
                let (nj, wj) = weights[j][(combo >> j) & 1];
                let (lo, hi) = ranges[j];
                if wj == 0.0 || nj < lo || nj > hi {
                    inside = false;
                    break;
                }
                w *= wj;
                idx = idx * per_axis + (nj - lo) as usize;
            }
            if inside {
                field[i] += w * potential[idx];
                coverage[i] += w;
            }
        }
    }
    (field, coverage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::cube::CubeSpec;
    use crate::model::disorder::{sample_potential, DisorderSpec};
    use std::collections::HashSet;

    #[test]
    fn two_site_chain() {
        let c = LatticeCube::centered(1, 1, [0; 3]).unwrap();
        let h = build_lattice_hamiltonian(&c, &[0.0, 0.0]).unwrap();
        assert_eq!(h.to_dense(), vec![0.0, 1.0, 1.0, 0.0]);
        let h = build_lattice_hamiltonian(&c, &[5.0, -3.0]).unwrap();
        assert_eq!(h.to_dense(), vec![5.0, 1.0, 1.0, -3.0]);
    }

    #[test]
    fn square_plaquette_degrees() {
        let c = LatticeCube::centered(2, 1, [0; 3]).unwrap();
        let h = build_lattice_hamiltonian(&c, &[0.0; 4]).unwrap();
        let d = h.to_dense();
        for i in 0..4 {
            assert_eq!(d[i * 4..i * 4 + 4].iter().sum::<f64>(), 2.0);
        }
    }

    #[test]
    fn adjacency_matches_neighbour_definition() {
        for dim in 1..=3 {
            let c = LatticeCube::with_side(dim, 3).unwrap();
            let h = build_lattice_hamiltonian(&c, &vec![0.0; c.site_count()]).unwrap();
            for i in 0..c.site_count() {
                for j in 0..c.site_count() {
                    let (a, b) = (c.site_of(i), c.site_of(j));
                    let dist: i64 = (0..3).map(|k| (a[k] - b[k]).abs()).sum();
                    let expect = if dist == 1 { 1.0 } else { 0.0 };
                    assert_eq!(h.get(i, j), expect);
                }
            }
        }
    }

    #[test]
    fn length_mismatch() {
        let c = LatticeCube::with_side(1, 4).unwrap();
        assert!(matches!(
            build_lattice_hamiltonian(&c, &[0.0; 3]),
            Err(Error::Dimension { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn partition_examples() {
        let c = LatticeCube::with_side(1, 16).unwrap();
        let p = partition_with_side(&c, 4).unwrap();
        assert_eq!(p.count, 4);
        let c2 = LatticeCube::with_side(2, 16).unwrap();
        assert_eq!(partition_with_side(&c2, 4).unwrap().count, 16);
        let p = partition_subcubes(&c, 0.7).unwrap();
        assert_eq!((p.requested_side, p.side, p.count), (7, 4, 4));
    }

    #[test]
    fn partition_is_exact_cover() {
        for (d, side, ell) in [(1, 16, 4), (2, 12, 4), (3, 6, 3), (2, 10, 5)] {
            let c = LatticeCube::with_side(d, side).unwrap();
            let p = partition_with_side(&c, ell).unwrap();
            let mut seen = HashSet::new();
            for sub in &p.cubes {
                for s in sub.sites() {
                    assert!(c.contains(&s));
                    assert!(seen.insert(s), "site {s:?} covered twice");
                }
            }
            assert_eq!(seen.len(), c.site_count());
        }
    }

    #[test]
    fn degenerate_partition() {
        let c = LatticeCube::with_side(1, 7).unwrap();
        assert!(matches!(
            partition_with_side(&c, 3),
            Err(Error::DegeneratePartition { .. })
        ));
        assert!(partition_subcubes(&c, 1.5).is_err());
    }

    #[test]
    fn single_subcube_is_global_operator() {
        let c = LatticeCube::with_side(2, 4).unwrap();
        let pot = sample_potential(&DisorderSpec::uniform(3.0).unwrap(), &CubeSpec::Lattice(c), 3)
            .unwrap();
        let p = partition_with_side(&c, 4).unwrap();
        let subs = build_subcube_hamiltonians(&c, &p, &pot).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].to_dense(), build_lattice_hamiltonian(&c, &pot).unwrap().to_dense());
    }

    #[test]
    fn subcube_diagonals_concatenate() {
        let c = LatticeCube::with_side(1, 16).unwrap();
        let pot = sample_potential(&DisorderSpec::uniform(4.0).unwrap(), &CubeSpec::Lattice(c), 11)
            .unwrap();
        let p = partition_with_side(&c, 4).unwrap();
        let subs = build_subcube_hamiltonians(&c, &p, &pot).unwrap();
        let joined: Vec<f64> = subs.iter().flat_map(|h| h.diagonal()).collect();
        assert_eq!(joined, build_lattice_hamiltonian(&c, &pot).unwrap().diagonal());
    }

    #[test]
    fn continuum_resolution_error() {
        let bx = ContinuumBox::new(1, 5.0, 1.0).unwrap();
        assert!(matches!(
            build_continuum_hamiltonian(&bx, BumpProfile::Indicator, &[0.0; 5]),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn indicator_coverage_on_odd_box() {
        let bx = ContinuumBox::new(2, 5.0, 0.25).unwrap();
        let (_, cov) = continuum_field(&bx, BumpProfile::Indicator, &vec![0.0; 25]);
        assert!(cov.iter().all(|&c| c == 1.0));
        // Even boxes leave a half cell uncovered by the indicator...
        let even = ContinuumBox::new(1, 4.0, 0.25).unwrap();
        assert!(matches!(
            build_continuum_hamiltonian(&even, BumpProfile::Indicator, &[0.0; 4]),
            Err(Error::Covering { .. })
        ));
        // ...but not by the tent.
        assert!(build_continuum_hamiltonian(&even, BumpProfile::Tent, &[0.0; 4]).is_ok());
    }

    #[test]
    fn continuum_stencil() {
        let bx = ContinuumBox::new(2, 3.0, 0.5).unwrap();
        let h = build_continuum_hamiltonian(&bx, BumpProfile::Indicator, &[0.0; 9]).unwrap();
        assert_eq!(h.size(), 36);
        assert_eq!(h.bandwidth(), 6);
        assert_eq!(h.get(0, 0), 16.0);
        assert_eq!(h.get(1, 0), -4.0);
        assert_eq!(h.get(6, 0), -4.0);
        assert_eq!(h.get(6, 5), 0.0);
        assert_eq!(h.symmetry_defect(), 0.0);
    }
}
