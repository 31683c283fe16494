//! Finite-volume geometry: lattice cubes and continuum boxes.
//!
//! Sites and grid points are enumerated lexicographically with the first
//! coordinate most significant, so index `i` of a cube with edge `s` in
//! `d = 3` corresponds to `(i / s², (i / s) % s, i % s)` offset by the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℤ^d padded with zeros up to three coordinates.
pub type Site = [i64; 3];

/// Cube of lattice sites `origin + {0, .., side-1}^d`.
///
/// `LatticeCube::centered(d, l)` is the cube with `x_j ∈ {-l+1, .., l}`
/// and `(2l)^d` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCube {
    pub dimension: usize,
    pub origin: Site,
    pub side: usize,
}

impl LatticeCube {
    pub fn new(dimension: usize, origin: Site, side: usize) -> Result<Self> {
        check_dimension(dimension)?;
        if side == 0 {
            return Err(Error::Config("lattice cube side must be at least 1".into()));
        }
        if origin[dimension..].iter().any(|&c| c != 0) {
            return Err(Error::Config(
                "origin has nonzero coordinates beyond the dimension".into(),
            ));
        }
        Ok(Self {
            dimension,
            origin,
            side,
        })
    }

    /// Cube with sites `{-half_side+1, .., half_side}^d` around `anchor`.
    pub fn centered(dimension: usize, half_side: usize, anchor: Site) -> Result<Self> {
        if half_side == 0 {
            return Err(Error::Config("half-side must be at least 1".into()));
        }
        let mut origin = [0; 3];
        for j in 0..dimension.min(3) {
            origin[j] = anchor[j] - half_side as i64 + 1;
        }
        Self::new(dimension, origin, 2 * half_side)
    }

    /// Cube with `side` sites per edge, placed symmetrically about the origin
    /// (for even sides this coincides with `centered(d, side / 2, 0)`).
    pub fn with_side(dimension: usize, side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::Config("lattice cube side must be at least 1".into()));
        }
        let lo = -((side as i64 - 1) / 2);
        let mut origin = [0; 3];
        for c in origin.iter_mut().take(dimension.min(3)) {
            *c = lo;
        }
        Self::new(dimension, origin, side)
    }

    pub fn site_count(&self) -> usize {
        self.side.pow(self.dimension as u32)
    }

    /// Stride of coordinate `j` in the lexicographic enumeration.
    pub fn stride(&self, j: usize) -> usize {
        self.side.pow((self.dimension - 1 - j) as u32)
    }

    pub fn contains(&self, site: &Site) -> bool {
        (0..self.dimension).all(|j| {
            let rel = site[j] - self.origin[j];
            rel >= 0 && (rel as usize) < self.side
        }) && site[self.dimension..].iter().all(|&c| c == 0)
    }

    pub fn index_of(&self, site: &Site) -> Option<usize> {
        if !self.contains(site) {
            return None;
        }
        Some(
            (0..self.dimension)
                .map(|j| (site[j] - self.origin[j]) as usize * self.stride(j))
                .sum(),
        )
    }

    pub fn site_of(&self, index: usize) -> Site {
        debug_assert!(index < self.site_count());
        let mut site = [0; 3];
        let mut rest = index;
        for j in (0..self.dimension).rev() {
            site[j] = self.origin[j] + (rest % self.side) as i64;
            rest /= self.side;
        }
        site
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.site_count()).map(move |i| self.site_of(i))
    }
}

/// Continuum box `center + (-L/2, L/2]^d` discretized by a cell-centered
/// grid of spacing `h`; grid point `k` along an axis sits at
/// `-L/2 + (k + 1/2) h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumBox {
    pub dimension: usize,
    pub length: f64,
    pub spacing: f64,
    pub center: Site,
}

impl ContinuumBox {
    pub fn new(dimension: usize, length: f64, spacing: f64) -> Result<Self> {
        check_dimension(dimension)?;
        if !(length >= 1.0) || !length.is_finite() {
            return Err(Error::Config(format!("box length must be >= 1, got {length}")));
        }
        if !(spacing > 0.0) {
            return Err(Error::Config(format!("grid spacing must be positive, got {spacing}")));
        }
        let ratio = length / spacing;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
            return Err(Error::Config(format!(
                "box length {length} is not an integer multiple of spacing {spacing}"
            )));
        }
        Ok(Self {
            dimension,
            length,
            spacing,
            center: [0; 3],
        })
    }

    /// Grid points per axis.
    pub fn points_per_axis(&self) -> usize {
        (self.length / self.spacing).round() as usize
    }

    pub fn grid_size(&self) -> usize {
        self.points_per_axis().pow(self.dimension as u32)
    }

    pub fn grid_stride(&self, j: usize) -> usize {
        self.points_per_axis().pow((self.dimension - 1 - j) as u32)
    }

    /// Coordinate of grid index `k` along axis `j`.
    pub fn grid_coordinate(&self, j: usize, k: usize) -> f64 {
        self.center[j] as f64 - 0.5 * self.length + (k as f64 + 0.5) * self.spacing
    }

    /// Integer points along one axis inside `(-L/2, L/2]`, shifted by the center.
    pub fn integer_range(&self, j: usize) -> (i64, i64) {
        let half = 0.5 * self.length;
        let lo = (-half).floor() as i64 + 1;
        let hi = half.floor() as i64;
        (lo + self.center[j], hi + self.center[j])
    }

    pub fn integer_points_per_axis(&self) -> usize {
        let (lo, hi) = self.integer_range(0);
        (hi - lo + 1) as usize
    }

    /// Number of integer points `n ∈ Λ ∩ ℤ^d` carrying a random coupling.
    pub fn integer_point_count(&self) -> usize {
        self.integer_points_per_axis().pow(self.dimension as u32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dimension as i32)
    }
}

/// Either flavor of finite volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "snake_case")]
pub enum CubeSpec {
    Lattice(LatticeCube),
    Continuum(ContinuumBox),
}

impl CubeSpec {
    pub fn dimension(&self) -> usize {
        match self {
            CubeSpec::Lattice(c) => c.dimension,
            CubeSpec::Continuum(b) => b.dimension,
        }
    }

    /// Matrix dimension of the finite-volume operator.
    pub fn operator_size(&self) -> usize {
        match self {
            CubeSpec::Lattice(c) => c.site_count(),
            CubeSpec::Continuum(b) => b.grid_size(),
        }
    }

    /// Number of i.i.d. couplings `ω_n` the cube consumes.
    pub fn potential_len(&self) -> usize {
        match self {
            CubeSpec::Lattice(c) => c.site_count(),
            CubeSpec::Continuum(b) => b.integer_point_count(),
        }
    }

    /// Actual volume: site count for the lattice, `L^d` for the continuum.
    pub fn volume(&self) -> f64 {
        match self {
            CubeSpec::Lattice(c) => c.site_count() as f64,
            CubeSpec::Continuum(b) => b.volume(),
        }
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::Config(format!("dimension must be 1, 2 or 3, got {d}")))
    }
}
