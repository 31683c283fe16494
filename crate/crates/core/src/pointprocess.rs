//! Rescaled spectral windows and the eigenvalue counting processes
//! `η_{L,E}`, `η_{p,E,L}` and their superposition `ζ`.
//!
//! A test set `B` is a finite union of disjoint half-open intervals. Around
//! an energy `E` and for a volume normalization `V` the process counts the
//! eigenvalues in `E + B/V`. Sub-cube processes use the global `V`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CubeSpec, OperatorMatrix};
use crate::spectral::{count_in, eigenvalues_in, next_eigenvalue_above};

/// Finite union of pairwise disjoint half-open intervals `(a_i, b_i]`,
/// sorted by left endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct Window {
    intervals: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for Window {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Window::new(v)
    }
}

impl From<Window> for Vec<(f64, f64)> {
    fn from(w: Window) -> Self {
        w.intervals
    }
}

impl Window {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a <= b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::Interval { a, b });
            }
        }
        intervals.retain(|&(a, b)| b > a);
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::Config(format!(
                    "window intervals ({}, {}] and ({}, {}] overlap",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    /// `(-len/2, len/2]`.
    pub fn centered(len: f64) -> Result<Self> {
        Self::interval(-0.5 * len, 0.5 * len)
    }

    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure `|B|`.
    pub fn length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// `sup B - inf B`.
    pub fn diameter(&self) -> f64 {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(f), Some(l)) => l.1 - f.0,
            _ => 0.0,
        }
    }

    /// Largest distance of a point of `B` from the origin.
    pub fn radius(&self) -> f64 {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(f), Some(l)) => f.0.abs().max(l.1.abs()),
            _ => 0.0,
        }
    }

    /// Union with a disjoint window.
    pub fn disjoint_union(&self, other: &Window) -> Result<Window> {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Window::new(all)
    }

    /// True when no point belongs to both windows.
    pub fn is_disjoint(&self, other: &Window) -> bool {
        self.intervals.iter().all(|&(a, b)| {
            other
                .intervals
                .iter()
                .all(|&(c, d)| a.max(c) >= b.min(d))
        })
    }
}

/// `E + B/V`, interval by interval.
pub fn rescale_window(b: &Window, energy: f64, volume: f64) -> Result<Window> {
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::Scale(volume));
    }
    Ok(Window {
        intervals: b
            .intervals
            .iter()
            .map(|&(lo, hi)| (energy + lo / volume, energy + hi / volume))
            .collect(),
    })
}

/// Eigenvalue count of `h` in an already rescaled window.
pub fn count_window(h: &OperatorMatrix, w: &Window) -> Result<usize> {
    w.intervals
        .iter()
        .try_fold(0, |acc, &(a, b)| Ok(acc + count_in(h, a, b)?))
}

/// `η(B) = #{λ ∈ σ(H) : λ ∈ E + B/V}`.
pub fn eta_count(h: &OperatorMatrix, energy: f64, b: &Window, volume: f64) -> Result<usize> {
    count_window(h, &rescale_window(b, energy, volume)?)
}

/// `ζ(B) = Σ_p η_p(B)` over the sub-cube operators of one partition.
pub fn superpose(subcubes: &[OperatorMatrix], energy: f64, b: &Window, volume: f64) -> Result<usize> {
    if subcubes.is_empty() {
        return Err(Error::EmptyEnsemble("superposition over zero sub-cubes".into()));
    }
    let w = rescale_window(b, energy, volume)?;
    subcubes.iter().try_fold(0, |acc, h| Ok(acc + count_window(h, &w)?))
}

/// Rescaled eigenvalues `V(λ - E)` inside a window and their forward gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledPoints {
    pub points: Vec<f64>,
    /// Distance from each point to the next eigenvalue of `H` in rescaled
    /// units; the successor may lie outside the window. The top eigenvalue
    /// of `H` has no gap.
    pub gaps: Vec<f64>,
}

/// Points of the process in `window`, located by bisection to `tol`
/// (in rescaled units).
pub fn extract_rescaled_points(
    h: &OperatorMatrix,
    energy: f64,
    window: &Window,
    volume: f64,
    tol: f64,
) -> Result<RescaledPoints> {
    let w = rescale_window(window, energy, volume)?;
    let etol = tol / volume;
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for &(a, b) in &w.intervals {
        let ev = eigenvalues_in(h, a, b, etol)?;
        if ev.is_empty() {
            continue;
        }
        let next = next_eigenvalue_above(h, b, etol);
        for (i, &lam) in ev.iter().enumerate() {
            points.push(volume * (lam - energy));
            let succ = ev.get(i + 1).copied().or(next);
            if let Some(s) = succ {
                gaps.push(volume * (s - lam));
            }
        }
    }
    Ok(RescaledPoints { points, gaps })
}

/// Volume normalization `V` for a finite volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMap {
    /// Site count for the lattice, `L^d` for the continuum box.
    #[default]
    VolumeNormalized,
    /// `L^d` with `L` the half-side of the lattice cube, or the box length.
    LiteralLd,
    /// `L` itself (half-side on the lattice, box length in the continuum).
    LiteralL1,
}

impl VolumeMap {
    pub fn volume(&self, cube: &CubeSpec) -> f64 {
        let d = cube.dimension() as i32;
        let l = match cube {
            CubeSpec::Lattice(c) => c.side as f64 / 2.0,
            CubeSpec::Continuum(b) => b.length,
        };
        match self {
            VolumeMap::VolumeNormalized => cube.volume(),
            VolumeMap::LiteralLd => l.powi(d),
            VolumeMap::LiteralL1 => l,
        }
    }
}

/// Smallest scale `L` in `ladder` with
/// `(ext(A) + ext(B)) / V(L) < |E - E'| / 2`, where `ext` is the larger of
/// the diameter and the radius about the origin. At such `L` the windows
/// `E + A/V` and `E' + B/V` are at distance at least `|E - E'|/2`.
pub fn min_scale_for_disjointness(
    a: &Window,
    b: &Window,
    energy: f64,
    energy_prime: f64,
    ladder: impl IntoIterator<Item = u64>,
    volume: impl Fn(u64) -> f64,
) -> Result<u64> {
    let alpha = (energy - energy_prime).abs();
    if alpha == 0.0 {
        return Err(Error::DisjointnessUndefined(energy));
    }
    let spread = a.diameter().max(a.radius()) + b.diameter().max(b.radius());
    ladder
        .into_iter()
        .find(|&l| {
            let v = volume(l);
            v > 0.0 && spread / v < 0.5 * alpha
        })
        .ok_or_else(|| {
            Error::Config("no scale in the ladder separates the rescaled windows".into())
        })
}
