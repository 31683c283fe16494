//! Finite-volume random operators: geometry, disorder, and assembly.

pub mod cube;
pub mod disorder;
pub mod hamiltonian;
pub mod operator;

pub use cube::{ContinuumBox, CubeSpec, LatticeCube, Site};
pub use disorder::{sample_potential, DisorderFamily, DisorderSpec};
pub use hamiltonian::{
    build_continuum_hamiltonian, build_lattice_hamiltonian, build_subcube_hamiltonians,
    partition_subcubes, partition_with_side, restrict_potential, BumpProfile, SubcubePartition,
};
pub use operator::{OperatorKind, OperatorMatrix};

use crate::error::Result;

/// A random operator family on one finite volume.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub cube: CubeSpec,
    pub disorder: DisorderSpec,
    pub bump: BumpProfile,
}

/// One draw `ω` together with the global operator it defines.
#[derive(Debug, Clone)]
pub struct Realization {
    pub potential: Vec<f64>,
    pub hamiltonian: OperatorMatrix,
}

impl ModelSpec {
    pub fn lattice(cube: LatticeCube, disorder: DisorderSpec) -> Self {
        Self {
            cube: CubeSpec::Lattice(cube),
            disorder,
            bump: BumpProfile::Indicator,
        }
    }

    pub fn continuum(bx: ContinuumBox, disorder: DisorderSpec, bump: BumpProfile) -> Self {
        Self {
            cube: CubeSpec::Continuum(bx),
            disorder,
            bump,
        }
    }

    pub fn hamiltonian(&self, potential: &[f64]) -> Result<OperatorMatrix> {
        match &self.cube {
            CubeSpec::Lattice(c) => build_lattice_hamiltonian(c, potential),
            CubeSpec::Continuum(b) => build_continuum_hamiltonian(b, self.bump, potential),
        }
    }

    pub fn realize(&self, seed: u64) -> Result<Realization> {
        let potential = sample_potential(&self.disorder, &self.cube, seed)?;
        let hamiltonian = self.hamiltonian(&potential)?;
        Ok(Realization {
            potential,
            hamiltonian,
        })
    }
}
