//! Lattice Boltzmann solver on cuboid D3Q27 grids.
//!
//! The velocity set lives on an orthorhombic lattice with spacings
//! `(1, r, s)`; collision relaxes either central moments (3DCCM) or raw
//! moments (3DCRM) with equilibria corrections that restore the isotropy
//! of the viscous stress for `r, s != 1`. Streaming stays lock-step: every
//! population hops exactly one node per step in its direction.
//!
//! Module layout follows the pipeline:
//! [`lattice`] (velocity set and the P/S mappings) -> [`central_moments`]
//! (frame shifts) -> [`collision`] (relaxation, corrections, strain-rate
//! recovery) -> [`domain`] (storage, streaming, walls) -> [`solver`]
//! (time stepping) -> [`validation`] (analytical references, error norms,
//! stability sweeps).

pub mod central_moments;
pub mod collision;
pub mod domain;
pub mod error;
pub mod lattice;
pub mod solver;
pub mod validation;

pub use central_moments::FrameVelocity;
pub use collision::{
    CollisionVariant, CorrectionCoefficients, CorrectionMode, NodeState, RelaxationSchedule,
};
pub use domain::{BoundarySpec, FaceCondition, HydroFieldSet, PopulationField};
pub use error::Error;
pub use lattice::{Frame, LatticeSpec, MomentVector};
pub use solver::{Forcing, RunOutcome, RunReport, SimulationConfig, SimulationState};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
