//! Grid discretization of the energy `E_ε(u) = ∫ ½|∇u|² + f(u)/ε²`, its
//! minimization under Dirichlet data, competitors and boundary data.

mod bc;
mod domain;
mod energy;
mod field;
mod init;
pub mod io;
mod solver;

use thiserror::Error;

pub use bc::{
    ansatz_disk_energy, boundary_energy, boundary_vortex_data, BcBounds, BcDescriptor, BoundaryMap, ClassSpec,
    DirichletBC, SigmaSpec,
};
pub use domain::{Domain, MIN_COUNT};
pub use energy::{cell_data, el_residual, energy, energy_gradient, CellData, Energy, Residual};
pub use field::{interpolate, GridField};
pub use init::{degree_ansatz_2d, harmonic_extension, initial_guess};
pub use solver::{
    default_step, minimize, perturbation_test, Perturbation, SolveOutcome, SolverConfig, StepRule, StopReason,
    TraceRow,
};

#[derive(Debug, Error)]
pub enum GlError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("solver diverged (non-finite energy) at iteration {iteration}")]
    Divergence { iteration: usize },
    #[error("missing file: {0}")]
    Missing(String),
    #[error("corrupt file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
