//! Dissipative protection of the zero-energy eigenstate of a driven
//! three-level double quantum dot, and the dissipative Deutsch protocol
//! built on it.
//!
//! Energies and rates are in µeV with ħ = 1; public times are in ps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod deutsch;
pub mod dynamics;
pub mod error;
pub mod effective;
pub mod evolution;
pub mod integrator;
pub mod model;

#[cfg(test)]
mod testutil;

pub use analytic::{asymptotic_state, dark_state_check, relaxation_time, stationary_fidelity, AsymptoticState};
pub use deutsch::{
    delta_p00, oracle_phase, prepare_protected, readout_config, readout_times, run_deutsch, Answer, BinaryFunction,
    DeutschVerdict, OraclePhase, PrepMode,
};
pub use dynamics::{eigensystem, master_rhs, EigenSystem, Frame};
pub use effective::{effective_channels, effective_rhs, effective_steady_state, oscillation_phases, rwa_validity};
pub use error::{Error, Result};
pub use evolution::{evolve, evolve_at, steady_state_numeric, Superoperator, Trajectory};
pub use integrator::Tolerances;
pub use model::{DensityMatrix, PureState3, SystemParams, HBAR_UEV_PS};
