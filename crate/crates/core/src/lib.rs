//! Simulation and analysis of the linear-optical "no-touching" W-state source.
//!
//! N independent particles (one per subsystem) pass through local unitaries,
//! a fixed path permutation and a final local unitary on the first subsystem.
//! Post-selecting on one particle in each dual-rail output qubit leaves the
//! N-qubit W state, with a success probability that is identical for bosons
//! and fermions.
//!
//! The crate is layered:
//!
//! - [`fock`]: permanents, determinants and Fock transition amplitudes.
//! - [`circuit`]: mode layout and the staged `(3N-2)`-mode protocol unitary.
//! - [`protocol`]: balanced parameters, simulation with post-selection, fidelity.
//! - [`efficiency`]: closed-form success probability, its optimum and asymptotics.
//! - [`oracle`]: brute-force creation-operator expansion used to cross-check the kernels.
//! - [`verify`]: the cross-module check suite behind `wstate verify`.
//! - [`cli`]: argument parsing and command implementations for the `wstate` binary.
//!
//! ```
//! use wstate::{protocol, ParticleStatistics, ProtocolParams};
//!
//! let params = ProtocolParams::balanced(3, 0.65, ParticleStatistics::Boson).unwrap();
//! let state = protocol::run_protocol(&params).unwrap();
//! let fid = protocol::fidelity(&state, &protocol::w_state(3).unwrap()).unwrap();
//! assert!((fid - 1.0).abs() < 1e-10);
//! ```

pub mod circuit;
pub mod cli;
pub mod efficiency;
mod error;
pub mod fock;
pub mod linalg;
pub mod oracle;
pub mod protocol;
pub mod tolerance;
pub mod verify;

pub use circuit::{GCompletion, ModeLayout, ProtocolParams};
pub use efficiency::{EfficiencyCurve, EfficiencyRow};
pub use error::{Error, Result};
pub use fock::{Amplitude, FockConfiguration, ModeUnitary, ParticleStatistics};
pub use protocol::PostSelectedState;

pub use num_complex::Complex64;
