//! Transient dynamics of phase-modulated cut-off matter waves.
//!
//! The crate evaluates the exact transmitted wavefunction of a cut-off initial
//! state released at `t = 0` through a finite-range potential, written as a sum
//! of Moshinsky functions over the poles of the initial state's Q-transform and
//! the resonance poles of the potential. Around that core sit the closed-form
//! approximations (quantum beats at the origin, two-level Rabi asymptotics),
//! transient-feature extraction (front peaks, delay-time, phase-time, spectral
//! frequencies) and an independent Crank-Nicolson grid integrator used as an
//! oracle.
//!
//! Units are fixed throughout: lengths in Å, wavenumbers in Å⁻¹, energies in eV,
//! times in ps and angular frequencies in rad/ps.

// `!(a > b)` is used deliberately to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod asymptotics;
pub mod error;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod specfun;
pub mod trace;
pub mod validation;

pub use error::{Error, Result};
pub use model::{
    DeltaWell, FreeTransmission, Frequencies, ModelConfig, ModulatedPacket, PhysicsConstants, PoleExpansion,
    PotentialModel, QPole, Resonance, ResonanceData, Transmission,
};
pub use num_complex::Complex64;
pub use solver::{Components, EvaluationPoint};
pub use trace::{Axis, ComplexTrace, DensityTrace, ParamRecord};

/// Library version string embedded in run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
