//! Periodic thermodynamics of a driven spin.
//!
//! A spin `J` in a static field along `z` is driven by an oscillating field
//! and weakly coupled to a bath of harmonic oscillators. The pipeline is:
//!
//! 1. [`floquet`]: quasienergies and Floquet functions,
//! 2. [`bath`]: golden-rule transition rates between Floquet states,
//! 3. [`steady_state`]: the stationary occupation probabilities,
//! 4. [`observables`]: the cycle-averaged ("quasithermal") magnetization,
//! 5. [`sweep`]: scans over the drive amplitude with CSV output.
//!
//! Units: `hbar = 1` and the drive frequency is `1`, so the period is `2 pi`
//! and all energies are in units of the photon energy.
//!
//! Everything numerical is generic over [`Real`]; the `*64` aliases below
//! fix the scalar to `f64`.

pub mod bath;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod observables;
pub mod pipeline;
pub mod scalar;
pub mod spin;
pub mod steady_state;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SpinSystem64 = spin::SpinSystem<f64>;
pub type DriveConfig64 = floquet::DriveConfig<f64>;
pub type FloquetSolution64 = floquet::FloquetSolution<f64>;
pub type FourierElements64 = floquet::FourierElements<f64>;
pub type BathSpec64 = bath::BathSpec<f64>;
pub type RateMatrix64 = bath::RateMatrix<f64>;
pub type OccupationDistribution64 = steady_state::OccupationDistribution<f64>;
pub type MagnetizationRecord64 = observables::MagnetizationRecord<f64>;
pub type SweepPlan64 = sweep::SweepPlan<f64>;
pub type SweepResult64 = sweep::SweepResult<f64>;
