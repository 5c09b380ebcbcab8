//! Multiphoton Jaynes-Cummings model toolkit.
//!
//! A two-level atom exchanges `m` photons per transition with a single cavity
//! mode at exact resonance. The crate provides:
//!
//! - [`states`]: initial field states (coherent, k-photon coherent,
//!   orthogonal-even, even/odd cats) on a truncated Fock grid, plus the atom
//!   superposition state;
//! - [`dynamics`]: closed-form evolution amplitudes in scaled time `T = λt`,
//!   with or without the dynamic Stark shift (EHA / MEHA);
//! - [`observables`]: field moments, atomic inversion, quadrature and
//!   amplitude-squared fluctuation factors, rescaled factors that mirror the
//!   one-photon inversion, revival-time predictors and a revival-center
//!   detector, and observable sweeps over a time grid;
//! - [`oracle`]: an independent fixed-step Runge-Kutta integrator over the
//!   explicit joint-basis generator, used to verify the closed forms.

pub mod dynamics;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod states;

pub use dynamics::{evolve, evolve_eha, evolve_meha, h, Approach, JointState, ModelConfig};
pub use error::Error;
pub use observables::{FluctuationOrder, FluctuationPair, Observable, TimeSeries};
pub use states::{AtomState, FieldState, Parity};

pub type Result<T> = std::result::Result<T, Error>;
