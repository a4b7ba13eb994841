//! A charged quantum particle confined to a cylinder threaded by a radial
//! magnetic field.
//!
//! In oscillator units the problem reduces to a family of harmonic wells
//! along the axis, one per angular momentum ℓ and spaced by `b`. Without spin
//! the dynamics is exact ([`spinless`]); with spin 1/2 the field couples
//! neighbouring wells, which [`perturbation`] solves to any order in the
//! coupling ε and [`oracle`] checks by brute-force diagonalization.

pub mod cli;
pub mod closed_forms;
pub mod error;
pub mod io;
pub mod oracle;
pub mod params;
pub mod perturbation;
pub mod series;
pub mod sho;
pub mod spin;
pub mod spinless;

pub use error::{Error, Result};
pub use params::{ConfigError, PhysicsConfig, ValidConfig};
pub use perturbation::{solve_perturbation, Branch, PerturbationSolution};
pub use spin::{SpinField, SpinorProfile, TwoStateSystem};
pub use spinless::{AngularProfile, ComplexField, FieldGrid};
