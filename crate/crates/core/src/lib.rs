//! Rabi oscillations of a strongly driven two-level system, computed both
//! with a classical sinusoidal drive and with the drive replaced by a
//! quantized cavity mode (the quantum Rabi model).
//!
//! All quantities are dimensionless: energies in units of the drive (or
//! cavity) quantum, times in units of its inverse angular frequency.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod specfun;
pub mod spectra;

pub use error::{Error, Result};
