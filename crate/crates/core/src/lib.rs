//! Achievable-rate modeling for point-to-point MIMO links whose receive
//! fronthaul quantizes each eigen-stream with a low-resolution scalar ADC.
//!
//! The crate covers the full experiment pipeline:
//!
//! * [`quantizer`] designs Lloyd-Max codebooks for unit Gaussian input and
//!   maps resolution to a relative distortion factor.
//! * [`rate`] evaluates per-stream and sum rates under that distortion.
//! * [`channel`] draws Rician channel realizations and extracts eigen-streams.
//! * [`allocation`] solves the joint bit/power allocation by several schemes,
//!   from water-filling bounds to an exhaustive oracle.
//! * [`simulation`] runs seeded Monte-Carlo sweeps and serializes them as CSV.
//! * [`cli`] (feature `cli`) exposes the above as a command-line tool.

pub mod allocation;
pub mod channel;
#[cfg(feature = "cli")]
pub mod cli;
mod error;
pub mod fmt;
pub mod quantizer;
pub mod rate;
pub mod simulation;

pub use error::{Error, Result};
