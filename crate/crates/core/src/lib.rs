//! Driven quantum emitters coupled to a one-dimensional waveguide: steady-state
//! transport, photon statistics, multilevel pump-probe and EIT response, and
//! chains of emitters with collective coupling.

pub mod error;
pub mod trace;
pub mod integrate;
pub mod lindblad;
mod linalg;
pub mod emitter;
pub mod statistics;
pub mod multilevel;
pub mod chain;

pub use error::{Error, Result};
pub use num_complex::Complex64;
