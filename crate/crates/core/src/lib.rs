//! Desk-scale quantum state-vector simulation.
//!
//! The crate covers the register model and gate kernels ([`qstate`],
//! [`gates`]), circuit construction ([`circuits`]), the textbook query and
//! phase-estimation algorithms ([`algorithms`]), order finding and factoring
//! ([`shor`]) on top of exact integer routines ([`numtheory`]), the classical
//! ciphers they threaten ([`crypto`]) and single-qubit decoherence with the
//! three-qubit phase-flip code ([`noise`]).
//!
//! Qubit 0 is the least significant bit of a basis index throughout.

pub mod algorithms;
pub mod circuits;
pub mod cli;
pub mod crypto;
pub mod error;
pub mod gates;
pub mod noise;
pub mod numtheory;
pub mod qstate;
pub mod shor;

pub use error::{Error, Result};
pub use qstate::{Amplitude, BasisIndex, StateVector};
