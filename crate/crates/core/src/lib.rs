//! Entanglement entropy of fermionic Slater determinants and the erasure of
//! entanglement between jointly excited single-particle states.

pub mod bell;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod linalg;
pub mod many_body;
pub mod models;
pub mod seed;
pub mod two_particle;

pub use error::{Error, Result};
