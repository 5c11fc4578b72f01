//! Equivariant proximities and uniformities on finite G-spaces, plus a
//! symbolic model of the rationals under order automorphisms.

pub mod equivariant;
pub mod error;
pub mod gaction;
pub mod metricprox;
pub mod ordered;
pub mod proximity;
pub mod rationals;
pub mod report;
pub mod setrel;
pub mod uniformity;

pub use error::{Error, Result};
