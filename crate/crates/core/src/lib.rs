//! Numerical toolkit for one-dimensional scalar conservation laws
//! `∂_t u + ∂_x a(u) = 0`.
//!
//! The crate builds bounded weak solutions (entropic and non-entropic),
//! lifts them to their kinetic formulation, extracts entropy-production
//! measures, and checks quantitative Besov-regularity estimates with every
//! constant evaluated explicitly.

pub mod besov;
pub mod cli;
pub mod error;
pub mod fields;
pub mod flux_entropy;
pub mod interaction;
pub mod kinetic;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
