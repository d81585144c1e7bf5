//! Classical electron vortices in a uniform magnetic field.
//!
//! Individual electrons follow exact cyclotron orbits; a vortex is a
//! rotationally symmetric set of such orbits sharing one canonical angular
//! momentum. The crate provides the single-orbit propagator and numerical
//! integrators, angular-momentum bookkeeping, ensemble averages, circulation
//! and current-profile analysis, closed-form energy relations, and a
//! verification suite tying them together.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod app;
pub mod config;
pub mod currents;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod oracles;
pub mod verify;

pub use error::{Error, Result};
