//! Graded Levin-Wen string nets: data validation, state spaces on surfaces,
//! plaquette and vertex projectors, and ground-state analysis.

pub mod cli;
pub mod error;
pub mod group;
pub mod lw_data;
pub mod operators;
pub mod state_space;
pub mod surface;

pub use error::{Error, Result};
