//! Experiment runner and verification front end for random block-beta
//! polytopes.

pub mod app;
pub mod config;
pub mod error;
pub mod fit;
pub mod plot;
pub mod record;
pub mod simulate;
pub mod verify;

pub use error::{CliError, Result};
