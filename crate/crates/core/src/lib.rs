//! Random polytopes spanned by block-beta distributed points in products of
//! Euclidean balls.

pub mod asymptotics;
pub mod error;
pub mod hull;
pub mod metacube;
pub mod model;
pub mod report;
pub mod sampler;

pub use error::{Error, Result};
pub use model::{predict_rate, support_function, BetaParams, BlockStructure, RatePrediction};
