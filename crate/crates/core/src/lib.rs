pub mod calibration;
pub mod classifier;
pub mod cli;
pub mod data;
pub mod density;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod rng;
pub mod selection;
pub mod theory;

pub use error::{CastError, Result};
