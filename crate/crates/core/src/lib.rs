//! Region-filtering correlation tracking.
//!
//! A correlation-filter tracker whose filter is multiplied by a spatial map
//! before it touches the data. Training solves the map-constrained ridge
//! regression with ADMM in the Fourier domain; detection runs the learned
//! filter over a small scale pyramid.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod detection;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod model_update;
pub mod oracle;
pub mod solver;
pub mod spatial_map;
pub mod spectral;
pub mod synthetic;
pub mod tracker;

pub use config::TrackerConfig;
pub use error::{Error, Result};
pub use tracker::{run_sequence, BoundingBox, Tracker};
