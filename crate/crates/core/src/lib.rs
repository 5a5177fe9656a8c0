//! Synthetic same/different stimulus generation and evaluation toolkit.
//!
//! `objectgen` makes 64×64 objects, `composer` places them on 224×224
//! canvases and writes datasets, `datamodel` holds the shared file formats,
//! and `metrics` / `embedanalysis` score model outputs.

pub mod composer;
pub mod datamodel;
pub mod embedanalysis;
pub mod error;
pub mod metrics;
pub mod objectgen;
pub mod raster;
pub mod rng;

pub use error::{Error, Result};
