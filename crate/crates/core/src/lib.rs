//! Spiral complete-coverage path planning for multiply connected planar
//! regions.
//!
//! The pipeline maps the region conformally onto a disc or annulus with
//! concentric circular-arc slits, picks a family of concentric circles whose
//! preimages are spaced by a target distance, threads a slit-avoiding spiral
//! between them, pulls the spiral back and splices the boundary loops in.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod isoparam;
pub mod metrics;
pub mod slitmap;
pub mod spiral;

pub use error::{Error, Result};
