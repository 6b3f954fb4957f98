//! Center-mask (CM) and polar-minimum-distance (PMD) text representation.
//!
//! A text instance is encoded as its center mask, the instance polygon shrunk
//! inward by `mu * PMD`, where PMD is the distance from the polygon's center
//! point to its boundary. At inference only the center mask is segmented;
//! each detection is recovered by measuring the PMD of the mask contour itself
//! and pushing the contour back outward by that distance.

pub mod eval;
pub mod geometry;
pub mod io;
pub mod labels;
pub mod losses;
pub mod raster;
pub mod reconstruct;
pub mod synth;
pub mod trainer;

pub use geometry::{Point, TextPolygon};
