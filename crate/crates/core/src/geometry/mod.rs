//! Polygon primitives and the measurements the center-mask representation is
//! built on: center points, polar minimum distance, ray distances and signed
//! contour offsetting.
//!
//! Coordinates are image coordinates (origin top-left, `y` grows downward).
//! Orientation is normalized so that the shoelace area is positive, which
//! puts the interior on the left of every edge in the `(x, y)` plane.

mod measure;
mod offset;
mod polygon;

pub use measure::{
    center_point, polar_min_distance, ray_distances, sample_centers, CenterSample, RayDirection,
    RAY_DIRECTIONS,
};
pub use offset::{offset_polygon, MITER_LIMIT};
pub use polygon::{point_in_polygon, polygon_area, BBox, Point, TextPolygon};

pub(crate) use polygon::signed_area as polygon_signed_area;

use thiserror::Error;

/// Default inward shrink factor applied to the PMD when building a center mask.
pub const DEFAULT_MU: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 distinct vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon has a non-finite coordinate")]
    NonFinite,
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygon is self-intersecting (edges {0} and {1} cross)")]
    SelfIntersecting(usize, usize),
    #[error("polygon has a degenerate (zero-width) bounding box")]
    DegeneratePolygon,
    #[error("no interior chord found at fraction {0}")]
    ChordMiss(f64),
    #[error("point ({x}, {y}) lies outside the polygon")]
    PointOutside { x: f64, y: f64 },
    #[error("ray in direction {0:?} has no boundary intersection")]
    NoIntersection(RayDirection),
    #[error("center count must be odd and >= 1, got {0}")]
    InvalidCenterCount(usize),
    #[error("fraction {0} must lie strictly inside (0, 1)")]
    InvalidFraction(f64),
}
