use log::warn;
use serde::{Deserialize, Serialize};

use super::polygon::{point_in_polygon, BOUNDARY_EPS};
use super::{GeometryError, Point, TextPolygon};

/// The eight ray directions, in the fixed target order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RayDirection {
    Up,
    Down,
    Left,
    Right,
    LeftTop,
    RightTop,
    LeftDown,
    RightDown,
}

impl RayDirection {
    /// Unit vector in image coordinates (`y` down, so "up" is `-y`).
    pub fn unit(self) -> (f64, f64) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            RayDirection::Up => (0.0, -1.0),
            RayDirection::Down => (0.0, 1.0),
            RayDirection::Left => (-1.0, 0.0),
            RayDirection::Right => (1.0, 0.0),
            RayDirection::LeftTop => (-h, -h),
            RayDirection::RightTop => (h, -h),
            RayDirection::LeftDown => (-h, h),
            RayDirection::RightDown => (h, h),
        }
    }
}

pub const RAY_DIRECTIONS: [RayDirection; 8] = [
    RayDirection::Up,
    RayDirection::Down,
    RayDirection::Left,
    RayDirection::Right,
    RayDirection::LeftTop,
    RayDirection::RightTop,
    RayDirection::LeftDown,
    RayDirection::RightDown,
];

/// A sampled center point with its regression targets.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSample {
    pub point: Point,
    /// Position along the bounding-box width, in `(0, 1)`.
    pub fraction: f64,
    pub pmd: f64,
    /// Distances in [`RAY_DIRECTIONS`] order.
    pub ray_distances: [f64; 8],
}

/// Step used when the chord at the requested fraction misses the interior.
const FALLBACK_STEP: f64 = 0.02;

/// Midpoint of the vertical chord through the polygon at
/// `x = bbox.min_x + fraction * width`.
///
/// When the vertical line crosses the boundary more than twice, the longest
/// interior interval is used. If no interior chord exists at `fraction`,
/// nearby fractions are scanned in steps of 0.02, alternating sides.
pub fn center_point(poly: &TextPolygon, fraction: f64) -> Result<Point, GeometryError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(GeometryError::InvalidFraction(fraction));
    }
    let bb = poly.bbox();
    let w = bb.width();
    if w <= 1e-12 {
        return Err(GeometryError::DegeneratePolygon);
    }
    let try_at = |f: f64| -> Option<Point> {
        let x = bb.min_x + f * w;
        let (lo, hi) = longest_chord(poly, x)?;
        let p = Point::new(x, 0.5 * (lo + hi));
        (hi - lo > BOUNDARY_EPS && point_in_polygon(poly, p)).then_some(p)
    };
    if let Some(p) = try_at(fraction) {
        return Ok(p);
    }
    let mut k = 1;
    loop {
        let lo = fraction - k as f64 * FALLBACK_STEP;
        let hi = fraction + k as f64 * FALLBACK_STEP;
        if lo <= 0.0 && hi >= 1.0 {
            return Err(GeometryError::ChordMiss(fraction));
        }
        for f in [lo, hi] {
            if f > 0.0 && f < 1.0 {
                if let Some(p) = try_at(f) {
                    return Ok(p);
                }
            }
        }
        k += 1;
    }
}

/// Interior intervals `(y_lo, y_hi)` of the vertical line `x`, sorted by `y`.
pub(crate) fn vertical_chords(poly: &TextPolygon, x: f64) -> Vec<(f64, f64)> {
    let mut ys: Vec<f64> = poly
        .edges()
        .filter(|(a, b)| (a.x <= x) != (b.x <= x))
        .map(|(a, b)| a.y + (x - a.x) * (b.y - a.y) / (b.x - a.x))
        .collect();
    ys.sort_by(f64::total_cmp);
    ys.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

fn longest_chord(poly: &TextPolygon, x: f64) -> Option<(f64, f64)> {
    vertical_chords(poly, x)
        .into_iter()
        .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
}

/// Centers at fractions `(2k - 1) / (2n)` for `k = 1..=n`, left to right.
///
/// Only the point and fraction are filled; `pmd` and `ray_distances` are zero.
/// Samples whose chord cannot be located are dropped with a warning.
pub fn sample_centers(poly: &TextPolygon, n: usize) -> Result<Vec<CenterSample>, GeometryError> {
    if n == 0 || n % 2 == 0 {
        return Err(GeometryError::InvalidCenterCount(n));
    }
    let mut out: Vec<CenterSample> = Vec::with_capacity(n);
    for k in 1..=n {
        let fraction = (2 * k - 1) as f64 / (2 * n) as f64;
        match center_point(poly, fraction) {
            Ok(point) => {
                // The fallback scan can land left of an earlier sample.
                if out.last().is_some_and(|prev| prev.point.x >= point.x) {
                    warn!("center sample at fraction {fraction} duplicates an earlier one; dropped");
                    continue;
                }
                out.push(CenterSample {
                    point,
                    fraction,
                    pmd: 0.0,
                    ray_distances: [0.0; 8],
                });
            }
            Err(e) => warn!("center sample at fraction {fraction} dropped: {e}"),
        }
    }
    Ok(out)
}

/// Minimum Euclidean distance from `p` to the polygon boundary, taken over
/// the continuous edges.
pub fn polar_min_distance(poly: &TextPolygon, p: Point) -> Result<f64, GeometryError> {
    if !point_in_polygon(poly, p) {
        return Err(GeometryError::PointOutside { x: p.x, y: p.y });
    }
    Ok(poly.boundary_distance(p))
}

/// Angle perturbation applied when a ray passes exactly through a vertex.
const VERTEX_PERTURBATION: f64 = 1e-9;

/// Distances from `p` to the nearest boundary hit along each of the eight
/// [`RAY_DIRECTIONS`].
pub fn ray_distances(poly: &TextPolygon, p: Point) -> Result<[f64; 8], GeometryError> {
    if !point_in_polygon(poly, p) || poly.boundary_distance(p) <= BOUNDARY_EPS {
        return Err(GeometryError::PointOutside { x: p.x, y: p.y });
    }
    let mut out = [0.0; 8];
    for (slot, dir) in out.iter_mut().zip(RAY_DIRECTIONS) {
        let (dx, dy) = dir.unit();
        let hit = match cast(poly, p, dx, dy) {
            Some((t, false)) => Some(t),
            Some((t, true)) => {
                let (s, c) = VERTEX_PERTURBATION.sin_cos();
                let (rx, ry) = (dx * c - dy * s, dx * s + dy * c);
                // A perturbed hit next to the vertex means the ray exits there.
                Some(cast(poly, p, rx, ry).map_or(t, |(t2, _)| {
                    if (t2 - t).abs() <= 1e-6 * t.max(1.0) {
                        t
                    } else {
                        t2
                    }
                }))
            }
            None => None,
        };
        match hit {
            Some(t) if t.is_finite() && t > 0.0 => *slot = t,
            _ => return Err(GeometryError::NoIntersection(dir)),
        }
    }
    Ok(out)
}

/// Nearest hit distance along the ray and whether it lands on a vertex.
fn cast(poly: &TextPolygon, p: Point, dx: f64, dy: f64) -> Option<(f64, bool)> {
    let mut best: Option<(f64, bool)> = None;
    for (a, b) in poly.edges() {
        let sx = b.x - a.x;
        let sy = b.y - a.y;
        let denom = dx * sy - dy * sx;
        if denom.abs() < 1e-15 {
            continue;
        }
        let qx = a.x - p.x;
        let qy = a.y - p.y;
        let t = (qx * sy - qy * sx) / denom;
        let u = (qx * dy - qy * dx) / denom;
        if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&u) {
            let on_vertex = u.abs() <= 1e-9 || (u - 1.0).abs() <= 1e-9;
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, on_vertex));
            }
        }
    }
    best
}
