//! Outer-border extraction on the pixel lattice.
//!
//! The border is followed along pixel edges ("cracks"), so vertices sit on
//! integer lattice corners and a solid block traces to exactly its cell
//! extent. Connectivity is 8-way: at a diagonal pinch the tracer stays with
//! the component.

use log::warn;

use super::{Component, RasterError};
use crate::geometry::{Point, TextPolygon};

/// Maximum deviation, in pixels, allowed by contour simplification.
pub const SIMPLIFY_TOLERANCE: f64 = 1.0;

/// Traces and simplifies the outer border of `c`.
///
/// Holes are not represented; a component with holes produces its outer
/// border and a warning.
pub fn extract_contour(c: &Component) -> Result<TextPolygon, RasterError> {
    if c.area() < 4 {
        return Err(RasterError::TooSmall(c.area()));
    }
    let (h, w) = (c.bbox.height(), c.bbox.width());
    let mut mask = vec![false; h * w];
    for &(r, col) in &c.pixels {
        mask[(r - c.bbox.min_row) * w + (col - c.bbox.min_col)] = true;
    }
    let fg = |r: isize, col: isize| {
        r >= 0 && col >= 0 && (r as usize) < h && (col as usize) < w && mask[r as usize * w + col as usize]
    };
    let (r0, c0) = c.pixels[0];
    let start = ((r0 - c.bbox.min_row) as isize, (c0 - c.bbox.min_col) as isize);
    let local = contour_from_predicate(fg, start, c.area())?;
    Ok(local.translated(c.bbox.min_col as f64, c.bbox.min_row as f64))
}

/// Traces the outer crack border of the 8-connected component containing
/// `start`, which must be its first cell in raster order, then simplifies it.
pub(crate) fn contour_from_predicate(
    fg: impl Fn(isize, isize) -> bool,
    start: (isize, isize),
    area: usize,
) -> Result<TextPolygon, RasterError> {
    let ring = trace_cracks(&fg, start);
    let traced_area = crate::geometry::polygon_signed_area(&ring);
    if traced_area > area as f64 + 0.5 {
        warn!(
            "component at {:?} has holes ({} enclosed vs {} pixels); inner borders dropped",
            start, traced_area, area
        );
    }
    let simplified = simplify_closed(&ring, SIMPLIFY_TOLERANCE);
    Ok(TextPolygon::new(simplified)?)
}

/// Lattice points where the border changes direction.
fn trace_cracks(fg: &impl Fn(isize, isize) -> bool, start: (isize, isize)) -> Vec<Point> {
    let (r0, c0) = start;
    // Position is a lattice corner (x, y); heading is a unit lattice step.
    // The foreground lies on the side (-dy, dx) of the heading.
    let (sx, sy) = (c0, r0);
    let (mut x, mut y) = (sx, sy);
    let (mut dx, mut dy) = (1isize, 0isize);
    let start_dir = (dx, dy);
    let mut out = vec![Point::new(sx as f64, sy as f64)];
    loop {
        x += dx;
        y += dy;
        if (x, y) == (sx, sy) && (dx, dy) == start_dir {
            break;
        }
        let (fx, fy) = (-dy, dx);
        // Cell whose center is p + 0.5*dir + 0.5*side; cell (row, col) spans
        // [col, col+1) x [row, row+1).
        let cell = |side: isize| {
            let cx2 = 2 * x + dx + side * fx;
            let cy2 = 2 * y + dy + side * fy;
            fg(cy2.div_euclid(2), cx2.div_euclid(2))
        };
        let (nx, ny) = if cell(-1) {
            (-fx, -fy)
        } else if cell(1) {
            (dx, dy)
        } else {
            (fx, fy)
        };
        if (nx, ny) != (dx, dy) {
            out.push(Point::new(x as f64, y as f64));
            dx = nx;
            dy = ny;
        }
        if (x, y) == (sx, sy) && (dx, dy) == start_dir {
            break;
        }
    }
    // The start corner is always a turn (left edge up, then top edge right).
    if out.len() > 1 && out[out.len() - 1] == out[0] {
        out.pop();
    }
    out
}

/// Douglas-Peucker on a closed ring.
pub(crate) fn simplify_closed(pts: &[Point], tol: f64) -> Vec<Point> {
    let n = pts.len();
    if n <= 3 {
        return pts.to_vec();
    }
    let far = (1..n)
        .max_by(|&a, &b| pts[0].dist(pts[a]).total_cmp(&pts[0].dist(pts[b])))
        .unwrap_or(n / 2);
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[far] = true;
    dp(pts, 0, far, tol, &mut keep);
    dp_wrap(pts, far, n, tol, &mut keep);
    pts.iter()
        .zip(&keep)
        .filter_map(|(p, &k)| k.then_some(*p))
        .collect()
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let len2 = abx * abx + aby * aby;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * abx + (p.y - a.y) * aby) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * abx, a.y + t * aby))
}

fn dp(pts: &[Point], i: usize, j: usize, tol: f64, keep: &mut [bool]) {
    let mut stack = vec![(i, j)];
    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let (mut best, mut idx) = (0.0, a);
        for k in a + 1..b {
            let d = seg_dist(pts[k], pts[a], pts[b]);
            if d > best {
                best = d;
                idx = k;
            }
        }
        if best > tol {
            keep[idx] = true;
            stack.push((a, idx));
            stack.push((idx, b));
        }
    }
}

/// Same as [`dp`] for the wrapped range `far..n` closing back on index 0.
fn dp_wrap(pts: &[Point], far: usize, n: usize, tol: f64, keep: &mut [bool]) {
    let mut ext: Vec<Point> = pts[far..].to_vec();
    ext.push(pts[0]);
    let mut k2 = vec![false; ext.len()];
    dp(&ext, 0, ext.len() - 1, tol, &mut k2);
    for (off, &k) in k2.iter().enumerate().take(n - far) {
        if k {
            keep[far + off] = true;
        }
    }
}
