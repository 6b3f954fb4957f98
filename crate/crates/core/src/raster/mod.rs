//! Rasterization, GAP masks, connected components and contour extraction.

mod components;
mod contour;
mod grid;

pub use components::{connected_components, CellBox, Component};
pub use contour::{extract_contour, SIMPLIFY_TOLERANCE};
pub use grid::{BinaryGrid, Grid, SoftGrid};

pub(crate) use components::label_runs;
pub(crate) use contour::contour_from_predicate;

use thiserror::Error;

use crate::geometry::{GeometryError, TextPolygon};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RasterError {
    #[error("grid dimensions mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("bad grid dimensions {height}x{width} for {len} cells")]
    BadDimensions {
        height: usize,
        width: usize,
        len: usize,
    },
    #[error("cell {index} has value {value} outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("no masks given")]
    EmptyInput,
    #[error("component has {0} pixels; at least 4 are needed for a contour")]
    TooSmall(usize),
    #[error("contour is degenerate: {0}")]
    DegenerateContour(#[from] GeometryError),
}

/// Scanline fill: a cell is set iff its center `(col + 0.5, row + 0.5)` is
/// inside the polygon. Edges are half-open, so a center exactly on the left or
/// top boundary is inside and one on the right or bottom boundary is not.
pub fn rasterize(poly: &TextPolygon, height: usize, width: usize) -> BinaryGrid {
    let mut g = Grid::new(height, width, false);
    rasterize_into(&mut g, poly, 1.0);
    g
}

/// Rasterizes `poly` with its coordinates divided by `scale`.
pub fn rasterize_scaled(poly: &TextPolygon, height: usize, width: usize, scale: f64) -> BinaryGrid {
    let mut g = Grid::new(height, width, false);
    rasterize_into(&mut g, poly, scale);
    g
}

/// ORs the rasterized polygon (coordinates divided by `scale`) into `grid`.
pub fn rasterize_into(grid: &mut BinaryGrid, poly: &TextPolygon, scale: f64) {
    let (h, w) = grid.dims();
    let inv = 1.0 / scale;
    let pts: Vec<(f64, f64)> = poly
        .vertices()
        .iter()
        .map(|p| (p.x * inv, p.y * inv))
        .collect();
    let n = pts.len();
    let (min_y, max_y) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    let row_lo = (min_y - 0.5).ceil().max(0.0) as usize;
    let row_hi = ((max_y - 0.5).floor() + 1.0).clamp(0.0, h as f64) as usize;
    let mut xs: Vec<f64> = Vec::with_capacity(8);
    for row in row_lo..row_hi {
        let yc = row as f64 + 0.5;
        xs.clear();
        for i in 0..n {
            let (ax, ay) = pts[i];
            let (bx, by) = pts[(i + 1) % n];
            if (ay <= yc) != (by <= yc) {
                xs.push(ax + (yc - ay) * (bx - ax) / (by - ay));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            // Columns whose center lies in [x0, x1).
            let c0 = (pair[0] - 0.5).ceil().max(0.0);
            let c1 = (pair[1] - 0.5).ceil().min(w as f64);
            if c1 <= c0 {
                continue;
            }
            let start = row * w;
            grid.cells_mut()[start + c0 as usize..start + c1 as usize].fill(true);
        }
    }
}

/// GAP label from per-instance text and CM masks:
/// `1 - (text AND NOT cm)` over the unions, i.e. the annulus between the two
/// contours is 0 and every other cell is 1.
pub fn gap_mask(text_masks: &[BinaryGrid], cm_masks: &[BinaryGrid]) -> Result<BinaryGrid, RasterError> {
    let first = text_masks.first().ok_or(RasterError::EmptyInput)?;
    if text_masks.len() != cm_masks.len() {
        return Err(RasterError::DimensionMismatch {
            expected: (text_masks.len(), 0),
            found: (cm_masks.len(), 0),
        });
    }
    let mut text = Grid::new(first.height(), first.width(), false);
    let mut cm = text.clone();
    for (t, c) in text_masks.iter().zip(cm_masks) {
        text.union_with(t)?;
        cm.union_with(c)?;
    }
    gap_from_unions(&text, &cm)
}

/// [`gap_mask`] on precomputed unions.
pub fn gap_from_unions(text: &BinaryGrid, cm: &BinaryGrid) -> Result<BinaryGrid, RasterError> {
    text.check_dims(cm)?;
    let cells = text
        .cells()
        .iter()
        .zip(cm.cells())
        .map(|(&t, &c)| !(t && !c))
        .collect();
    Grid::from_vec(text.height(), text.width(), cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    /// Cell-center containment oracle, independent of the scanline code.
    fn oracle(poly: &TextPolygon, h: usize, w: usize) -> BinaryGrid {
        let mut g = Grid::new(h, w, false);
        for r in 0..h {
            for c in 0..w {
                let p = Point::new(c as f64 + 0.5, r as f64 + 0.5);
                if poly.contains(p) {
                    g.set(r, c, true);
                }
            }
        }
        g
    }

    #[test]
    fn rect_fills_block() {
        let r = TextPolygon::rect(0.0, 0.0, 10.0, 10.0).unwrap();
        let g = rasterize(&r, 20, 20);
        assert_eq!(g.count_ones(), 100);
        for row in 0..20 {
            for col in 0..20 {
                assert_eq!(g.get(row, col), row < 10 && col < 10);
            }
        }
    }

    #[test]
    fn matches_center_oracle_on_slanted_polygon() {
        let p = TextPolygon::from_coords(&[(2.3, 1.1), (17.8, 4.2), (15.1, 16.7), (3.9, 12.2)]).unwrap();
        assert_eq!(rasterize(&p, 20, 20), oracle(&p, 20, 20));
    }

    #[test]
    fn thin_sliver_between_rows_is_empty() {
        let s = TextPolygon::rect(0.0, 0.6, 20.0, 1.4).unwrap();
        assert_eq!(rasterize(&s, 5, 20).count_ones(), 0);
    }

    #[test]
    fn clipped_at_grid_border() {
        let r = TextPolygon::rect(-5.0, -5.0, 5.0, 5.0).unwrap();
        assert_eq!(rasterize(&r, 10, 10).count_ones(), 25);
    }

    #[test]
    fn pixel_count_close_to_area() {
        let p = TextPolygon::from_coords(&[(3.2, 2.7), (41.5, 8.9), (37.0, 30.3), (6.6, 25.1)]).unwrap();
        let count = rasterize(&p, 40, 50).count_ones() as f64;
        assert!((count - p.area()).abs() <= p.perimeter() / 2.0);
    }

    #[test]
    fn gap_examples() {
        let text = rasterize(&TextPolygon::rect(0.0, 0.0, 10.0, 10.0).unwrap(), 20, 20);
        let cm = rasterize(&TextPolygon::rect(2.0, 2.0, 8.0, 8.0).unwrap(), 20, 20);
        let gap = gap_mask(&[text.clone()], &[cm.clone()]).unwrap();
        assert_eq!(gap.len() - gap.count_ones(), 64);
        for i in 0..gap.len() {
            let annulus = text.cells()[i] && !cm.cells()[i];
            assert_eq!(gap.cells()[i], !annulus);
        }

        let same = gap_mask(&[text.clone()], &[text.clone()]).unwrap();
        assert_eq!(same.count_ones(), 400);

        let ones = Grid::new(4, 4, true);
        let zeros = Grid::new(4, 4, false);
        assert_eq!(gap_mask(&[ones], &[zeros]).unwrap().count_ones(), 0);
    }

    #[test]
    fn gap_rejects_mismatch() {
        let a = Grid::new(4, 4, false);
        let b = Grid::new(4, 5, false);
        assert!(matches!(
            gap_mask(&[a], &[b]),
            Err(RasterError::DimensionMismatch { .. })
        ));
        assert_eq!(gap_mask(&[], &[]), Err(RasterError::EmptyInput));
    }
}
