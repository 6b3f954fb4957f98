//! Seeded synthetic scenes: axis-aligned rectangles, rotated rectangles and
//! annular sectors (a curved-text stand-in).

use std::f64::consts::PI;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{BBox, GeometryError, Point, TextPolygon};

/// Vertices sampled along each arc of an annular sector.
pub const ARC_VERTICES: usize = 16;

const MAX_ATTEMPTS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("could not place instance {index} without overlap after {attempts} attempts")]
    Crowded { index: usize, attempts: usize },
    #[error("image of {width}x{height} is too small for synthetic text")]
    TooSmall { width: usize, height: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Rect,
    RotatedRect,
    Sector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    pub n_rects: usize,
    pub n_rotated: usize,
    pub n_sectors: usize,
    /// Minimum free space kept between instance bounding boxes.
    pub margin: f64,
}

impl SceneConfig {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            n_rects: 3,
            n_rotated: 0,
            n_sectors: 1,
            margin: 4.0,
        }
    }

    pub fn total(&self) -> usize {
        self.n_rects + self.n_rotated + self.n_sectors
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub width: usize,
    pub height: usize,
    pub instances: Vec<TextPolygon>,
    pub kinds: Vec<ShapeKind>,
}

/// Rectangle rotated by `angle` radians about its center.
pub fn rotated_rect(center: Point, w: f64, h: f64, angle: f64) -> Result<TextPolygon, GeometryError> {
    let (s, c) = angle.sin_cos();
    let corners = [(-w, -h), (w, -h), (w, h), (-w, h)];
    TextPolygon::new(
        corners
            .iter()
            .map(|&(x, y)| Point::new(center.x + 0.5 * (x * c - y * s), center.y + 0.5 * (x * s + y * c)))
            .collect(),
    )
}

/// Band between two concentric arcs from angle `a0` to `a1` (radians, in
/// image coordinates), closed by two radial edges.
pub fn annular_sector(
    center: Point,
    r_in: f64,
    r_out: f64,
    a0: f64,
    a1: f64,
) -> Result<TextPolygon, GeometryError> {
    let arc = |r: f64, k: usize| {
        let a = a0 + (a1 - a0) * k as f64 / (ARC_VERTICES - 1) as f64;
        Point::new(center.x + r * a.cos(), center.y + r * a.sin())
    };
    let mut v: Vec<Point> = (0..ARC_VERTICES).map(|k| arc(r_out, k)).collect();
    v.extend((0..ARC_VERTICES).rev().map(|k| arc(r_in, k)));
    TextPolygon::new(v)
}

/// Convex polygon from `n` sorted random angles on an ellipse.
pub fn random_convex(
    rng: &mut impl Rng,
    center: Point,
    rx: f64,
    ry: f64,
    n: usize,
) -> Result<TextPolygon, GeometryError> {
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    TextPolygon::new(
        angles
            .iter()
            .map(|a| Point::new(center.x + rx * a.cos(), center.y + ry * a.sin()))
            .collect(),
    )
}

fn random_shape(rng: &mut impl Rng, kind: ShapeKind, w: f64, h: f64) -> Result<TextPolygon, GeometryError> {
    let short = w.min(h);
    let th_max = (short / 8.0).max(16.0);
    let thickness = rng.random_range(16.0..=th_max);
    match kind {
        ShapeKind::Rect => {
            let len = rng.random_range(2.0 * thickness..=(5.0 * thickness).min(0.6 * w).max(2.0 * thickness));
            let x = rng.random_range(0.0..=(w - len).max(0.0)).floor();
            let y = rng.random_range(0.0..=(h - thickness).max(0.0)).floor();
            TextPolygon::rect(x, y, x + len.round(), y + thickness.round())
        }
        ShapeKind::RotatedRect => {
            let len = rng.random_range(2.0 * thickness..=(4.0 * thickness).min(0.5 * short).max(2.0 * thickness));
            let angle = rng.random_range(-PI / 4.0..PI / 4.0);
            let c = Point::new(rng.random_range(0.0..w), rng.random_range(0.0..h));
            rotated_rect(c, len, thickness, angle)
        }
        ShapeKind::Sector => {
            let r_in = rng.random_range(1.5 * thickness..=3.0 * thickness);
            let span = rng.random_range(PI / 3.0..=5.0 * PI / 6.0);
            // Arch over the top or bowl at the bottom of the circle.
            let mid = if rng.random_bool(0.5) { -PI / 2.0 } else { PI / 2.0 } + rng.random_range(-0.3..0.3);
            let c = Point::new(rng.random_range(0.0..w), rng.random_range(0.0..h));
            annular_sector(c, r_in, r_in + thickness, mid - span / 2.0, mid + span / 2.0)
        }
    }
}

fn inside(bb: &BBox, w: f64, h: f64) -> bool {
    bb.min_x >= 0.0 && bb.min_y >= 0.0 && bb.max_x <= w && bb.max_y <= h
}

fn overlaps(a: &BBox, b: &BBox, margin: f64) -> bool {
    a.min_x < b.max_x + margin && b.min_x < a.max_x + margin && a.min_y < b.max_y + margin && b.min_y < a.max_y + margin
}

/// Places the configured shapes without bounding-box overlap.
pub fn generate_scene(cfg: &SceneConfig, seed: u64) -> Result<Scene, SynthError> {
    if cfg.width < 64 || cfg.height < 64 {
        return Err(SynthError::TooSmall {
            width: cfg.width,
            height: cfg.height,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (cfg.width as f64, cfg.height as f64);
    let kinds: Vec<ShapeKind> = std::iter::repeat_n(ShapeKind::Rect, cfg.n_rects)
        .chain(std::iter::repeat_n(ShapeKind::RotatedRect, cfg.n_rotated))
        .chain(std::iter::repeat_n(ShapeKind::Sector, cfg.n_sectors))
        .collect();
    let mut instances: Vec<TextPolygon> = Vec::with_capacity(kinds.len());
    let mut boxes: Vec<BBox> = Vec::with_capacity(kinds.len());
    for (index, &kind) in kinds.iter().enumerate() {
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS {
            let p = random_shape(&mut rng, kind, w, h)?;
            let bb = p.bbox();
            if inside(&bb, w, h) && !boxes.iter().any(|b| overlaps(b, &bb, cfg.margin)) {
                boxes.push(bb);
                instances.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(SynthError::Crowded {
                index,
                attempts: MAX_ATTEMPTS,
            });
        }
    }
    Ok(Scene {
        width: cfg.width,
        height: cfg.height,
        instances,
        kinds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{center_point, polar_min_distance};

    #[test]
    fn deterministic_and_separated() {
        let mut cfg = SceneConfig::new(256, 256);
        cfg.n_rotated = 1;
        let a = generate_scene(&cfg, 7).unwrap();
        let b = generate_scene(&cfg, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.instances.len(), 5);
        for i in 0..a.instances.len() {
            for j in i + 1..a.instances.len() {
                assert!(!overlaps(&a.instances[i].bbox(), &a.instances[j].bbox(), 0.0));
            }
        }
        assert_ne!(a, generate_scene(&cfg, 8).unwrap());
    }

    #[test]
    fn sector_shape() {
        let s = annular_sector(Point::new(100.0, 100.0), 40.0, 60.0, -2.0, -1.0).unwrap();
        assert_eq!(s.len(), 2 * ARC_VERTICES);
        let cp = center_point(&s, 0.5).unwrap();
        let pmd = polar_min_distance(&s, cp).unwrap();
        assert!(pmd > 9.0 && pmd <= 10.0, "{pmd}");
    }

    #[test]
    fn rotated_rect_area() {
        let r = rotated_rect(Point::new(50.0, 50.0), 40.0, 10.0, 0.3).unwrap();
        assert!((r.area() - 400.0).abs() < 1e-9);
    }

    #[test]
    fn crowded_scene_errors() {
        let mut cfg = SceneConfig::new(64, 64);
        cfg.n_rects = 50;
        assert!(matches!(generate_scene(&cfg, 1), Err(SynthError::Crowded { .. })));
    }
}
