//! Shared strategies and oracles for the property tests.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cmtext::geometry::{center_point, polar_min_distance, Point, TextPolygon};
use cmtext::synth::{annular_sector, random_convex};

/// Convex polygon sampled on an ellipse, placed with a small margin from the
/// origin.
pub fn convex(min_r: f64, max_r: f64) -> impl Strategy<Value = TextPolygon> {
    (min_r..max_r, 0.3..1.0f64, 4usize..11, any::<u64>()).prop_filter_map("degenerate", |(rx, k, n, seed)| {
        let ry = rx * k;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_convex(&mut rng, Point::new(rx + 3.0, ry + 3.0), rx, ry, n).ok()
    })
}

pub fn sector() -> impl Strategy<Value = TextPolygon> {
    (16.0..40.0f64, 1.5..3.0f64, 1.0..2.6f64, -0.3..0.3f64, any::<bool>()).prop_map(|(th, k, span, tilt, up)| {
        let r_in = th * k;
        let r_out = r_in + th;
        let mid = if up { -std::f64::consts::FRAC_PI_2 } else { std::f64::consts::FRAC_PI_2 } + tilt;
        annular_sector(Point::new(r_out + 3.0, r_out + 3.0), r_in, r_out, mid - span / 2.0, mid + span / 2.0).unwrap()
    })
}

pub fn pmd_at_center(p: &TextPolygon) -> f64 {
    center_point(p, 0.5)
        .and_then(|c| polar_min_distance(p, c))
        .unwrap_or(0.0)
}

/// Largest inscribed circle radius of a convex polygon by pattern search on
/// the (concave) inside-distance function.
pub fn inradius(p: &TextPolygon) -> f64 {
    let f = |q: Point| if p.contains(q) { p.boundary_distance(q) } else { 0.0 };
    let bb = p.bbox();
    let mut best = Point::new(bb.min_x, bb.min_y);
    let mut best_v = 0.0;
    let steps = 40;
    for i in 0..=steps {
        for j in 0..=steps {
            let q = Point::new(
                bb.min_x + bb.width() * i as f64 / steps as f64,
                bb.min_y + bb.height() * j as f64 / steps as f64,
            );
            let v = f(q);
            if v > best_v {
                best_v = v;
                best = q;
            }
        }
    }
    let mut step = bb.width().max(bb.height()) / steps as f64;
    while step > 1e-7 {
        let mut moved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let q = Point::new(best.x + dx * step, best.y + dy * step);
            let v = f(q);
            if v > best_v {
                best_v = v;
                best = q;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best_v
}
