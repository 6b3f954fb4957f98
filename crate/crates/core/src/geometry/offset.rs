//! Signed contour offsetting.
//!
//! Every edge is translated along its outward normal by `d` (negative `d`
//! shrinks). Adjacent offset edges are joined with a miter point when the
//! miter ratio stays within [`MITER_LIMIT`]; otherwise both translated
//! endpoints are kept (a bevel on the open side of a join, a small crossing
//! on the overlapping side). The raw curve is then split at its
//! self-intersections into simple loops and only the loops that belong to
//! the offset region are returned.

use log::warn;

use super::polygon::{bbox_of, even_odd_contains, segment_params, signed_area, BBox};
use super::{Point, TextPolygon};

/// Miter length over offset distance above which a join is beveled.
pub const MITER_LIMIT: f64 = 2.0;

/// Offsets `poly` by `d` pixels: `d > 0` expands, `d < 0` shrinks.
///
/// A shrink may split the polygon into several pieces or remove it entirely;
/// an expansion returns exactly one polygon.
pub fn offset_polygon(poly: &TextPolygon, d: f64) -> Vec<TextPolygon> {
    if d == 0.0 {
        return vec![poly.clone()];
    }
    if !d.is_finite() {
        return Vec::new();
    }
    let raw = raw_offset(poly.vertices(), d);
    if raw.len() < 3 {
        return Vec::new();
    }
    let loops = split_loops(&raw);
    let tol = 1e-9 * (1.0 + d.abs());

    let mut kept: Vec<Vec<Point>> = if d < 0.0 {
        loops
            .into_iter()
            .filter(|l| signed_area(l) > tol)
            .filter(|l| {
                interior_point(l).is_some_and(|p| {
                    poly.contains(p) && poly.boundary_distance(p) >= d.abs() - tol
                })
            })
            .collect()
    } else {
        loops
            .into_iter()
            .filter(|l| signed_area(l) > tol)
            .max_by(|a, b| signed_area(a).total_cmp(&signed_area(b)))
            .into_iter()
            .collect()
    };

    kept.iter_mut().for_each(|l| remove_collinear(l));
    kept.into_iter()
        .filter_map(|l| match TextPolygon::with_ignore(l, poly.ignore()) {
            Ok(p) => Some(p),
            Err(e) => {
                warn!("offset loop discarded: {e}");
                None
            }
        })
        .collect()
}

fn outward_normal(a: Point, b: Point) -> Point {
    let e = b.sub(a);
    let len = e.norm();
    Point::new(e.y / len, -e.x / len)
}

fn raw_offset(v: &[Point], d: f64) -> Vec<Point> {
    let n = v.len();
    let normals: Vec<Point> = (0..n).map(|i| outward_normal(v[i], v[(i + 1) % n])).collect();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let n1 = normals[(i + n - 1) % n];
        let n2 = normals[i];
        let dot = n1.dot(n2).clamp(-1.0, 1.0);
        let vi = v[i];
        if dot > 1.0 - 1e-12 {
            out.push(vi.add(n1.scale(d)));
            continue;
        }
        let ratio = (2.0 / (1.0 + dot)).sqrt();
        if ratio <= MITER_LIMIT {
            out.push(vi.add(n1.add(n2).scale(d / (1.0 + dot))));
        } else {
            out.push(vi.add(n1.scale(d)));
            out.push(vi.add(n2.scale(d)));
        }
    }
    out.dedup_by(|a, b| a.dist(*b) <= 1e-12);
    while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= 1e-12 {
        out.pop();
    }
    out
}

/// Splits a closed, possibly self-intersecting curve into simple loops.
///
/// Proper crossings, vertices lying on another edge and coincident vertices
/// all become shared nodes. Walking the curve with a stack and closing a loop
/// whenever a node repeats yields loops that touch but never cross.
fn split_loops(raw: &[Point]) -> Vec<Vec<Point>> {
    const EPS: f64 = 1e-10;
    let n = raw.len();
    let boxes: Vec<BBox> = (0..n).map(|i| bbox_of(&[raw[i], raw[(i + 1) % n]])).collect();
    let extent = {
        let bb = bbox_of(raw);
        bb.width().max(bb.height()).max(1.0)
    };
    let snap = 1e-9 * extent;

    // Node id per raw vertex; coincident vertices share an id.
    let mut vertex_id: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if raw[i].dist(raw[j]) <= snap {
                vertex_id[j] = vertex_id[i];
            }
        }
    }
    let mut next_id = n;
    let mut on_seg: Vec<Vec<(f64, usize, Point)>> = vec![Vec::new(); n];
    let mut shared = false;

    for i in 0..n {
        let (a, b) = (raw[i], raw[(i + 1) % n]);
        let ab = b.sub(a);
        let len2 = ab.dot(ab);
        // Vertices of other edges lying on the interior of edge i.
        for k in 0..n {
            if k == i || k == (i + 1) % n || len2 == 0.0 {
                continue;
            }
            let p = raw[k];
            let bi = &boxes[i];
            if p.x < bi.min_x - snap || p.x > bi.max_x + snap || p.y < bi.min_y - snap || p.y > bi.max_y + snap {
                continue;
            }
            let t = p.sub(a).dot(ab) / len2;
            if t > EPS && t < 1.0 - EPS && a.add(ab.scale(t)).dist(p) <= snap {
                on_seg[i].push((t, vertex_id[k], p));
                shared = true;
            }
        }
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (&boxes[i], &boxes[j]);
            if bi.max_x < bj.min_x || bj.max_x < bi.min_x || bi.max_y < bj.min_y || bj.max_y < bi.min_y
            {
                continue;
            }
            let (c, e) = (raw[j], raw[(j + 1) % n]);
            if let Some((t, u)) = segment_params(a, b, c, e) {
                if t > EPS && t < 1.0 - EPS && u > EPS && u < 1.0 - EPS {
                    let x = a.add(ab.scale(t));
                    if x.dist(a) <= snap || x.dist(b) <= snap || x.dist(c) <= snap || x.dist(e) <= snap {
                        continue;
                    }
                    on_seg[i].push((t, next_id, x));
                    on_seg[j].push((u, next_id, x));
                    next_id += 1;
                }
            }
        }
    }
    if next_id == n && !shared && vertex_id.iter().enumerate().all(|(i, &v)| i == v) {
        return vec![raw.to_vec()];
    }

    let mut walk: Vec<(usize, Point)> = Vec::with_capacity(2 * n);
    for (i, extra) in on_seg.iter_mut().enumerate() {
        walk.push((vertex_id[i], raw[i]));
        extra.sort_by(|a, b| a.0.total_cmp(&b.0));
        walk.extend(extra.iter().map(|&(_, id, p)| (id, p)));
    }
    walk.dedup_by_key(|(id, _)| *id);
    while walk.len() > 1 && walk[0].0 == walk[walk.len() - 1].0 {
        walk.pop();
    }

    let mut loops = Vec::new();
    let mut stack: Vec<(usize, Point)> = Vec::with_capacity(walk.len());
    let mut pos: Vec<Option<usize>> = vec![None; next_id];
    for (id, p) in walk {
        if let Some(k) = pos[id] {
            let piece: Vec<(usize, Point)> = stack.drain(k + 1..).collect();
            for (other, _) in &piece {
                pos[*other] = None;
            }
            if piece.len() >= 2 {
                let mut lp: Vec<Point> = Vec::with_capacity(piece.len() + 1);
                lp.push(stack[k].1);
                lp.extend(piece.into_iter().map(|(_, q)| q));
                loops.push(lp);
            }
            continue;
        }
        pos[id] = Some(stack.len());
        stack.push((id, p));
    }
    if stack.len() >= 3 {
        loops.push(stack.into_iter().map(|(_, p)| p).collect());
    }
    loops
}

/// A point strictly inside a simple loop: the midpoint of the longest
/// vertical chord near the middle of its bounding box.
fn interior_point(l: &[Point]) -> Option<Point> {
    let bb = bbox_of(l);
    if bb.width() <= 0.0 {
        return None;
    }
    let poly = RawLoop(l);
    for f in [0.5, 0.37, 0.63, 0.25, 0.75, 0.13, 0.87, 0.05, 0.95] {
        let x = bb.min_x + f * bb.width();
        if let Some((lo, hi)) = poly
            .chords(x)
            .into_iter()
            .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
        {
            let p = Point::new(x, 0.5 * (lo + hi));
            if hi > lo && even_odd_contains(l, p) {
                return Some(p);
            }
        }
    }
    None
}

struct RawLoop<'a>(&'a [Point]);

impl RawLoop<'_> {
    fn chords(&self, x: f64) -> Vec<(f64, f64)> {
        // Reuse the polygon chord logic without constructing a validated polygon.
        let n = self.0.len();
        let mut ys: Vec<f64> = (0..n)
            .map(|i| (self.0[i], self.0[(i + 1) % n]))
            .filter(|(a, b)| (a.x <= x) != (b.x <= x))
            .map(|(a, b)| a.y + (x - a.x) * (b.y - a.y) / (b.x - a.x))
            .collect();
        ys.sort_by(f64::total_cmp);
        ys.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    }
}

fn remove_collinear(l: &mut Vec<Point>) {
    let mut changed = true;
    while changed && l.len() > 3 {
        changed = false;
        let n = l.len();
        for i in 0..n {
            let a = l[(i + n - 1) % n];
            let b = l[i];
            let c = l[(i + 1) % n];
            let ab = b.sub(a);
            let bc = c.sub(b);
            let scale = ab.norm() * bc.norm();
            if scale == 0.0 || (ab.cross(bc).abs() <= 1e-12 * scale && ab.dot(bc) > 0.0) {
                l.remove(i);
                changed = true;
                break;
            }
        }
    }
}
