use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Tolerance used for on-boundary tests, in pixels.
pub(crate) const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub(crate) fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub(crate) fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub(crate) fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub(crate) fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub(crate) fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub(crate) fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Axis-aligned bounding box in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }
}

/// An ordered simple polygon describing one text instance boundary.
///
/// Construction validates the polygon (at least three vertices, finite
/// coordinates, nonzero area, no crossing edges) and normalizes orientation to
/// positive shoelace area.
#[derive(Debug, Clone, PartialEq)]
pub struct TextPolygon {
    vertices: Vec<Point>,
    ignore: bool,
}

impl TextPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        Self::with_ignore(vertices, false)
    }

    pub fn with_ignore(mut vertices: Vec<Point>, ignore: bool) -> Result<Self, GeometryError> {
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        vertices.dedup();
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some((i, j)) = find_crossing(&vertices) {
            return Err(GeometryError::SelfIntersecting(i, j));
        }
        let area = signed_area(&vertices);
        if area.abs() <= 1e-12 {
            return Err(GeometryError::ZeroArea);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices, ignore })
    }

    /// Convenience constructor for an axis-aligned rectangle.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        Self::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().copied().map(Point::from).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn ignore(&self) -> bool {
        self.ignore
    }

    pub fn set_ignore(&mut self, ignore: bool) {
        self.ignore = ignore;
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn bbox(&self) -> BBox {
        bbox_of(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn contains(&self, p: Point) -> bool {
        point_in_polygon(self, p)
    }

    /// Minimum distance from `p` to the boundary, regardless of containment.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> TextPolygon {
        self.map_points(|p| Point::new(p.x + dx, p.y + dy))
    }

    pub fn scaled(&self, s: f64) -> TextPolygon {
        self.map_points(|p| Point::new(p.x * s, p.y * s))
    }

    /// Applies an orientation-preserving map (translation or positive scale).
    fn map_points(&self, f: impl Fn(Point) -> Point) -> TextPolygon {
        TextPolygon {
            vertices: self.vertices.iter().copied().map(f).collect(),
            ignore: self.ignore,
        }
    }

    /// Cyclic rotation of the vertex sequence; the polygon is unchanged.
    pub fn rotated_start(&self, k: usize) -> TextPolygon {
        let mut v = self.vertices.clone();
        let n = v.len();
        v.rotate_left(k % n);
        TextPolygon {
            vertices: v,
            ignore: self.ignore,
        }
    }

    /// Clips the polygon against the rectangle `[0, w] x [0, h]`.
    ///
    /// Returns `None` when nothing with positive area is left.
    pub fn clip_to_rect(&self, w: f64, h: f64) -> Option<TextPolygon> {
        let bb = self.bbox();
        if bb.min_x >= 0.0 && bb.min_y >= 0.0 && bb.max_x <= w && bb.max_y <= h {
            return Some(self.clone());
        }
        let mut pts = self.vertices.clone();
        // Sutherland-Hodgman against the four half-planes.
        let planes: [(fn(Point) -> f64, f64); 4] = [
            (|p| p.x, 0.0),
            (|p| -p.x, -w),
            (|p| p.y, 0.0),
            (|p| -p.y, -h),
        ];
        for (coord, bound) in planes {
            if pts.is_empty() {
                break;
            }
            let mut out = Vec::with_capacity(pts.len() + 4);
            let n = pts.len();
            for i in 0..n {
                let cur = pts[i];
                let prev = pts[(i + n - 1) % n];
                let cin = coord(cur) >= bound;
                let pin = coord(prev) >= bound;
                if cin != pin {
                    let t = (bound - coord(prev)) / (coord(cur) - coord(prev));
                    out.push(prev.add(cur.sub(prev).scale(t)));
                }
                if cin {
                    out.push(cur);
                }
            }
            pts = out;
        }
        TextPolygon::with_ignore(pts, self.ignore).ok()
    }
}

/// Shoelace area; positive for the normalized orientation.
pub fn polygon_area(poly: &TextPolygon) -> f64 {
    poly.area()
}

/// Even-odd containment with points on the boundary counted as inside.
pub fn point_in_polygon(poly: &TextPolygon, p: Point) -> bool {
    if poly.boundary_distance(p) <= BOUNDARY_EPS {
        return true;
    }
    even_odd_contains(&poly.vertices, p)
}

pub(crate) fn even_odd_contains(vertices: &[Point], p: Point) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

pub(crate) fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += vertices[i].cross(vertices[(i + 1) % n]);
    }
    acc * 0.5
}

pub(crate) fn bbox_of(vertices: &[Point]) -> BBox {
    let mut bb = BBox {
        min_x: f64::INFINITY,
        min_y: f64::INFINITY,
        max_x: f64::NEG_INFINITY,
        max_y: f64::NEG_INFINITY,
    };
    for p in vertices {
        bb.min_x = bb.min_x.min(p.x);
        bb.min_y = bb.min_y.min(p.y);
        bb.max_x = bb.max_x.max(p.x);
        bb.max_y = bb.max_y.max(p.y);
    }
    bb
}

pub(crate) fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// True when the open segments `ab` and `cd` cross at a single interior point.
pub(crate) fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Intersection parameters `(t, u)` of segments `p + t*r` and `q + u*s`, when
/// they are not parallel.
pub(crate) fn segment_params(p: Point, p2: Point, q: Point, q2: Point) -> Option<(f64, f64)> {
    let r = p2.sub(p);
    let s = q2.sub(q);
    let denom = r.cross(s);
    let scale = r.norm() * s.norm();
    if denom.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let qp = q.sub(p);
    Some((qp.cross(s) / denom, qp.cross(r) / denom))
}

fn find_crossing(vertices: &[Point]) -> Option<(usize, usize)> {
    let n = vertices.len();
    if n < 4 {
        return None;
    }
    let boxes: Vec<BBox> = (0..n)
        .map(|i| bbox_of(&[vertices[i], vertices[(i + 1) % n]]))
        .collect();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (&boxes[i], &boxes[j]);
            if bi.max_x < bj.min_x || bj.max_x < bi.min_x || bi.max_y < bj.min_y || bj.max_y < bi.min_y
            {
                continue;
            }
            if segments_cross(
                vertices[i],
                vertices[(i + 1) % n],
                vertices[j],
                vertices[(j + 1) % n],
            ) {
                return Some((i, j));
            }
        }
    }
    None
}
