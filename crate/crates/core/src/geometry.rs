//! Planar polygon utilities shared by the planner: areas, containment,
//! segment predicates and a bucketed segment index.

use num_complex::Complex64;
use robust::{orient2d, Coord};

pub type Point = Complex64;

pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a.re * b.im - b.re * a.im;
    }
    0.5 * acc
}

/// Signed area and area centroid of a closed polygon (shoelace formula).
pub fn area_centroid(poly: &[Point]) -> (f64, Point) {
    let n = poly.len();
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let cross = a.re * b.im - b.re * a.im;
        area2 += cross;
        cx += (a.re + b.re) * cross;
        cy += (a.im + b.im) * cross;
    }
    if area2.abs() < f64::MIN_POSITIVE {
        let mean = poly.iter().sum::<Point>() / n.max(1) as f64;
        return (0.0, mean);
    }
    (0.5 * area2, Point::new(cx / (3.0 * area2), cy / (3.0 * area2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of(points: &[Point]) -> BBox {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.re = min.re.min(p.re);
            min.im = min.im.min(p.im);
            max.re = max.re.max(p.re);
            max.im = max.im.max(p.im);
        }
        BBox { min, max }
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            min: Point::new(self.min.re.min(other.min.re), self.min.im.min(other.min.im)),
            max: Point::new(self.max.re.max(other.max.re), self.max.im.max(other.max.im)),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.re >= self.min.re && p.re <= self.max.re && p.im >= self.min.im && p.im <= self.max.im
    }

    pub fn diameter(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn width(&self) -> f64 {
        self.max.re - self.min.re
    }

    pub fn height(&self) -> f64 {
        self.max.im - self.min.im
    }
}

/// Closed polygon with a horizontal-band edge index for fast even-odd containment.
#[derive(Debug, Clone)]
pub struct Polygon {
    points: Vec<Point>,
    bbox: BBox,
    band_height: f64,
    bands: Vec<Vec<u32>>,
}

impl Polygon {
    pub fn new(points: Vec<Point>) -> Polygon {
        let bbox = BBox::of(&points);
        let n = points.len();
        let band_count = ((n as f64).sqrt().ceil() as usize).clamp(1, 512);
        let height = bbox.height().max(f64::MIN_POSITIVE);
        let band_height = height / band_count as f64;
        let mut bands = vec![Vec::new(); band_count];
        for i in 0..n {
            let a = points[i];
            let b = points[(i + 1) % n];
            let lo = ((a.im.min(b.im) - bbox.min.im) / band_height).floor() as isize;
            let hi = ((a.im.max(b.im) - bbox.min.im) / band_height).floor() as isize;
            for band in lo.max(0)..=hi.min(band_count as isize - 1) {
                bands[band as usize].push(i as u32);
            }
        }
        Polygon {
            points,
            bbox,
            band_height,
            bands,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.points)
    }

    /// Even-odd rule containment.
    pub fn contains(&self, p: Point) -> bool {
        if !self.bbox.contains(p) || self.points.len() < 3 {
            return false;
        }
        let band = (((p.im - self.bbox.min.im) / self.band_height).floor() as usize)
            .min(self.bands.len() - 1);
        let n = self.points.len();
        let mut inside = false;
        for &i in &self.bands[band] {
            let a = self.points[i as usize];
            let b = self.points[(i as usize + 1) % n];
            if (a.im > p.im) != (b.im > p.im) {
                let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if p.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from `p` to the polygon outline.
    pub fn distance(&self, p: Point) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| point_segment_distance(p, self.points[i], self.points[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Region bounded by one outer polygon and any number of hole polygons.
#[derive(Debug, Clone)]
pub struct Region {
    pub outer: Polygon,
    pub holes: Vec<Polygon>,
}

impl Region {
    pub fn new(outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Region {
        Region {
            outer: Polygon::new(outer),
            holes: holes.into_iter().map(Polygon::new).collect(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.outer.contains(p) && !self.holes.iter().any(|h| h.contains(p))
    }

    pub fn bbox(&self) -> BBox {
        self.outer.bbox()
    }

    pub fn area(&self) -> f64 {
        self.outer.signed_area().abs() - self.holes.iter().map(|h| h.signed_area().abs()).sum::<f64>()
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.holes
            .iter()
            .map(|h| h.distance(p))
            .fold(self.outer.distance(p), f64::min)
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn coord(p: Point) -> Coord<f64> {
    Coord { x: p.re, y: p.im }
}

/// Robust orientation of `c` relative to the directed line `a -> b`.
pub fn orientation(a: Point, b: Point, c: Point) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed-segment intersection test (touching counts) with exact orientation signs.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Proper crossing: the open segments cross at a single interior point.
pub fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Uniform-grid bucket index over the segments of a polyline.
pub struct SegmentIndex<'a> {
    points: &'a [Point],
    closed: bool,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl<'a> SegmentIndex<'a> {
    pub fn new(points: &'a [Point], closed: bool) -> Self {
        let bbox = BBox::of(points);
        let count = Self::segment_count_of(points.len(), closed).max(1);
        let span = bbox.width().max(bbox.height()).max(1e-12);
        let cells_per_side = ((count as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let cell = span / cells_per_side as f64 * 1.0000001;
        let nx = ((bbox.width() / cell).floor() as usize + 1).max(1);
        let ny = ((bbox.height() / cell).floor() as usize + 1).max(1);
        let mut index = SegmentIndex {
            points,
            closed,
            origin: bbox.min,
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
        };
        for s in 0..Self::segment_count_of(points.len(), closed) {
            let (a, b) = index.segment(s);
            let (x0, y0, x1, y1) = index.cell_range(a, b);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    index.cells[y * nx + x].push(s as u32);
                }
            }
        }
        index
    }

    fn segment_count_of(len: usize, closed: bool) -> usize {
        match (len, closed) {
            (0 | 1, _) => 0,
            (n, true) => n,
            (n, false) => n - 1,
        }
    }

    pub fn segment_count(&self) -> usize {
        Self::segment_count_of(self.points.len(), self.closed)
    }

    pub fn segment(&self, s: usize) -> (Point, Point) {
        let n = self.points.len();
        (self.points[s], self.points[(s + 1) % n])
    }

    fn cell_range(&self, a: Point, b: Point) -> (usize, usize, usize, usize) {
        let clamp = |v: f64, hi: usize| -> usize { (v.floor().max(0.0) as usize).min(hi - 1) };
        let x0 = clamp((a.re.min(b.re) - self.origin.re) / self.cell, self.nx);
        let x1 = clamp((a.re.max(b.re) - self.origin.re) / self.cell, self.nx);
        let y0 = clamp((a.im.min(b.im) - self.origin.im) / self.cell, self.ny);
        let y1 = clamp((a.im.max(b.im) - self.origin.im) / self.cell, self.ny);
        (x0, y0, x1, y1)
    }

    /// Indices of indexed segments whose buckets overlap the bounding box of `a -> b`.
    pub fn candidates(&self, a: Point, b: Point, out: &mut Vec<u32>) {
        out.clear();
        let bb = BBox::of(&[a, b]);
        let grid = BBox {
            min: self.origin,
            max: self.origin + Point::new(self.nx as f64 * self.cell, self.ny as f64 * self.cell),
        };
        if bb.max.re < grid.min.re || bb.min.re > grid.max.re || bb.max.im < grid.min.im || bb.min.im > grid.max.im {
            return;
        }
        let (x0, y0, x1, y1) = self.cell_range(a, b);
        for y in y0..=y1 {
            for x in x0..=x1 {
                out.extend_from_slice(&self.cells[y * self.nx + x]);
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// Number of (segment, segment) intersections between an open path and a closed polyline.
pub fn count_intersections(path: &[Point], closed: &[Point]) -> usize {
    if path.len() < 2 || closed.len() < 2 {
        return 0;
    }
    let index = SegmentIndex::new(closed, true);
    let mut buf = Vec::new();
    let mut count = 0;
    for w in path.windows(2) {
        index.candidates(w[0], w[1], &mut buf);
        for &s in &buf {
            let (q1, q2) = index.segment(s as usize);
            if segments_intersect(w[0], w[1], q1, q2) {
                count += 1;
            }
        }
    }
    count
}

/// Number of proper crossings between an open path and a closed polyline.
/// Touching, collinear overlap and crossings within `tol` of an endpoint do
/// not count.
pub fn count_crossings(path: &[Point], closed: &[Point], tol: f64) -> usize {
    if path.len() < 2 || closed.len() < 2 {
        return 0;
    }
    let index = SegmentIndex::new(closed, true);
    let mut buf = Vec::new();
    let mut count = 0;
    for w in path.windows(2) {
        index.candidates(w[0], w[1], &mut buf);
        for &s in &buf {
            let (q1, q2) = index.segment(s as usize);
            if segments_cross(w[0], w[1], q1, q2)
                && point_segment_distance(w[0], q1, q2) > tol
                && point_segment_distance(w[1], q1, q2) > tol
                && point_segment_distance(q1, w[0], w[1]) > tol
                && point_segment_distance(q2, w[0], w[1]) > tol
            {
                count += 1;
            }
        }
    }
    count
}

/// Proper self-crossings of an open polyline (adjacent segments ignored).
pub fn self_crossings(path: &[Point]) -> Vec<(usize, usize)> {
    let mut hits = Vec::new();
    if path.len() < 4 {
        return hits;
    }
    let index = SegmentIndex::new(path, false);
    let mut buf = Vec::new();
    for i in 0..path.len() - 1 {
        index.candidates(path[i], path[i + 1], &mut buf);
        for &j in &buf {
            let j = j as usize;
            if j <= i + 1 {
                continue;
            }
            let (q1, q2) = index.segment(j);
            if segments_cross(path[i], path[i + 1], q1, q2) {
                hits.push((i, j));
            }
        }
    }
    hits
}

/// Insert points on a closed polyline until no edge is longer than `max_spacing`.
pub fn densify_closed(poly: &[Point], max_spacing: f64) -> Vec<Point> {
    let n = poly.len();
    if n < 2 || !(max_spacing > 0.0) {
        return poly.to_vec();
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        out.push(a);
        let pieces = ((b - a).norm() / max_spacing).ceil() as usize;
        for k in 1..pieces {
            out.push(a + (b - a) * (k as f64 / pieces as f64));
        }
    }
    out
}

/// Unit-free turning angle (radians) at `b` for the polyline a -> b -> c.
pub fn turning_angle(a: Point, b: Point, c: Point) -> f64 {
    let u = b - a;
    let v = c - b;
    if u.norm_sqr() == 0.0 || v.norm_sqr() == 0.0 {
        return 0.0;
    }
    (v / u).arg().abs()
}
