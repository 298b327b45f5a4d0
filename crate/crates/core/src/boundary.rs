//! Boundary curves and their 2π-periodic, corner-graded parameterization.
//!
//! A boundary is a closed chain of line, arc and cubic B-spline segments.
//! Smooth boundaries (no corners) are a single closed spline or a full
//! circle and are rescaled linearly onto `[0, 2π]`. Piecewise-smooth
//! boundaries with `p_j` corners give each segment an equal share of
//! `[0, 2π]` and are then graded with the Kress substitution so that the
//! parameter speed vanishes at every corner.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationIssue};
use crate::geometry::{self, area_centroid, signed_area, BBox, Point, Polygon, Region};

/// Relative join tolerance used when chaining segments (times domain diameter).
pub const JOIN_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_GRADING: u32 = 3;
pub const DEFAULT_SAMPLES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Ccw,
    Cw,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        }
    }

    fn flipped(self) -> Orientation {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Line {
        start: Point,
        end: Point,
    },
    /// Circular arc from `start_angle` to `end_angle` in the given direction.
    /// Equal angles (mod 2π) describe a full circle.
    Arc {
        center: Point,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
        orientation: Orientation,
    },
    /// Uniform cubic B-spline over its control polygon. Open splines run
    /// over `t ∈ [0, k-3]`, closed ones over `t ∈ [0, k]`.
    Spline {
        controls: Vec<Point>,
        #[serde(default)]
        closed: bool,
    },
}

/// Cubic B-spline basis on one knot span.
pub fn spline_basis(u: f64) -> [f64; 4] {
    let v = 1.0 - u;
    [
        v * v * v / 6.0,
        (3.0 * u * u * u - 6.0 * u * u + 4.0) / 6.0,
        (-3.0 * u * u * u + 3.0 * u * u + 3.0 * u + 1.0) / 6.0,
        u * u * u / 6.0,
    ]
}

pub fn spline_basis_derivative(u: f64) -> [f64; 4] {
    let v = 1.0 - u;
    [
        -0.5 * v * v,
        1.5 * u * u - 2.0 * u,
        -1.5 * u * u + u + 0.5,
        0.5 * u * u,
    ]
}

pub fn spline_basis_second_derivative(u: f64) -> [f64; 4] {
    [1.0 - u, 3.0 * u - 2.0, -3.0 * u + 1.0, u]
}

impl Segment {
    pub fn line(start: Point, end: Point) -> Segment {
        Segment::Line { start, end }
    }

    pub fn arc(center: Point, radius: f64, start_angle: f64, end_angle: f64, orientation: Orientation) -> Segment {
        Segment::Arc {
            center,
            radius,
            start_angle,
            end_angle,
            orientation,
        }
    }

    pub fn circle(center: Point, radius: f64, orientation: Orientation) -> Segment {
        Segment::arc(center, radius, 0.0, 0.0, orientation)
    }

    pub fn open_spline(controls: Vec<Point>) -> Segment {
        Segment::Spline { controls, closed: false }
    }

    pub fn closed_spline(controls: Vec<Point>) -> Segment {
        Segment::Spline { controls, closed: true }
    }

    /// Signed sweep of an arc; a zero difference is a full turn.
    fn sweep(start_angle: f64, end_angle: f64, orientation: Orientation) -> f64 {
        let mut s = match orientation {
            Orientation::Ccw => (end_angle - start_angle).rem_euclid(TAU),
            Orientation::Cw => (start_angle - end_angle).rem_euclid(TAU),
        };
        if s < 1e-12 || TAU - s < 1e-12 {
            s = TAU;
        }
        s * orientation.sign()
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        match self {
            Segment::Line { start, end } => {
                if !(start.re.is_finite() && start.im.is_finite() && end.re.is_finite() && end.im.is_finite()) {
                    return Err("line endpoints must be finite".into());
                }
                if start == end {
                    return Err("line endpoints must be distinct".into());
                }
            }
            Segment::Arc {
                radius,
                start_angle,
                end_angle,
                center,
                ..
            } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(format!("arc radius must be positive, got {radius}"));
                }
                if !(start_angle.is_finite() && end_angle.is_finite() && center.re.is_finite() && center.im.is_finite()) {
                    return Err("arc parameters must be finite".into());
                }
            }
            Segment::Spline { controls, .. } => {
                if controls.len() < 4 {
                    return Err(format!("cubic B-spline needs at least 4 control points, got {}", controls.len()));
                }
                if controls.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
                    return Err("spline control points must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// True for segments that close on themselves smoothly (closed spline, full circle).
    pub fn is_closed_smooth(&self) -> bool {
        match self {
            Segment::Spline { closed, .. } => *closed,
            Segment::Arc {
                start_angle,
                end_angle,
                orientation,
                ..
            } => Segment::sweep(*start_angle, *end_angle, *orientation).abs() == TAU,
            Segment::Line { .. } => false,
        }
    }

    /// Upper bound of the native parameter interval.
    pub fn param_len(&self) -> f64 {
        match self {
            Segment::Line { start, end } => (end - start).norm(),
            Segment::Arc {
                radius,
                start_angle,
                end_angle,
                orientation,
                ..
            } => radius * Segment::sweep(*start_angle, *end_angle, *orientation).abs(),
            Segment::Spline { controls, closed } => {
                let k = controls.len() as f64;
                if *closed {
                    k
                } else {
                    k - 3.0
                }
            }
        }
    }

    fn spline_span(controls: &[Point], closed: bool, t: f64) -> (usize, f64) {
        let k = controls.len();
        let spans = if closed { k } else { k - 3 };
        let j = (t.floor().max(0.0) as usize).min(spans - 1);
        (j, t - j as f64)
    }

    fn spline_combine(controls: &[Point], closed: bool, t: f64, basis: fn(f64) -> [f64; 4]) -> Point {
        let k = controls.len();
        let (j, u) = Segment::spline_span(controls, closed, t);
        let w = basis(u);
        let mut acc = Point::new(0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            let idx = if closed { (j + i) % k } else { j + i };
            acc += controls[idx] * *wi;
        }
        acc
    }

    /// Point, first and second derivative at native parameter `s ∈ [0, param_len]`.
    pub fn jet(&self, s: f64) -> (Point, Point, Point) {
        match self {
            Segment::Line { start, end } => {
                let dir = (end - start) / (end - start).norm();
                (start + dir * s, dir, Point::new(0.0, 0.0))
            }
            Segment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
                orientation,
            } => {
                let sign = Segment::sweep(*start_angle, *end_angle, *orientation).signum();
                let phi = start_angle + sign * s / radius;
                let e = Point::from_polar(1.0, phi);
                (
                    center + e * *radius,
                    Point::new(0.0, sign) * e,
                    -e / *radius,
                )
            }
            Segment::Spline { controls, closed } => (
                Segment::spline_combine(controls, *closed, s, spline_basis),
                Segment::spline_combine(controls, *closed, s, spline_basis_derivative),
                Segment::spline_combine(controls, *closed, s, spline_basis_second_derivative),
            ),
        }
    }

    pub fn start(&self) -> Point {
        self.jet(0.0).0
    }

    pub fn end(&self) -> Point {
        self.jet(self.param_len()).0
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Segment {
        match self {
            Segment::Line { start, end } => Segment::Line {
                start: *end,
                end: *start,
            },
            Segment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
                orientation,
            } => Segment::Arc {
                center: *center,
                radius: *radius,
                start_angle: *end_angle,
                end_angle: *start_angle,
                orientation: orientation.flipped(),
            },
            Segment::Spline { controls, closed } => {
                let mut c = controls.clone();
                c.reverse();
                Segment::Spline {
                    controls: c,
                    closed: *closed,
                }
            }
        }
    }
}

fn spline_param(segment: &Segment, t: f64) -> Result<(&[Point], bool)> {
    let Segment::Spline { controls, closed } = segment else {
        return Err(Error::Parameter("segment is not a B-spline".into()));
    };
    segment.check().map_err(Error::Parameter)?;
    let hi = segment.param_len();
    if !(t >= -1e-12 && t <= hi + 1e-12) {
        return Err(Error::Domain(format!("spline parameter {t} outside [0, {hi}]")));
    }
    Ok((controls, *closed))
}

/// Evaluate a cubic B-spline segment at parameter `t`.
pub fn eval_spline(segment: &Segment, t: f64) -> Result<Point> {
    let (controls, closed) = spline_param(segment, t)?;
    Ok(Segment::spline_combine(controls, closed, t.clamp(0.0, segment.param_len()), spline_basis))
}

pub fn eval_spline_derivative(segment: &Segment, t: f64) -> Result<Point> {
    let (controls, closed) = spline_param(segment, t)?;
    Ok(Segment::spline_combine(
        controls,
        closed,
        t.clamp(0.0, segment.param_len()),
        spline_basis_derivative,
    ))
}

/// `v(t)` of the Kress grading and its first two derivatives.
fn grading_v(t: f64, p: f64) -> (f64, f64, f64) {
    let a = 1.0 / p - 0.5;
    let x = (PI - t) / PI;
    (
        a * x * x * x + (t - PI) / (p * PI) + 0.5,
        -3.0 * a * x * x / PI + 1.0 / (p * PI),
        6.0 * a * x / (PI * PI),
    )
}

/// `σ(t)`, `σ'(t)`, `σ''(t)` for the grading substitution with exponent `p`.
pub fn grading_jet(t: f64, p: u32) -> (f64, f64, f64) {
    let pf = p as f64;
    let pi = p as i32;
    let (u, du, ddu) = grading_v(t, pf);
    let (w0, dw0, ddw0) = grading_v(TAU - t, pf);
    let (w, dw, ddw) = (w0, -dw0, ddw0);
    let pow = |x: f64, e: i32| if e <= 0 { 1.0 } else { x.powi(e) };
    let a = pow(u, pi);
    let da = pf * pow(u, pi - 1) * du;
    let dda = pf * (pf - 1.0) * pow(u, pi - 2) * du * du + pf * pow(u, pi - 1) * ddu;
    let b = pow(w, pi);
    let db = pf * pow(w, pi - 1) * dw;
    let ddb = pf * (pf - 1.0) * pow(w, pi - 2) * dw * dw + pf * pow(w, pi - 1) * ddw;
    let s = a + b;
    let ds = da + db;
    let num = da * b - a * db;
    let dnum = dda * b - a * ddb;
    (
        TAU * a / s,
        TAU * num / (s * s),
        TAU * (dnum / (s * s) - 2.0 * num * ds / (s * s * s)),
    )
}

/// Kress grading map `σ: [0, 2π] → [0, 2π]`.
pub fn grading_map(t_hat: f64, p: u32) -> Result<f64> {
    if p < 2 {
        return Err(Error::Parameter(format!("grading parameter must be >= 2, got {p}")));
    }
    if !(0.0..=TAU).contains(&t_hat) {
        return Err(Error::Domain(format!("grading argument {t_hat} outside [0, 2π]")));
    }
    Ok(grading_jet(t_hat, p).0)
}

/// Closed boundary curve: a chain of segments with `corners` joints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub segments: Vec<Segment>,
    pub corners: usize,
}

impl BoundaryCurve {
    /// Build and validate a curve. `corners` of `None` means "one per joint".
    pub fn new(segments: Vec<Segment>, corners: Option<usize>) -> Result<BoundaryCurve> {
        let corners = corners.unwrap_or_else(|| {
            if segments.len() == 1 && segments[0].is_closed_smooth() {
                0
            } else {
                segments.len()
            }
        });
        let curve = BoundaryCurve { segments, corners };
        let issues = curve.issues();
        if let Some(first) = issues.into_iter().next() {
            return Err(Error::Geometry(first));
        }
        Ok(curve)
    }

    /// Smooth boundary from a single closed segment.
    pub fn smooth(segment: Segment) -> Result<BoundaryCurve> {
        BoundaryCurve::new(vec![segment], Some(0))
    }

    /// Polygon boundary made of straight edges through `vertices`.
    pub fn polygon(vertices: &[Point]) -> Result<BoundaryCurve> {
        let n = vertices.len();
        let segs = (0..n).map(|i| Segment::line(vertices[i], vertices[(i + 1) % n])).collect();
        BoundaryCurve::new(segs, None)
    }

    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.segments.is_empty() {
            out.push("boundary has no segments".to_string());
            return out;
        }
        for (i, s) in self.segments.iter().enumerate() {
            if let Err(e) = s.check() {
                out.push(format!("segment {i}: {e}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        if self.corners == 0 {
            if self.segments.len() != 1 || !self.segments[0].is_closed_smooth() {
                out.push("a boundary without corners must be one closed spline or full circle".to_string());
            }
            return out;
        }
        if self.corners != self.segments.len() {
            out.push(format!(
                "corner count {} does not match the {} segment joints",
                self.corners,
                self.segments.len()
            ));
        }
        if let Some(i) = self.segments.iter().position(|s| s.is_closed_smooth()) {
            out.push(format!("segment {i} is closed and cannot be chained with corners"));
        }
        let tol = JOIN_TOLERANCE * self.bbox().diameter().max(f64::MIN_POSITIVE);
        let n = self.segments.len();
        for i in 0..n {
            let end = self.segments[i].end();
            let next = self.segments[(i + 1) % n].start();
            if (end - next).norm() > tol {
                out.push(format!(
                    "segment chain not closed between segments {i} and {} (gap {:.3e})",
                    (i + 1) % n,
                    (end - next).norm()
                ));
            }
        }
        out
    }

    fn bbox(&self) -> BBox {
        let pts: Vec<Point> = self
            .segments
            .iter()
            .flat_map(|s| {
                let l = s.param_len();
                (0..=16).map(move |i| s.jet(l * i as f64 / 16.0).0)
            })
            .collect();
        BBox::of(&pts)
    }

    pub fn reversed(&self) -> BoundaryCurve {
        let mut segments: Vec<Segment> = self.segments.iter().map(Segment::reversed).collect();
        segments.reverse();
        BoundaryCurve {
            segments,
            corners: self.corners,
        }
    }

    /// Evaluate the curve on the 2π-periodic parameter `t`, with grading exponent
    /// `grading` applied per segment when the curve has corners.
    /// `graded = false` gives the plain per-segment affine parameterization.
    fn jet_at(&self, k: usize, n: usize, grading: u32, graded: bool) -> (f64, Point, Point, Point, bool) {
        let t = TAU * k as f64 / n as f64;
        if self.corners == 0 {
            let seg = &self.segments[0];
            let l = seg.param_len();
            let scale = l / TAU;
            let (z, dz, ddz) = seg.jet(t * scale);
            return (t, z, dz * scale, ddz * scale * scale, false);
        }
        let pj = self.corners;
        // segment index and exact local offset from integer arithmetic
        let i = (k * pj / n).min(pj - 1);
        let local = TAU * (k * pj - i * n) as f64 / n as f64; // = p_j (t - 2πi/p_j)
        let seg = &self.segments[i];
        let l = seg.param_len();
        let (sig, dsig, ddsig) = if graded {
            grading_jet(local, grading)
        } else {
            (local, 1.0, 0.0)
        };
        let s = l * sig / TAU;
        let ds = l * pj as f64 * dsig / TAU;
        let dds = l * (pj * pj) as f64 * ddsig / TAU;
        let (z, dz, ddz) = seg.jet(s.clamp(0.0, l));
        let corner = graded && local == 0.0;
        if corner {
            return (t, z, Point::new(0.0, 0.0), ddz * 0.0, true);
        }
        (t, z, dz * ds, ddz * ds * ds + dz * dds, false)
    }

    /// Dense, ungraded resampling used for containment and area computations.
    pub fn dense_polygon(&self, count: usize) -> Vec<Point> {
        (0..count).map(|k| self.jet_at(k, count, 2, false).1).collect()
    }
}

/// Samples of one boundary on the uniform grid `t_k = 2πk/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySamples {
    pub t: Vec<f64>,
    pub z: Vec<Point>,
    pub dz: Vec<Point>,
    pub d2z: Vec<Point>,
    pub corner: Vec<bool>,
    /// Grading exponent; at a corner sample `η(t) − η(t_c)` vanishes to this order.
    pub grading: u32,
}

impl BoundarySamples {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Sample `η`, `η'`, `η''` of a boundary curve at `n` uniform parameters.
pub fn parameterize(curve: &BoundaryCurve, p: u32, n: usize) -> Result<BoundarySamples> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::Parameter(format!("samples per boundary must be even and positive, got {n}")));
    }
    if curve.corners > 0 && p < 2 {
        return Err(Error::Parameter(format!("grading parameter must be >= 2, got {p}")));
    }
    if let Some(first) = curve.issues().into_iter().next() {
        return Err(Error::Geometry(first));
    }
    let mut out = BoundarySamples {
        t: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        dz: Vec::with_capacity(n),
        d2z: Vec::with_capacity(n),
        corner: Vec::with_capacity(n),
        grading: p,
    };
    for k in 0..n {
        let (t, z, dz, d2z, corner) = curve.jet_at(k, n, p, true);
        out.t.push(t);
        out.z.push(z);
        out.dz.push(dz);
        out.d2z.push(d2z);
        out.corner.push(corner);
    }
    Ok(out)
}

/// The multiply connected region: outer boundary first, then holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub boundaries: Vec<BoundaryCurve>,
    pub origin: Point,
    #[serde(default)]
    pub z1: Option<Point>,
    #[serde(default = "default_grading")]
    pub grading: u32,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_grading() -> u32 {
    DEFAULT_GRADING
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// Disc slit map (case I) or annular slit map (case II) selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum Case {
    /// Case I: the area centroid lies in the material.
    Disc,
    /// Case II: the area centroid lies inside hole `hole`.
    Annular { hole: usize },
}

impl DomainSpec {
    pub fn new(boundaries: Vec<BoundaryCurve>, origin: Point, z1: Option<Point>) -> Result<DomainSpec> {
        let spec = DomainSpec {
            boundaries,
            origin,
            z1,
            grading: DEFAULT_GRADING,
            samples: DEFAULT_SAMPLES,
        };
        let issues = spec.validate();
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }
        Ok(spec)
    }

    pub fn with_samples(mut self, n: usize) -> DomainSpec {
        self.samples = n;
        self
    }

    pub fn with_grading(mut self, p: u32) -> DomainSpec {
        self.grading = p;
        self
    }

    pub fn hole_count(&self) -> usize {
        self.boundaries.len().saturating_sub(1)
    }

    fn dense_count(&self) -> usize {
        (4 * self.samples).max(256)
    }

    /// Dense polygon of boundary `j` (4n points, ungraded).
    pub fn dense_polygon(&self, j: usize) -> Vec<Point> {
        self.boundaries[j].dense_polygon(self.dense_count())
    }

    pub fn region(&self) -> Region {
        let outer = self.dense_polygon(0);
        let holes = (1..self.boundaries.len()).map(|j| self.dense_polygon(j)).collect();
        Region::new(outer, holes)
    }

    pub fn diameter(&self) -> f64 {
        BBox::of(&self.dense_polygon(0)).diameter()
    }

    /// Reverse boundaries that run the wrong way (outer must be CCW, holes CW).
    /// Returns the indices that were flipped.
    pub fn normalize_orientation(&mut self) -> Vec<usize> {
        let mut flipped = Vec::new();
        for j in 0..self.boundaries.len() {
            let area = signed_area(&self.boundaries[j].dense_polygon(256));
            if (j == 0 && area < 0.0) || (j > 0 && area > 0.0) {
                self.boundaries[j] = self.boundaries[j].reversed();
                flipped.push(j);
            }
        }
        flipped
    }

    /// Full structural and geometric validation; collects every issue.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        if self.boundaries.len() < 2 {
            issues.push(ValidationIssue::new("domain needs an outer boundary and at least one hole"));
        }
        if self.grading < 2 {
            issues.push(ValidationIssue::new(format!("grading parameter must be >= 2, got {}", self.grading)));
        }
        if self.samples == 0 || self.samples % 2 != 0 {
            issues.push(ValidationIssue::new(format!(
                "samples per boundary must be even and positive, got {}",
                self.samples
            )));
        }
        let mut usable = vec![true; self.boundaries.len()];
        for (j, b) in self.boundaries.iter().enumerate() {
            for msg in b.issues() {
                issues.push(ValidationIssue::new(msg).on(j));
                usable[j] = false;
            }
        }
        if issues.iter().any(|i| i.boundary.is_none()) || self.boundaries.is_empty() || !usable[0] {
            return issues;
        }
        let count = self.dense_count().min(4096);
        let polys: Vec<Option<Polygon>> = self
            .boundaries
            .iter()
            .zip(&usable)
            .map(|(b, ok)| ok.then(|| Polygon::new(b.dense_polygon(count))))
            .collect();
        for (j, poly) in polys.iter().enumerate() {
            let Some(poly) = poly else { continue };
            let area = poly.signed_area();
            if j == 0 && area <= 0.0 {
                issues.push(ValidationIssue::new("outer boundary must be counterclockwise").on(0));
            }
            if j > 0 && area >= 0.0 {
                issues.push(ValidationIssue::new("inner boundary must be clockwise").on(j));
            }
        }
        let outer = polys[0].as_ref().expect("outer checked usable");
        // holes inside the outer boundary and pairwise disjoint
        for i in 1..polys.len() {
            let Some(pi) = &polys[i] else { continue };
            let p0 = pi.points()[0];
            if geometry::count_intersections(pi.points(), outer.points()) > 0 || !outer.contains(p0) {
                issues.push(ValidationIssue::new("hole is not strictly inside the outer boundary").on(i).at(p0.re, p0.im));
            }
            for j in (i + 1)..polys.len() {
                let Some(pj) = &polys[j] else { continue };
                let q0 = pj.points()[0];
                if geometry::count_intersections(pi.points(), pj.points()) > 0
                    || pi.contains(q0)
                    || pj.contains(p0)
                {
                    issues.push(ValidationIssue::new("holes overlap").on(i).with(j).at(q0.re, q0.im));
                }
            }
        }
        let o = self.origin;
        if !outer.contains(o) {
            issues.push(ValidationIssue::new("origin lies outside the outer boundary").on(0).at(o.re, o.im));
        }
        for (j, p) in polys.iter().enumerate().skip(1) {
            if let Some(p) = p {
                if p.contains(o) {
                    issues.push(ValidationIssue::new("origin lies inside a hole").on(j).at(o.re, o.im));
                }
            }
        }
        if let Some(z1) = self.z1 {
            let inside: Vec<usize> = polys
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, p)| p.as_ref().is_some_and(|p| p.contains(z1)))
                .map(|(j, _)| j)
                .collect();
            if inside.len() != 1 {
                issues.push(
                    ValidationIssue::new("hole anchor z1 must lie inside exactly one hole (annular case rule)")
                        .at(z1.re, z1.im),
                );
            }
            if z1 == o {
                issues.push(ValidationIssue::new("hole anchor z1 coincides with the origin").at(z1.re, z1.im));
            }
        }
        issues
    }

    /// Area centroid of the region (outer centroid minus hole contributions).
    pub fn area_centroid(&self) -> Point {
        let (a0, c0) = area_centroid(&self.dense_polygon(0));
        let mut area = a0.abs();
        let mut moment = c0 * a0.abs();
        for j in 1..self.boundaries.len() {
            let (a, c) = area_centroid(&self.dense_polygon(j));
            area -= a.abs();
            moment -= c * a.abs();
        }
        moment / area
    }

    /// Index of the hole containing `p`, if any.
    pub fn hole_containing(&self, p: Point) -> Option<usize> {
        (1..self.boundaries.len()).find(|&j| Polygon::new(self.dense_polygon(j)).contains(p))
    }

    /// Move hole `j` to position 1 (the boundary wrapped by the annulus' inner circle).
    pub fn relabel_hole_first(&mut self, j: usize) {
        if j > 1 {
            self.boundaries.swap(1, j);
        }
    }
}

/// Decide between the disc (case I) and annular (case II) slit map.
pub fn classify_case(spec: &DomainSpec) -> Result<Case> {
    let centroid = spec.area_centroid();
    match spec.hole_containing(centroid) {
        None => Ok(Case::Disc),
        Some(hole) => {
            if let Some(z1) = spec.z1 {
                if spec.hole_containing(z1) != Some(hole) {
                    return Err(Error::Configuration(format!(
                        "annular case: z1 must lie in hole {hole}, which contains the area centroid"
                    )));
                }
            } else if !Polygon::new(spec.dense_polygon(hole)).contains(centroid) {
                return Err(Error::Configuration(format!(
                    "annular case: no hole anchor given and none can be placed in hole {hole}"
                )));
            }
            Ok(Case::Annular { hole })
        }
    }
}

/// Discretized boundary of a whole domain, stored relative to absolute coordinates
/// together with the origin used by the integral equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedBoundary {
    pub n: usize,
    pub origin: Point,
    pub boundaries: Vec<BoundarySamples>,
}

impl DiscretizedBoundary {
    pub fn from_spec(spec: &DomainSpec) -> Result<DiscretizedBoundary> {
        let boundaries = spec
            .boundaries
            .iter()
            .map(|b| parameterize(b, spec.grading, spec.samples))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiscretizedBoundary {
            n: spec.samples,
            origin: spec.origin,
            boundaries,
        })
    }

    pub fn boundary_count(&self) -> usize {
        self.boundaries.len()
    }

    pub fn total(&self) -> usize {
        self.n * self.boundaries.len()
    }

    pub fn point(&self, idx: usize) -> Point {
        self.boundaries[idx / self.n].z[idx % self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Point {
        Point::new(re, im)
    }

    fn unit_square() -> BoundaryCurve {
        BoundaryCurve::polygon(&[c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)]).unwrap()
    }

    #[test]
    fn basis_values_at_knots() {
        let f0 = spline_basis(0.0);
        let expect0 = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0, 0.0];
        let f1 = spline_basis(1.0);
        let expect1 = [0.0, 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];
        for i in 0..4 {
            assert!((f0[i] - expect0[i]).abs() < 1e-15);
            assert!((f1[i] - expect1[i]).abs() < 1e-15);
        }
        let d0 = spline_basis_derivative(0.0);
        let expect_d0 = [-0.5, 0.0, 0.5, 0.0];
        for i in 0..4 {
            assert!((d0[i] - expect_d0[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn open_spline_start_point() {
        let p = [c(0.0, 0.0), c(1.0, 2.0), c(3.0, -1.0), c(4.0, 4.0)];
        let seg = Segment::open_spline(p.to_vec());
        let got = eval_spline(&seg, 0.0).unwrap();
        let want = (p[0] + p[1] * 4.0 + p[2]) / 6.0;
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn constant_spline() {
        let z0 = c(0.3, -1.7);
        let seg = Segment::open_spline(vec![z0; 6]);
        for i in 0..=30 {
            let t = 3.0 * i as f64 / 30.0;
            assert!((eval_spline(&seg, t).unwrap() - z0).norm() < 1e-14);
            assert!(eval_spline_derivative(&seg, t).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn spline_parameter_out_of_range() {
        let seg = Segment::open_spline(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0)]);
        assert!(matches!(eval_spline(&seg, 1.5), Err(Error::Domain(_))));
        assert!(matches!(eval_spline(&seg, -0.1), Err(Error::Domain(_))));
        let closed = Segment::closed_spline(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0)]);
        assert!(eval_spline(&closed, 3.5).is_ok());
        assert!(matches!(
            eval_spline(&Segment::open_spline(vec![c(0.0, 0.0); 3]), 0.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn spline_derivative_matches_central_difference() {
        let seg = Segment::closed_spline(vec![
            c(1.0, 0.0),
            c(0.5, 0.9),
            c(-0.6, 0.8),
            c(-1.1, -0.2),
            c(-0.3, -1.0),
            c(0.7, -0.7),
        ]);
        let h = 1e-5;
        for i in 1..60 {
            let t = 6.0 * i as f64 / 61.0;
            let fd = (eval_spline(&seg, t + h).unwrap() - eval_spline(&seg, t - h).unwrap()) / (2.0 * h);
            let d = eval_spline_derivative(&seg, t).unwrap();
            assert!((fd - d).norm() < 1e-8, "t={t}: {fd} vs {d}");
        }
    }

    #[test]
    fn grading_fixed_points() {
        for p in [2, 3, 5] {
            assert!(grading_map(0.0, p).unwrap().abs() < 1e-15);
            assert!((grading_map(PI, p).unwrap() - PI).abs() < 1e-14);
            assert!((grading_map(TAU, p).unwrap() - TAU).abs() < 1e-14);
            let (_, d0, _) = grading_jet(0.0, p);
            let (_, d1, _) = grading_jet(TAU, p);
            assert!(d0.abs() < 1e-14 && d1.abs() < 1e-14);
        }
        assert!(matches!(grading_map(1.0, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn grading_derivatives_match_finite_differences() {
        let h = 1e-5;
        for p in [2, 3, 4] {
            for i in 1..50 {
                let t = TAU * i as f64 / 50.0;
                let (_, d, dd) = grading_jet(t, p);
                let fd = (grading_jet(t + h, p).0 - grading_jet(t - h, p).0) / (2.0 * h);
                let fdd = (grading_jet(t + h, p).1 - grading_jet(t - h, p).1) / (2.0 * h);
                assert!((d - fd).abs() < 1e-7, "p={p} t={t}");
                assert!((dd - fdd).abs() < 1e-6, "p={p} t={t}");
            }
        }
    }

    #[test]
    fn square_corners_on_grid() {
        let samples = parameterize(&unit_square(), 3, 64).unwrap();
        let corners = [c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)];
        for (i, corner) in corners.iter().enumerate() {
            let k = i * 16;
            assert!((samples.z[k] - corner).norm() < 1e-14);
            assert_eq!(samples.dz[k], c(0.0, 0.0));
            assert!(samples.corner[k]);
        }
        assert_eq!(samples.corner.iter().filter(|&&x| x).count(), 4);
        for k in 0..64 {
            if !samples.corner[k] {
                assert!(samples.dz[k].norm() > 0.0);
            }
        }
    }

    #[test]
    fn unit_circle_spline_is_pure_rescale() {
        // closed B-spline through a circle: control radius scaled to pass near r = 1
        let k = 64;
        let scale = 1.0 / (2.0 + (TAU / k as f64).cos()) * 3.0;
        let controls: Vec<Point> = (0..k).map(|i| Point::from_polar(scale, TAU * i as f64 / k as f64)).collect();
        let curve = BoundaryCurve::smooth(Segment::closed_spline(controls)).unwrap();
        let s = parameterize(&curve, 3, 4).unwrap();
        for (i, z) in s.z.iter().enumerate() {
            let expect = Point::from_polar(1.0, TAU * i as f64 / 4.0 + TAU / k as f64);
            assert!((z - expect).norm() < 1e-3, "{z} vs {expect}");
        }
    }

    #[test]
    fn arc_full_circle_is_smooth() {
        let curve = BoundaryCurve::smooth(Segment::circle(c(0.2, 0.1), 0.5, Orientation::Cw)).unwrap();
        let s = parameterize(&curve, 3, 128).unwrap();
        assert!(signed_area(&s.z) < 0.0);
        for k in 0..128 {
            assert!(((s.z[k] - c(0.2, 0.1)).norm() - 0.5).abs() < 1e-14);
            assert!((s.dz[k].norm() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn corner_count_mismatch_rejected() {
        let segs = unit_square().segments;
        assert!(matches!(BoundaryCurve::new(segs.clone(), Some(3)), Err(Error::Geometry(_))));
        let mut open = segs;
        open.pop();
        assert!(matches!(BoundaryCurve::new(open, None), Err(Error::Geometry(_))));
    }

    #[test]
    fn samples_cluster_at_corners() {
        let n = 256;
        let s = parameterize(&unit_square(), 3, n).unwrap();
        let corners = [c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)];
        let perimeter = 8.0;
        let window = 0.05 * perimeter;
        let near_corner = s
            .z
            .iter()
            .filter(|z| corners.iter().any(|q| (*z - q).norm() < window / 2.0))
            .count();
        let mids = [c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        let near_mid = s
            .z
            .iter()
            .filter(|z| mids.iter().any(|q| (*z - q).norm() < window / 2.0))
            .count();
        assert!(near_corner as f64 >= 3.0 * near_mid as f64, "{near_corner} vs {near_mid}");
    }

    #[test]
    fn odd_sample_count_rejected() {
        assert!(matches!(parameterize(&unit_square(), 3, 63), Err(Error::Parameter(_))));
    }
}
