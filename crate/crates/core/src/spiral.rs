//! Spiral synthesis: a clamped cubic B-spline through the iso-parameter ladder
//! in the (angle, radius) plane, rotated until it misses every slit, pulled
//! back through the inverse map, spliced with the boundary loops and trimmed.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, PlanningDiagnostics, Result};
use crate::geometry::{count_crossings, densify_closed, segments_cross, segments_intersect, Point, Region, SegmentIndex};
use crate::isoparam::IsoParamFamily;
use crate::metrics::CoverageRaster;
use crate::slitmap::{MapKind, MappingSolution, SlitArc};

pub const DEFAULT_SAMPLES_PER_TURN: usize = 256;
pub const DEFAULT_THETA_STEPS: usize = 360;

/// A point of the mapped plane in polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Polar {
    pub theta: f64,
    pub rho: f64,
}

impl Polar {
    pub fn new(theta: f64, rho: f64) -> Polar {
        Polar { theta, rho }
    }

    pub fn w(&self) -> Point {
        Point::from_polar(self.rho, self.theta)
    }

    fn plane(&self) -> Point {
        Point::new(self.theta, self.rho)
    }
}

/// Control points `(θ_j, R_j)` of the mapped spiral, ends doubled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlLadder {
    pub points: Vec<Polar>,
}

impl ControlLadder {
    pub fn theta0(&self) -> f64 {
        self.points[0].theta
    }

    /// Spline parameter range `[0, k + 1]`: one unit per turn.
    pub fn turns(&self) -> usize {
        self.points.len() - 3
    }

    pub fn shifted(&self, dtheta: f64) -> ControlLadder {
        ControlLadder {
            points: self.points.iter().map(|p| Polar::new(p.theta + dtheta, p.rho)).collect(),
        }
    }
}

/// `SP = (θ0, 1), (θ0, 1), (θ1, R_C1), …, (θk, R_Ck), (θk+1, R_min), (θk+1, R_min)`
/// with `θ_j = θ0 + 2πj`.
pub fn build_ladder(radii: &[f64], r_min: f64, theta0: f64) -> Result<ControlLadder> {
    if radii.is_empty() {
        return Err(Error::Parameter("ladder needs at least the outer radius".into()));
    }
    if !(theta0 > -PI && theta0 <= PI) {
        return Err(Error::Parameter(format!("θ0 must lie in (−π, π], got {theta0}")));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Parameter(format!("ladder radii must be strictly decreasing: {radii:?}")));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > r_min && **r <= 1.0)) {
        return Err(Error::Parameter(format!("ladder radius {r} outside (R_min = {r_min}, 1]")));
    }
    let mut points = Vec::with_capacity(radii.len() + 3);
    points.push(Polar::new(theta0, radii[0]));
    for (j, r) in radii.iter().enumerate() {
        points.push(Polar::new(theta0 + TAU * j as f64, *r));
    }
    let last = Polar::new(theta0 + TAU * radii.len() as f64, r_min);
    points.push(last);
    points.push(last);
    Ok(ControlLadder { points })
}

/// Clamped open cubic B-spline with the ladder as control polygon.
#[derive(Debug, Clone)]
pub struct LadderSpline {
    controls: Vec<Point>,
    knots: Vec<f64>,
}

impl LadderSpline {
    pub fn new(ladder: &ControlLadder) -> LadderSpline {
        let controls: Vec<Point> = ladder.points.iter().map(Polar::plane).collect();
        let n = controls.len();
        let inner = n - 4;
        let mut knots = vec![0.0; 4];
        knots.extend((1..=inner).map(|i| i as f64));
        knots.extend(std::iter::repeat_n((inner + 1) as f64, 4));
        LadderSpline { controls, knots }
    }

    /// Upper end of the parameter range.
    pub fn end(&self) -> f64 {
        (self.controls.len() - 3) as f64
    }

    pub fn eval(&self, u: f64) -> Polar {
        let u = u.clamp(0.0, self.end());
        let last = self.controls.len() - 1;
        // span i with knots[i] <= u < knots[i+1], restricted to 3..=last
        let mut i = 3;
        while i < last && self.knots[i + 1] <= u {
            i += 1;
        }
        let mut d = [Point::new(0.0, 0.0); 4];
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = self.controls[j + i - 3];
        }
        for r in 1..=3 {
            for j in (r..=3).rev() {
                let lo = self.knots[j + i - 3];
                let hi = self.knots[j + 1 + i - r];
                let a = if hi > lo { (u - lo) / (hi - lo) } else { 0.0 };
                d[j] = d[j - 1] * (1.0 - a) + d[j] * a;
            }
        }
        Polar::new(d[3].re, d[3].im)
    }

    pub fn sample(&self, samples_per_turn: usize) -> Vec<(f64, Polar)> {
        let count = (self.end() * samples_per_turn as f64).round() as usize;
        (0..=count)
            .map(|i| {
                let u = self.end() * i as f64 / count as f64;
                (u, self.eval(u))
            })
            .collect()
    }
}

/// Sampled mapped-plane spiral for a ladder.
pub fn interpolate_ladder(ladder: &ControlLadder, samples_per_turn: usize) -> Result<Vec<Polar>> {
    if samples_per_turn < 32 {
        return Err(Error::Parameter(format!("samples_per_turn must be at least 32, got {samples_per_turn}")));
    }
    Ok(LadderSpline::new(ladder).sample(samples_per_turn).into_iter().map(|p| p.1).collect())
}

/// Intersections between a mapped-plane polyline and the slits repeated every
/// 2π along the angle axis, decided with exact orientation predicates.
pub fn slit_intersections(curve: &[Polar], slits: &[SlitArc]) -> usize {
    let mut count = 0;
    for w in curve.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (lo_r, hi_r) = (p.rho.min(q.rho), p.rho.max(q.rho));
        let (lo_t, hi_t) = (p.theta.min(q.theta), p.theta.max(q.theta));
        for s in slits {
            if s.radius < lo_r || s.radius > hi_r {
                continue;
            }
            let first = ((lo_t - s.start - s.extent) / TAU).floor() as i64;
            let last = ((hi_t - s.start) / TAU).ceil() as i64;
            for rep in first..=last {
                let a = Point::new(s.start + TAU * rep as f64, s.radius);
                let b = Point::new(s.start + s.extent + TAU * rep as f64, s.radius);
                if segments_intersect(p.plane(), q.plane(), a, b) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Smallest mapped-plane distance from curve vertices to any slit.
pub fn slit_clearance(curve: &[Polar], slits: &[SlitArc]) -> f64 {
    curve
        .iter()
        .flat_map(|p| slits.iter().map(move |s| s.distance(p.w())))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theta0Candidate {
    pub theta0: f64,
    pub intersections: usize,
    pub clearance: f64,
}

/// Scan `θ0` over `steps` uniform values in `(−π, π]`. `base` is the spiral
/// for `θ0 = 0`; other start angles translate it along the angle axis.
/// Admissible candidates come first, ordered by decreasing clearance.
pub fn scan_theta0(base: &[Polar], slits: &[SlitArc], steps: usize) -> Result<Vec<Theta0Candidate>> {
    if steps == 0 {
        return Err(Error::Parameter("θ0 scan needs at least one step".into()));
    }
    if let Some(s) = slits.iter().find(|s| s.is_full_circle()) {
        return Err(Error::Planning(PlanningDiagnostics {
            reason: format!("slit of boundary {} closes the full circle at radius {}", s.boundary, s.radius),
            best_theta0: 0.0,
            intersections: 1,
            clearance: 0.0,
        }));
    }
    // crossings of each slit radius by the base curve, as angles
    let mut crossings: Vec<(usize, f64)> = Vec::new();
    for w in base.windows(2) {
        let (p, q) = (w[0], w[1]);
        for (k, s) in slits.iter().enumerate() {
            let (a, b) = (p.rho - s.radius, q.rho - s.radius);
            if a == 0.0 && b == 0.0 {
                crossings.push((k, p.theta));
                crossings.push((k, q.theta));
            } else if a * b <= 0.0 {
                let t = a / (a - b);
                crossings.push((k, p.theta + t * (q.theta - p.theta)));
            }
        }
    }
    let mut out: Vec<Theta0Candidate> = (0..steps)
        .map(|i| {
            let theta0 = -PI + TAU * (i + 1) as f64 / steps as f64;
            let intersections = crossings
                .iter()
                .filter(|(k, th)| {
                    let s = &slits[*k];
                    (th + theta0 - s.start).rem_euclid(TAU) <= s.extent
                })
                .count();
            let clearance = base
                .iter()
                .flat_map(|p| {
                    let w = Point::from_polar(p.rho, p.theta + theta0);
                    slits.iter().map(move |s| s.distance(w))
                })
                .fold(f64::INFINITY, f64::min);
            Theta0Candidate {
                theta0,
                intersections,
                clearance,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.intersections > 0)
            .cmp(&(b.intersections > 0))
            .then(a.intersections.cmp(&b.intersections))
            .then(b.clearance.total_cmp(&a.clearance))
            .then(a.theta0.total_cmp(&b.theta0))
    });
    Ok(out)
}

/// Map a mapped-plane point back to the region. Points on the outer circle and
/// on the inner circle of an annulus use the boundary correspondence directly.
fn pull_point(sol: &MappingSolution, p: Polar) -> Point {
    if p.rho >= 1.0 {
        return sol.boundary_point_at_angle(0, p.theta);
    }
    match sol.kind {
        MapKind::Disc if p.rho <= 0.0 => sol.origin,
        MapKind::Annular { .. } if p.rho <= sol.radii[1] => sol.boundary_point_at_angle(1, p.theta),
        _ => sol.inverse_eval_banded(p.w()),
    }
}

#[derive(Debug, Clone)]
pub struct Pullback {
    pub mapped: Vec<Polar>,
    pub points: Vec<Point>,
}

/// Sample the spline at `samples_per_turn` per turn, map every sample back and
/// subdivide until no segment exceeds `max_segment` and no vertex turns more
/// than `max_turn_deg` (within a few refinement passes).
pub fn pullback(
    spline: &LadderSpline,
    sol: &MappingSolution,
    samples_per_turn: usize,
    max_segment: f64,
    max_turn_deg: f64,
) -> Pullback {
    let end = spline.end();
    let mut us: Vec<f64> = spline.sample(samples_per_turn).into_iter().map(|p| p.0).collect();
    let map_u = |u: f64| -> (Polar, Point) {
        let p = spline.eval(u);
        let p = if u <= 0.0 {
            Polar::new(p.theta, 1.0)
        } else if u >= end {
            Polar::new(p.theta, spline.eval(end).rho)
        } else {
            p
        };
        (p, pull_point(sol, p))
    };
    let mut pts: Vec<(Polar, Point)> = us.iter().map(|u| map_u(*u)).collect();
    let max_turn = max_turn_deg.to_radians();
    for _ in 0..8 {
        let n = pts.len();
        let mut split = vec![false; n - 1];
        for i in 0..n - 1 {
            if (pts[i + 1].1 - pts[i].1).norm() > max_segment {
                split[i] = true;
            }
        }
        for i in 1..n - 1 {
            if crate::geometry::turning_angle(pts[i - 1].1, pts[i].1, pts[i + 1].1) > max_turn {
                split[i - 1] = true;
                split[i] = true;
            }
        }
        for (i, s) in split.iter_mut().enumerate() {
            if us[i + 1] - us[i] < 1e-7 {
                *s = false;
            }
        }
        if !split.iter().any(|s| *s) {
            break;
        }
        let mut nu = Vec::with_capacity(n * 2);
        let mut np = Vec::with_capacity(n * 2);
        for i in 0..n - 1 {
            nu.push(us[i]);
            np.push(pts[i]);
            if split[i] {
                let m = 0.5 * (us[i] + us[i + 1]);
                nu.push(m);
                np.push(map_u(m));
            }
        }
        nu.push(us[n - 1]);
        np.push(pts[n - 1]);
        us = nu;
        pts = np;
    }
    Pullback {
        mapped: pts.iter().map(|p| p.0).collect(),
        points: pts.iter().map(|p| p.1).collect(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FusionOptions {
    pub max_misalignment_deg: f64,
    /// Spiral–boundary distance window as multiples of the spacing `C`.
    pub min_distance: f64,
    pub max_distance: f64,
    /// Along-path advance of each blend as a multiple of the gap it bridges.
    pub advance: f64,
}

impl Default for FusionOptions {
    fn default() -> Self {
        FusionOptions {
            max_misalignment_deg: 15.0,
            min_distance: 0.25,
            max_distance: 2.0,
            advance: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Splice {
    pub boundary: usize,
    /// Spiral vertex where the path leaves for the boundary.
    pub spiral_index: usize,
    /// Spiral vertex where the path rejoins.
    pub rejoin_index: usize,
    /// Boundary vertex where the loop is entered.
    pub boundary_index: usize,
    /// Boundary vertex where the loop is left.
    pub exit_index: usize,
    pub distance: f64,
    pub misalignment_deg: f64,
    /// Loop traversed against the boundary's own orientation.
    pub reversed_loop: bool,
}

#[derive(Debug, Clone)]
pub struct FusedPath {
    pub points: Vec<Point>,
    /// Vertices belonging to a blend (including its two junctions).
    pub blend: Vec<bool>,
    pub splices: Vec<Splice>,
}

fn unit(z: Point) -> Point {
    let n = z.norm();
    if n > 0.0 {
        z / n
    } else {
        z
    }
}

fn open_tangent(p: &[Point], i: usize) -> Point {
    let a = p[i.saturating_sub(1)];
    let b = p[(i + 1).min(p.len() - 1)];
    unit(b - a)
}

fn closed_tangent(p: &[Point], i: usize) -> Point {
    let n = p.len();
    unit(p[(i + 1) % n] - p[(i + n - 1) % n])
}

/// Cubic Hermite curve from `a` (direction `ta`) to `b` (direction `tb`),
/// returned without its end points.
fn hermite(a: Point, ta: Point, b: Point, tb: Point, step: f64) -> Vec<Point> {
    let len = (b - a).norm();
    let pieces = ((len / step).ceil() as usize).max(8);
    let (ma, mb) = (ta * len, tb * len);
    (1..pieces)
        .map(|i| {
            let s = i as f64 / pieces as f64;
            let (s2, s3) = (s * s, s * s * s);
            a * (2.0 * s3 - 3.0 * s2 + 1.0) + ma * (s3 - 2.0 * s2 + s) + b * (-2.0 * s3 + 3.0 * s2) + mb * (s3 - s2)
        })
        .collect()
}

fn polyline_crosses(line: &[Point], index: &SegmentIndex, skip: impl Fn(usize) -> bool) -> bool {
    let mut buf = Vec::new();
    for w in line.windows(2) {
        index.candidates(w[0], w[1], &mut buf);
        for &s in &buf {
            if skip(s as usize) {
                continue;
            }
            let (q1, q2) = index.segment(s as usize);
            if segments_cross(w[0], w[1], q1, q2) {
                return true;
            }
        }
    }
    false
}

fn crossings_between(a: &[Point], b: &[Point]) -> usize {
    let mut count = 0;
    for u in a.windows(2) {
        for v in b.windows(2) {
            if segments_cross(u[0], u[1], v[0], v[1]) {
                count += 1;
            }
        }
    }
    count
}

struct PlannedSplice {
    splice: Splice,
    leave: Vec<Point>,
    rejoin: Vec<Point>,
}

/// Splice every boundary loop into the spiral. For boundary `j` the path runs
/// along the spiral to `S[a]`, blends onto the boundary a little ahead, walks
/// the whole loop back to the point beside `S[a]`, then blends back onto the
/// spiral at `S[a']`. The two blends cross once.
pub fn fuse_boundaries(spiral: &[Point], boundaries: &[Vec<Point>], c: f64, options: &FusionOptions) -> Result<FusedPath> {
    let ns = spiral.len();
    if ns < 8 {
        return Err(Error::Parameter(format!("spiral has only {ns} vertices")));
    }
    let thr = options.max_misalignment_deg.to_radians();
    let (dmin, dmax) = (options.min_distance * c, options.max_distance * c);
    let spiral_index = SegmentIndex::new(spiral, false);
    let boundary_index: Vec<SegmentIndex> = boundaries.iter().map(|b| SegmentIndex::new(b, true)).collect();
    // cumulative arc length along the spiral
    let mut sarc = vec![0.0; ns];
    for i in 1..ns {
        sarc[i] = sarc[i - 1] + (spiral[i] - spiral[i - 1]).norm();
    }
    let mut planned: Vec<PlannedSplice> = Vec::new();
    for (j, b) in boundaries.iter().enumerate() {
        let nb = b.len();
        let mut barc = vec![0.0; nb + 1];
        for i in 0..nb {
            barc[i + 1] = barc[i] + (b[(i + 1) % nb] - b[i]).norm();
        }
        let perimeter = barc[nb];
        let bidx = &boundary_index[j];
        // candidate (score, a, b, d, misalignment, reversed)
        let mut candidates: Vec<(f64, usize, usize, f64, f64, bool)> = Vec::new();
        let mut buf = Vec::new();
        for a in 1..ns - 1 {
            let p = spiral[a];
            let r = Point::new(dmax, dmax);
            bidx.candidates(p - r, p + r, &mut buf);
            let ts = open_tangent(spiral, a);
            let mut seen_b = Vec::new();
            for &s in &buf {
                let bi = s as usize;
                if seen_b.contains(&bi) {
                    continue;
                }
                seen_b.push(bi);
                let d = (b[bi] - p).norm();
                if d < dmin || d > dmax {
                    continue;
                }
                let tb = closed_tangent(b, bi);
                let ang = (tb / ts).arg().abs();
                let (mis, reversed) = if ang <= PI / 2.0 { (ang, false) } else { (PI - ang, true) };
                if mis > thr {
                    continue;
                }
                candidates.push((d / c + mis / thr, a, bi, d, mis, reversed));
            }
        }
        candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut chosen = None;
        let mut reason = format!("no spiral point within [{dmin:.4}, {dmax:.4}] with tangents aligned to {}°", options.max_misalignment_deg);
        for &(_, a, bi, d, mis, reversed) in candidates.iter().take(4000) {
            let advance = options.advance * d;
            // rejoin vertex on the spiral
            let Some(a2) = (a + 1..ns - 1).find(|&i| sarc[i] - sarc[a] >= advance) else {
                continue;
            };
            if planned.iter().any(|p| {
                let (lo, hi) = (p.splice.spiral_index, p.splice.rejoin_index);
                a <= hi + 2 && a2 + 2 >= lo
            }) {
                continue;
            }
            if advance >= 0.5 * perimeter {
                reason = "boundary loop too short for a blend".into();
                continue;
            }
            let dir: isize = if reversed { -1 } else { 1 };
            let step_idx = |i: usize, k: isize| -> usize { (i as isize + k * dir).rem_euclid(nb as isize) as usize };
            let along = |from: usize, to: usize| -> f64 {
                // boundary arc length walking in `dir` from `from` to `to`
                let (x, y) = if dir > 0 { (from, to) } else { (to, from) };
                let l = barc[y] - barc[x];
                if l >= 0.0 {
                    l
                } else {
                    l + perimeter
                }
            };
            let mut k = 1;
            while k < nb as isize && along(bi, step_idx(bi, k)) < advance {
                k += 1;
            }
            let b_in = step_idx(bi, k);
            let tdir = if reversed { -1.0 } else { 1.0 };
            let step = c / 8.0;
            let leave = hermite(spiral[a], open_tangent(spiral, a), b[b_in], closed_tangent(b, b_in) * tdir, step);
            let rejoin = hermite(b[bi], closed_tangent(b, bi) * tdir, spiral[a2], open_tangent(spiral, a2), step);
            let mut leave_full = vec![spiral[a]];
            leave_full.extend_from_slice(&leave);
            leave_full.push(b[b_in]);
            let mut rejoin_full = vec![b[bi]];
            rejoin_full.extend_from_slice(&rejoin);
            rejoin_full.push(spiral[a2]);
            if crossings_between(&leave_full, &rejoin_full) != 1 {
                reason = "blends do not form a single crossing".into();
                continue;
            }
            let hits_spiral = |line: &[Point]| polyline_crosses(line, &spiral_index, |s| s + 1 >= a && s <= a2);
            let hits_boundary = |line: &[Point]| boundary_index.iter().any(|ix| polyline_crosses(line, ix, |_| false));
            let hits_planned = |line: &[Point]| {
                planned
                    .iter()
                    .any(|p| crossings_between(line, &p.leave) + crossings_between(line, &p.rejoin) > 0)
            };
            if hits_spiral(&leave_full) || hits_spiral(&rejoin_full) {
                reason = "blend would cross another spiral turn".into();
                continue;
            }
            if hits_boundary(&leave_full) || hits_boundary(&rejoin_full) {
                reason = "blend would cross a boundary".into();
                continue;
            }
            if hits_planned(&leave_full) || hits_planned(&rejoin_full) {
                reason = "blend would cross an earlier splice".into();
                continue;
            }
            chosen = Some(PlannedSplice {
                splice: Splice {
                    boundary: j,
                    spiral_index: a,
                    rejoin_index: a2,
                    boundary_index: b_in,
                    exit_index: bi,
                    distance: d,
                    misalignment_deg: mis.to_degrees(),
                    reversed_loop: reversed,
                },
                leave: leave_full,
                rejoin: rejoin_full,
            });
            break;
        }
        match chosen {
            Some(p) => planned.push(p),
            None => return Err(Error::Fusion { boundary: j, reason }),
        }
    }
    planned.sort_by_key(|p| p.splice.spiral_index);
    let mut points = Vec::new();
    let mut blend = Vec::new();
    let mut cursor = 0;
    for p in &planned {
        let s = p.splice;
        let b = &boundaries[s.boundary];
        let nb = b.len();
        for i in cursor..s.spiral_index {
            points.push(spiral[i]);
            blend.push(false);
        }
        // leave blend including both junctions
        for q in &p.leave {
            points.push(*q);
            blend.push(true);
        }
        // loop from the vertex after b_in round to the exit vertex
        let dir: isize = if s.reversed_loop { -1 } else { 1 };
        let mut i = s.boundary_index;
        loop {
            i = (i as isize + dir).rem_euclid(nb as isize) as usize;
            if i == s.exit_index {
                break;
            }
            points.push(b[i]);
            blend.push(false);
        }
        for q in &p.rejoin {
            points.push(*q);
            blend.push(true);
        }
        cursor = s.rejoin_index + 1;
    }
    for q in spiral.iter().skip(cursor) {
        points.push(*q);
        blend.push(false);
    }
    Ok(FusedPath {
        points,
        blend,
        splices: planned.into_iter().map(|p| p.splice).collect(),
    })
}

/// Vertex range `[start, end)` of the path that keeps every raster cell the
/// full path covers. The start is trimmed first, then the end.
pub fn trim_ends(path: &[Point], region: &Region, radius: f64, resolution: f64) -> Result<(usize, usize)> {
    let n = path.len();
    if n < 3 || !(radius > 0.0) {
        return Ok((0, n));
    }
    let raster = CoverageRaster::new(region, resolution)?;
    let full = raster.segment_extents(path, radius);
    let start = full.iter().flatten().map(|&(_, last)| last as usize).min().unwrap_or(0);
    let rest = &path[start..];
    let ext = raster.segment_extents(rest, radius);
    let mut end_seg = 0;
    for (cell, e) in ext.iter().enumerate() {
        if full[cell].is_some() {
            match e {
                Some((first, _)) => end_seg = end_seg.max(*first as usize),
                // cannot happen: segment `start` and later still cover it
                None => return Ok((0, n)),
            }
        }
    }
    Ok((start, (start + end_seg + 2).min(n)))
}

#[derive(Debug, Clone, Copy)]
pub struct SpiralOptions {
    pub samples_per_turn: usize,
    pub theta_steps: usize,
    /// Fixed start angle instead of the scan.
    pub theta0: Option<f64>,
    pub fusion: FusionOptions,
    pub trim: bool,
    /// Raster cell of the trimming check as a fraction of `C`.
    pub trim_resolution: f64,
    /// Emit the path inside-out (clockwise) instead of outside-in.
    pub reverse: bool,
    /// Start angles tried (best clearance first) before giving up on hole crossings.
    pub attempts: usize,
    pub max_turn_deg: f64,
}

impl Default for SpiralOptions {
    fn default() -> Self {
        SpiralOptions {
            samples_per_turn: DEFAULT_SAMPLES_PER_TURN,
            theta_steps: DEFAULT_THETA_STEPS,
            theta0: None,
            fusion: FusionOptions::default(),
            trim: true,
            trim_resolution: 1.0 / 20.0,
            reverse: true,
            attempts: 8,
            max_turn_deg: 5.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpiralPath {
    pub theta0: f64,
    pub clearance: f64,
    pub ladder: ControlLadder,
    /// `SC*` in polar form.
    pub mapped: Vec<Polar>,
    /// `ω⁻¹(SC*)`.
    pub spiral: Vec<Point>,
    /// Final path: fused, trimmed and oriented.
    pub path: Vec<Point>,
    pub blend: Vec<bool>,
    pub splices: Vec<Splice>,
    /// Vertices dropped at the start and end of the fused path by trimming.
    pub trimmed: (usize, usize),
    pub reversed: bool,
}

/// Boundary loops used for fusion, densified for coverage.
pub fn boundary_loops(sol: &MappingSolution, c: f64) -> Vec<Vec<Point>> {
    (0..sol.boundary_count())
        .map(|j| densify_closed(sol.boundary_samples(j), c / 4.0))
        .collect()
}

/// Boundary-only path for a family without iso-parameters: the outer loop,
/// then each hole loop reached by a straight bridge from the nearest vertex
/// of what has been traced so far. Bridges are flagged as blends.
fn boundary_chain(loops: &[Vec<Point>]) -> (Vec<Point>, Vec<bool>) {
    let mut path = loops[0].clone();
    path.push(loops[0][0]);
    let mut blend = vec![false; path.len()];
    for hole in &loops[1..] {
        let end = path[path.len() - 1];
        let (start, _) = hole
            .iter()
            .enumerate()
            .map(|(i, q)| (i, (q - end).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("hole loop is not empty");
        if let Some(b) = blend.last_mut() {
            *b = true;
        }
        let m = hole.len();
        for i in 0..=m {
            path.push(hole[(start + i) % m]);
            blend.push(i == 0);
        }
    }
    (path, blend)
}

/// Distance below which a path vertex counts as touching a boundary.
pub fn crossing_tolerance(region: &Region) -> f64 {
    1e-9 * region.bbox().diameter()
}

pub fn solution_region(sol: &MappingSolution) -> Region {
    Region::new(
        sol.boundary_samples(0).to_vec(),
        (1..sol.boundary_count()).map(|j| sol.boundary_samples(j).to_vec()).collect(),
    )
}

/// Spiral, fusion, trimming and orientation for a spaced iso-parameter family.
pub fn plan_spiral(sol: &MappingSolution, family: &IsoParamFamily, options: &SpiralOptions) -> Result<SpiralPath> {
    let c = family.spacing;
    let region = solution_region(sol);
    let touch = crossing_tolerance(&region);
    let loops = boundary_loops(sol, c);
    if family.k() == 0 {
        let (mut path, mut blend) = boundary_chain(&loops);
        if options.reverse {
            path.reverse();
            blend.reverse();
        }
        return Ok(SpiralPath {
            theta0: 0.0,
            clearance: f64::INFINITY,
            ladder: ControlLadder { points: Vec::new() },
            mapped: Vec::new(),
            spiral: Vec::new(),
            path,
            blend,
            splices: Vec::new(),
            trimmed: (0, 0),
            reversed: options.reverse,
        });
    }
    let r_min = sol.r_min();
    let base_ladder = build_ladder(&family.radii, r_min, PI)?.shifted(-PI);
    let base = interpolate_ladder(&base_ladder, options.samples_per_turn)?;
    let candidates = match options.theta0 {
        Some(t) => {
            let shifted: Vec<Polar> = base.iter().map(|p| Polar::new(p.theta + t, p.rho)).collect();
            vec![Theta0Candidate {
                theta0: t,
                intersections: slit_intersections(&shifted, &sol.slits),
                clearance: slit_clearance(&shifted, &sol.slits),
            }]
        }
        None => scan_theta0(&base, &sol.slits, options.theta_steps)?,
    };
    let best = candidates[0];
    let admissible: Vec<Theta0Candidate> = candidates.iter().copied().filter(|c| c.intersections == 0).collect();
    if admissible.is_empty() {
        return Err(Error::Planning(PlanningDiagnostics {
            reason: "every start angle crosses a slit".into(),
            best_theta0: best.theta0,
            intersections: best.intersections,
            clearance: best.clearance,
        }));
    }
    let mut last_failure = None;
    for cand in admissible.iter().take(options.attempts.max(1)) {
        let ladder = build_ladder(&family.radii, r_min, cand.theta0)?;
        let mapped = interpolate_ladder(&ladder, options.samples_per_turn)?;
        let robust = slit_intersections(&mapped, &sol.slits);
        if robust > 0 {
            last_failure = Some((cand, robust, "exact slit test rejects the start angle"));
            continue;
        }
        let spline = LadderSpline::new(&ladder);
        let pb = pullback(&spline, sol, options.samples_per_turn, c / 4.0, options.max_turn_deg);
        let crossings: usize = (0..sol.boundary_count())
            .map(|j| count_crossings(&pb.points, sol.boundary_samples(j), touch))
            .sum();
        if crossings > 0 {
            log::info!("θ0 = {:.4}: pulled-back spiral crosses the boundary {crossings} times", cand.theta0);
            last_failure = Some((cand, crossings, "pulled-back spiral crosses a boundary"));
            continue;
        }
        let fused = match fuse_boundaries(&pb.points, &loops, c, &options.fusion) {
            Ok(f) => f,
            Err(e) => {
                log::info!("θ0 = {:.4}: {e}", cand.theta0);
                if cand.theta0 == admissible.last().map(|c| c.theta0).unwrap_or(0.0) || options.theta0.is_some() {
                    return Err(e);
                }
                last_failure = Some((cand, 0, "boundary fusion failed"));
                continue;
            }
        };
        let (start, end) = if options.trim {
            trim_ends(&fused.points, &region, c, c * options.trim_resolution)?
        } else {
            (0, fused.points.len())
        };
        let mut path = fused.points[start..end].to_vec();
        let mut blend = fused.blend[start..end].to_vec();
        if options.reverse {
            path.reverse();
            blend.reverse();
        }
        return Ok(SpiralPath {
            theta0: cand.theta0,
            clearance: cand.clearance,
            ladder,
            mapped: pb.mapped,
            spiral: pb.points,
            path,
            blend,
            splices: fused.splices,
            trimmed: (start, fused.points.len() - end),
            reversed: options.reverse,
        });
    }
    let (cand, count, why) = last_failure.expect("at least one candidate tried");
    Err(Error::Planning(PlanningDiagnostics {
        reason: why.into(),
        best_theta0: cand.theta0,
        intersections: count,
        clearance: cand.clearance,
    }))
}
