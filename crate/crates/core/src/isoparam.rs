//! Iso-parameter curves: preimages of concentric circles chosen by bisection so
//! that neighbouring curves are a controlled distance apart, where distance is
//! the radius of the maximum inscribed circle of the band between them.

use std::f64::consts::TAU;

use serde::Serialize;
use spade::{DelaunayTriangulation, Point2, Triangulation};

use crate::error::{Error, Result};
use crate::geometry::{densify_closed, BBox, Point, Region};
use crate::slitmap::{MapKind, MappingSolution};

pub const DEFAULT_EPSILON: f64 = 0.01;
/// Points per inverse-mapped iso-parameter curve.
pub const DEFAULT_CURVE_SAMPLES: usize = 1000;
pub const MAX_BISECTION_STEPS: usize = 64;
/// Inner radius (relative to the current one) of the near-centre probe.
pub const COLLAPSE_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InscribedCircle {
    pub center: Point,
    pub radius: f64,
}

/// Largest empty circumcircle of the Delaunay triangulation of all polyline
/// vertices whose center lies inside the first polyline and outside the rest.
///
/// A region with no admissible triangle gives radius 0.
pub fn max_inscribed_circle(polylines: &[Vec<Point>]) -> Result<InscribedCircle> {
    let count: usize = polylines.iter().map(Vec::len).sum();
    if polylines.is_empty() || count < 3 {
        return Err(Error::Geometry(format!("inscribed circle needs at least 3 points, got {count}")));
    }
    let vertices: Vec<Point2<f64>> = polylines
        .iter()
        .flat_map(|p| p.iter().map(|z| Point2::new(z.re, z.im)))
        .collect();
    let tri: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::bulk_load_stable(vertices)
        .map_err(|e| Error::Geometry(format!("Delaunay triangulation failed: {e:?}")))?;
    let region = Region::new(polylines[0].clone(), polylines[1..].to_vec());
    let mut candidates: Vec<(f64, Point)> = tri
        .inner_faces()
        .filter_map(|f| {
            let (c, r2) = f.circumcircle();
            (r2.is_finite() && c.x.is_finite() && c.y.is_finite()).then(|| (r2, Point::new(c.x, c.y)))
        })
        .collect();
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let best = candidates.into_iter().find(|(_, c)| region.contains(*c));
    Ok(match best {
        Some((r2, center)) => InscribedCircle {
            center,
            radius: r2.sqrt(),
        },
        None => {
            let b = BBox::of(&polylines[0]);
            InscribedCircle {
                center: (b.min + b.max) * 0.5,
                radius: 0.0,
            }
        }
    })
}

/// What spacing control needs from a conformal map: the mapped boundary radii
/// and preimages of concentric circles.
pub trait IsoMap {
    /// Lower end of the radial range: 0 for the disc map, `R1` for the annular map.
    fn r_down(&self) -> f64;
    /// `R_0 = 1, R_1, …, R_m`.
    fn boundary_radii(&self) -> Vec<f64>;
    /// Closed polyline of boundary `j`.
    fn boundary(&self, j: usize) -> Vec<Point>;
    /// Closed polyline `ω⁻¹(|w| = radius)`. Radius 1 (and `R1` for the annular
    /// map) returns the boundary itself.
    fn preimage(&self, radius: f64, samples: usize) -> Vec<Point>;
}

impl IsoMap for MappingSolution {
    fn r_down(&self) -> f64 {
        self.r_min()
    }

    fn boundary_radii(&self) -> Vec<f64> {
        let mut r = self.radii.clone();
        r[0] = 1.0;
        r
    }

    fn boundary(&self, j: usize) -> Vec<Point> {
        self.boundary_samples(j).to_vec()
    }

    fn preimage(&self, radius: f64, samples: usize) -> Vec<Point> {
        self.circle_preimage(radius, samples)
    }
}

/// `ω⁻¹ = identity` on a concentric setting: iso-curves are the circles
/// themselves. Optional holes are given with the radius they would map to.
#[derive(Debug, Clone)]
pub struct IdentityMap {
    pub r_down: f64,
    pub holes: Vec<(f64, Vec<Point>)>,
}

impl IdentityMap {
    pub fn new(r_down: f64) -> IdentityMap {
        IdentityMap {
            r_down,
            holes: Vec::new(),
        }
    }

    fn circle(radius: f64, samples: usize) -> Vec<Point> {
        (0..samples)
            .map(|i| Point::from_polar(radius, TAU * i as f64 / samples as f64))
            .collect()
    }
}

impl IsoMap for IdentityMap {
    fn r_down(&self) -> f64 {
        self.r_down
    }

    fn boundary_radii(&self) -> Vec<f64> {
        let mut r = vec![1.0];
        if self.r_down > 0.0 {
            r.push(self.r_down);
        }
        r.extend(self.holes.iter().map(|h| h.0));
        r
    }

    fn boundary(&self, j: usize) -> Vec<Point> {
        match (j, self.r_down > 0.0) {
            (0, _) => Self::circle(1.0, DEFAULT_CURVE_SAMPLES),
            (1, true) => Self::circle(self.r_down, DEFAULT_CURVE_SAMPLES),
            (j, true) => self.holes[j - 2].1.clone(),
            (j, false) => self.holes[j - 1].1.clone(),
        }
    }

    fn preimage(&self, radius: f64, samples: usize) -> Vec<Point> {
        Self::circle(radius, samples)
    }
}

/// Boundary polylines of the band between `L_{R_a}` (outer) and `L_{R_b}`,
/// together with every hole whose mapped radius lies strictly between them.
/// `R_a == R_b` queries the residual region down to `R_down`; the inner curve
/// is dropped when it degenerates to the point `R_b = 0`.
pub fn gap_region<M: IsoMap + ?Sized>(map: &M, r_a: f64, r_b: f64, samples: usize) -> Result<Vec<Vec<Point>>> {
    if r_a < r_b {
        return Err(Error::Parameter(format!("gap query needs R_a >= R_b, got {r_a} < {r_b}")));
    }
    let r_b = if r_a == r_b { map.r_down() } else { r_b };
    let mut out = vec![map.preimage(r_a, samples)];
    if r_b > 0.0 {
        out.push(map.preimage(r_b, samples));
    }
    for (j, r) in map.boundary_radii().into_iter().enumerate().skip(1) {
        if r_a > r && r > r_b {
            out.push(map.boundary(j));
        }
    }
    Ok(out)
}

/// MIC of a gap region with every polyline densified to spacing `max_spacing`.
pub fn gap_mic<M: IsoMap + ?Sized>(map: &M, r_a: f64, r_b: f64, samples: usize, max_spacing: f64) -> Result<InscribedCircle> {
    let region: Vec<Vec<Point>> = gap_region(map, r_a, r_b, samples)?
        .into_iter()
        .map(|p| densify_closed(&p, max_spacing))
        .collect();
    max_inscribed_circle(&region)
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoParamFamily {
    pub spacing: f64,
    pub epsilon: f64,
    pub r_down: f64,
    /// `R_C0 = 1 > R_C1 > … > R_Ck`.
    pub radii: Vec<f64>,
    /// `L_C0 = Γ0, L_C1, …, L_Ck`.
    #[serde(skip)]
    pub curves: Vec<Vec<Point>>,
    /// MIC between `L_C(i-1)` and `L_Ci`, one per found radius.
    pub gaps: Vec<InscribedCircle>,
    /// MIC of the region left below `L_Ck`.
    pub residual: InscribedCircle,
    /// MIC evaluations spent in bisection.
    pub evaluations: usize,
}

impl IsoParamFamily {
    /// Number of iso-parameters `k`.
    pub fn k(&self) -> usize {
        self.radii.len() - 1
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpacingOptions {
    pub epsilon: f64,
    pub samples: usize,
}

impl Default for SpacingOptions {
    fn default() -> Self {
        SpacingOptions {
            epsilon: DEFAULT_EPSILON,
            samples: DEFAULT_CURVE_SAMPLES,
        }
    }
}

/// Choose `R_C1 > R_C2 > …` by bisection so that the first band has MIC `C/2`
/// and every later band MIC `C`, stopping when what remains is narrower than
/// the next target.
pub fn spacing_control<M: IsoMap + ?Sized>(map: &M, c: f64, options: &SpacingOptions) -> Result<IsoParamFamily> {
    let eps = options.epsilon;
    if !(c > 0.0) {
        return Err(Error::Parameter(format!("spacing C must be positive, got {c}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("tolerance ε must lie in (0, 1), got {eps}")));
    }
    if options.samples < 16 {
        return Err(Error::Parameter(format!("iso-curve sample count {} too small", options.samples)));
    }
    let r_down = map.r_down();
    let max_spacing = c / 10.0;
    let samples = options.samples;
    let mic = |a: f64, b: f64| gap_mic(map, a, b, samples, max_spacing);

    let mut radii = vec![1.0];
    let mut curves = vec![map.boundary(0)];
    let mut gaps = Vec::new();
    let mut evaluations = 0;
    let mut r_up = 1.0;
    let residual = loop {
        let target = if gaps.is_empty() { c / 2.0 } else { c };
        let rest = mic(r_up, r_up)?;
        evaluations += 1;
        if rest.radius < target {
            break rest;
        }
        // A disc-map core less than twice the target wide may be wide
        // enough only around the centre itself, so that every band keeping
        // the centre as an obstacle is too narrow. The last spiral turn runs
        // into the centre anyway, so stop there.
        if r_down == 0.0 && rest.radius < 2.0 * target {
            let near_centre = mic(r_up, COLLAPSE_RADIUS * r_up)?;
            evaluations += 1;
            if near_centre.radius < target - eps * target {
                log::debug!("core below R = {r_up} is only wide around the centre; stopping");
                break rest;
            }
        }
        let (mut hi, mut lo) = (r_up, r_down);
        let mut seen: Vec<(f64, f64)> = Vec::new();
        let mut steps = 0;
        let (r_k, found) = loop {
            if steps == MAX_BISECTION_STEPS {
                return Err(Error::Convergence(format!(
                    "bisection for iso-parameter {} did not reach |MIC − {target}| < {} in {MAX_BISECTION_STEPS} steps \
                     (bracket [{lo}, {hi}])",
                    radii.len(),
                    eps * target
                )));
            }
            steps += 1;
            let r = 0.5 * (hi + lo);
            let m = mic(r_up, r)?;
            evaluations += 1;
            // a larger inner radius must give a narrower band
            if let Some(&(r0, m0)) = seen
                .iter()
                .find(|&&(r0, m0)| (r0 < r && m0 < m.radius - eps * target) || (r0 > r && m0 > m.radius + eps * target))
            {
                return Err(Error::numerical(
                    format!(
                        "band MIC is not monotone in the inner radius below R = {r_up}: \
                         MIC({r0}) = {m0}, MIC({r}) = {}",
                        m.radius
                    ),
                    (m.radius - m0).abs(),
                ));
            }
            seen.push((r, m.radius));
            if (m.radius - target).abs() < eps * target {
                break (r, m);
            }
            if m.radius > target {
                lo = r;
            } else {
                hi = r;
            }
        };
        log::debug!("iso-parameter {}: R = {r_k:.9}, MIC = {:.6} after {steps} steps", radii.len(), found.radius);
        r_up = r_k;
        radii.push(r_k);
        curves.push(map.preimage(r_k, samples));
        gaps.push(found);
    };
    Ok(IsoParamFamily {
        spacing: c,
        epsilon: eps,
        r_down,
        radii,
        curves,
        gaps,
        residual,
        evaluations,
    })
}

/// `MapKind` of a solution as a short label.
pub fn case_label(kind: MapKind) -> &'static str {
    match kind {
        MapKind::Disc => "disc",
        MapKind::Annular { .. } => "annular",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(c: Point, r: f64, n: usize, ccw: bool) -> Vec<Point> {
        (0..n)
            .map(|i| {
                let a = TAU * i as f64 / n as f64;
                c + Point::from_polar(r, if ccw { a } else { -a })
            })
            .collect()
    }

    #[test]
    fn annulus_mic_is_half_gap() {
        let o = Point::new(0.0, 0.0);
        let m = max_inscribed_circle(&[circle(o, 1.0, 1024, true), circle(o, 0.4, 1024, false)]).unwrap();
        assert!((m.radius - 0.3).abs() < 1e-3, "{}", m.radius);
        assert!((m.center.norm() - 0.7).abs() < 2e-3);
    }

    #[test]
    fn square_incircle() {
        let sq = vec![Point::new(-1.0, -1.0), Point::new(1.0, -1.0), Point::new(1.0, 1.0), Point::new(-1.0, 1.0)];
        let m = max_inscribed_circle(&[densify_closed(&sq, 0.01)]).unwrap();
        assert!((m.radius - 1.0).abs() < 1e-3);
        assert!(m.center.norm() < 0.02);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            max_inscribed_circle(&[vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]]),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn gap_region_inserts_holes_in_band() {
        let hole = circle(Point::new(0.6, 0.0), 0.05, 64, false);
        let map = IdentityMap {
            r_down: 0.3,
            holes: vec![(0.6, hole)],
        };
        assert_eq!(gap_region(&map, 1.0, 0.8, 100).unwrap().len(), 2);
        assert_eq!(gap_region(&map, 1.0, 0.5, 100).unwrap().len(), 3);
        assert!(gap_region(&map, 0.5, 0.8, 100).is_err());
        // terminal query runs down to R_down
        let r = gap_region(&map, 0.5, 0.5, 100).unwrap();
        assert!((r[1][0].norm() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn disc_terminal_query_drops_inner_curve() {
        let map = IdentityMap::new(0.0);
        assert_eq!(gap_region(&map, 0.4, 0.4, 100).unwrap().len(), 1);
    }

    #[test]
    fn spacing_larger_than_domain_gives_empty_family() {
        let fam = spacing_control(&IdentityMap::new(0.35), 1.0, &SpacingOptions::default()).unwrap();
        assert_eq!(fam.k(), 0);
        assert_eq!(fam.radii, vec![1.0]);
    }

    #[test]
    fn identity_stub_bands() {
        let fam = spacing_control(&IdentityMap::new(0.35), 0.1, &SpacingOptions::default()).unwrap();
        assert_eq!(fam.k(), 3);
        assert!((fam.gaps[0].radius - 0.05).abs() < 0.01 * 0.05);
        for g in &fam.gaps[1..] {
            assert!((g.radius - 0.1).abs() < 0.01 * 0.1);
        }
        assert!(fam.residual.radius < 0.1);
        for w in fam.radii.windows(2) {
            assert!(w[1] < w[0]);
        }
    }
}
