//! Disc and annular conformal slit maps from a boundary integral equation
//! with the generalized Neumann kernel.
//!
//! The boundary density `μ` solves `(I − N)μ = −Mγ`; the piecewise
//! constant `h = [Mμ − (I − N)γ]/2` then fixes the slit radii. Interior
//! values of the map and of its inverse come from trapezoidal Cauchy
//! integrals in barycentric (quotient) form.

mod kernels;
mod linear;

use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::boundary::DiscretizedBoundary;
use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};

pub use kernels::{
    assemble_kernels, assemble_kernels_with, diagonal_limits, kernel_quotient, m_kernel, neumann_kernel, DiagonalRule,
    KernelPair,
};
pub use linear::{gmres, solve_system, SolverBackend, AUTO_LU_LIMIT, RESIDUAL_TOLERANCE};

/// Multiple of the local sample spacing inside which Cauchy evaluation is refused.
pub const DEFAULT_EXCLUSION_FACTOR: f64 = 5.0;
pub const DEFAULT_CIRCULARITY_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapKind {
    /// Onto the unit disc with `ω(O) = 0`.
    Disc,
    /// Onto the annulus `R1 < |w| < 1`; `z1` (absolute coordinates) lies in hole 1.
    Annular { z1: Point },
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub backend: SolverBackend,
    pub diagonal: DiagonalRule,
    pub circularity_tolerance: f64,
    pub exclusion_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            backend: SolverBackend::Auto,
            diagonal: DiagonalRule::default(),
            circularity_tolerance: DEFAULT_CIRCULARITY_TOLERANCE,
            exclusion_factor: DEFAULT_EXCLUSION_FACTOR,
        }
    }
}

/// Right-hand side `γ` of the Riemann–Hilbert problem.
pub fn rhs_gamma(db: &DiscretizedBoundary, kind: MapKind) -> Result<DVector<f64>> {
    let origin = db.origin;
    let z1 = match kind {
        MapKind::Disc => None,
        MapKind::Annular { z1 } => {
            let local = z1 - origin;
            if local.norm() == 0.0 {
                return Err(Error::Configuration("hole anchor z1 coincides with the origin".into()));
            }
            Some(local)
        }
    };
    let mut gamma = DVector::<f64>::zeros(db.total());
    for (j, b) in db.boundaries.iter().enumerate() {
        for (k, z) in b.z.iter().enumerate() {
            let eta = z - origin;
            let value = match z1 {
                None => {
                    if eta.norm() == 0.0 {
                        return Err(Error::Geometry(format!("boundary {j} passes through the origin")));
                    }
                    -eta.norm().ln()
                }
                Some(z1) => {
                    let q = Complex64::new(1.0, 0.0) - eta / z1;
                    if q.norm() == 0.0 {
                        return Err(Error::Geometry(format!("boundary {j} passes through z1")));
                    }
                    -q.norm().ln()
                }
            };
            gamma[j * db.n + k] = value;
        }
    }
    Ok(gamma)
}

/// Boundary density and the piecewise constant `h`.
#[derive(Debug, Clone)]
pub struct Density {
    pub mu: DVector<f64>,
    /// Per-sample `h` as computed by the discrete operators.
    pub h: DVector<f64>,
    /// `h` averaged per boundary.
    pub constants: Vec<f64>,
    /// Per-boundary standard deviation of `h` around its mean.
    pub deviation: Vec<f64>,
}

pub fn solve_density(kp: &KernelPair, gamma: &DVector<f64>) -> Result<Density> {
    solve_density_with(kp, gamma, SolverBackend::Auto)
}

pub fn solve_density_with(kp: &KernelPair, gamma: &DVector<f64>, backend: SolverBackend) -> Result<Density> {
    if gamma.len() != kp.size() {
        return Err(Error::Parameter(format!(
            "γ has {} entries but the kernels are {}×{}",
            gamma.len(),
            kp.size(),
            kp.size()
        )));
    }
    let w = kp.weight();
    let rhs = (&kp.m_matrix * gamma) * (-w);
    let mu = solve_system(&kp.n_matrix, w, &rhs, backend)?;
    // h = [Mμ − (I − N)γ] / 2
    let mut h = &kp.m_matrix * &mu * w;
    h -= gamma;
    h.gemv(w, &kp.n_matrix, gamma, 1.0);
    h *= 0.5;
    let n = kp.n;
    let count = kp.size() / n;
    let mut constants = Vec::with_capacity(count);
    let mut deviation = Vec::with_capacity(count);
    for j in 0..count {
        let block = h.rows(j * n, n);
        let mean = block.mean();
        let var = block.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        constants.push(mean);
        deviation.push(var.sqrt());
    }
    Ok(Density {
        mu,
        h,
        constants,
        deviation,
    })
}

/// Image of an inner boundary under the map: an arc of the circle `|w| = radius`
/// starting at angle `start` and running counterclockwise through `extent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlitArc {
    pub boundary: usize,
    pub radius: f64,
    pub start: f64,
    pub extent: f64,
}

impl SlitArc {
    pub fn is_full_circle(&self) -> bool {
        self.extent >= TAU
    }

    /// Whether angle `phi` (any branch) falls on the arc.
    pub fn covers_angle(&self, phi: f64) -> bool {
        self.is_full_circle() || (phi - self.start).rem_euclid(TAU) <= self.extent
    }

    /// Distance from `w` to the arc.
    pub fn distance(&self, w: Point) -> f64 {
        if self.covers_angle(w.arg()) {
            return (w.norm() - self.radius).abs();
        }
        let a = Point::from_polar(self.radius, self.start);
        let b = Point::from_polar(self.radius, self.start + self.extent);
        (w - a).norm().min((w - b).norm())
    }
}

/// Circular hull of a set of angles as `(start, extent)`.
fn angular_hull(angles: &[f64]) -> (f64, f64) {
    let mut sorted: Vec<f64> = angles.iter().map(|a| a.rem_euclid(TAU)).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut best_gap = TAU - sorted[n - 1] + sorted[0];
    let mut start = sorted[0];
    for i in 0..n - 1 {
        let gap = sorted[i + 1] - sorted[i];
        if gap > best_gap {
            best_gap = gap;
            start = sorted[i + 1];
        }
    }
    (start, TAU - best_gap)
}

fn winding(values: &[Point]) -> i64 {
    let n = values.len();
    let total: f64 = (0..n).map(|k| (values[(k + 1) % n] / values[k]).arg()).sum();
    (total / TAU).round() as i64
}

/// Spectral derivative of a real periodic sequence sampled on `[0, 2π)`.
fn spectral_derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let wave = if k < n / 2 {
            k as f64
        } else if k == n / 2 {
            0.0
        } else {
            k as f64 - n as f64
        };
        *c *= Complex64::new(0.0, wave);
    }
    inverse.process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Boundary data for the inverse Cauchy sum, refined by this factor.
pub const INVERSE_OVERSAMPLE: usize = 4;

/// Trigonometric interpolation of a periodic sequence onto `factor` times as
/// many equispaced nodes. The Nyquist coefficient is split evenly.
fn trig_upsample(values: &[Point], factor: usize) -> Vec<Point> {
    let n = values.len();
    let m = n * factor;
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let mut wide = vec![Complex64::new(0.0, 0.0); m];
    let half = n / 2;
    for k in 0..n {
        if n % 2 == 0 && k == half {
            wide[half] = buf[k] * 0.5;
            wide[m - half] = buf[k] * 0.5;
        } else if k < half || (n % 2 == 1 && k == half) {
            wide[k] = buf[k];
        } else {
            wide[m - (n - k)] = buf[k];
        }
    }
    planner.plan_fft_inverse(m).process(&mut wide);
    wide.iter().map(|c| c / n as f64).collect()
}

/// Refined `(z, ω, dω)` nodes of one boundary.
#[derive(Debug, Clone)]
struct InverseNodes {
    z: Vec<Point>,
    w: Vec<Point>,
    dw: Vec<Point>,
}

/// Conformal slit map solved on a discretized boundary.
#[derive(Debug, Clone)]
pub struct MappingSolution {
    pub kind: MapKind,
    pub origin: Point,
    pub n: usize,
    pub mu: Vec<f64>,
    pub h: Vec<f64>,
    pub constants: Vec<f64>,
    pub h_deviation: Vec<f64>,
    /// Positive normalization constant.
    pub c: f64,
    /// Boundary values of the auxiliary function `f`.
    pub f: Vec<Point>,
    /// `ω(η_j(t_k))` per boundary.
    pub images: Vec<Vec<Point>>,
    /// `d/dt ω(η_j(t))` per boundary.
    pub image_velocity: Vec<Vec<Point>>,
    pub radii: Vec<f64>,
    /// Standard deviation of `|ω(η_j)|` per boundary.
    pub circularity: Vec<f64>,
    /// `max − min` of `|ω(η_j)|` per boundary.
    pub spread: Vec<f64>,
    pub slits: Vec<SlitArc>,
    pub boundary: DiscretizedBoundary,
    pub exclusion_factor: f64,
    polygons: Vec<Polygon>,
    inverse_nodes: Vec<InverseNodes>,
}

/// Assemble kernels, solve for the density and build the map.
pub fn solve_mapping(db: &DiscretizedBoundary, kind: MapKind, options: &SolveOptions) -> Result<MappingSolution> {
    let kp = assemble_kernels_with(db, options.diagonal)?;
    let gamma = rhs_gamma(db, kind)?;
    let density = solve_density_with(&kp, &gamma, options.backend)?;
    drop(kp);
    boundary_map(db, kind, &gamma, &density, options)
}

/// Boundary values of the map from a solved density.
pub fn boundary_map(
    db: &DiscretizedBoundary,
    kind: MapKind,
    gamma: &DVector<f64>,
    density: &Density,
    options: &SolveOptions,
) -> Result<MappingSolution> {
    let n = db.n;
    let origin = db.origin;
    let count = db.boundary_count();
    let c = (-density.constants[0]).exp();
    let z1_local = match kind {
        MapKind::Disc => None,
        MapKind::Annular { z1 } => Some(z1 - origin),
    };
    let mut f = Vec::with_capacity(db.total());
    let mut images = Vec::with_capacity(count);
    let mut velocity = Vec::with_capacity(count);
    for j in 0..count {
        let b = &db.boundaries[j];
        let mu_j: Vec<f64> = (0..n).map(|k| density.mu[j * n + k]).collect();
        let dmu = spectral_derivative(&mu_j);
        let mut img = Vec::with_capacity(n);
        let mut vel = Vec::with_capacity(n);
        for k in 0..n {
            let p = j * n + k;
            let eta = b.z[k] - origin;
            let log_abs = gamma[p] + density.h[p];
            let af = Complex64::new(log_abs, density.mu[p]);
            f.push(af / eta);
            let (base, dlog) = match z1_local {
                None => (eta, b.dz[k] / eta),
                Some(z1) => (Complex64::new(1.0, 0.0) - eta / z1, b.dz[k] / (eta - z1)),
            };
            let w = base * af.exp() * c;
            img.push(w);
            vel.push(Complex64::new(0.0, dlog.im + dmu[k]) * w);
        }
        images.push(img);
        velocity.push(vel);
    }
    let mut radii = Vec::with_capacity(count);
    let mut circularity = Vec::with_capacity(count);
    let mut spread = Vec::with_capacity(count);
    for img in &images {
        let mods: Vec<f64> = img.iter().map(|w| w.norm()).collect();
        let mean = mods.iter().sum::<f64>() / n as f64;
        let var = mods.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / n as f64;
        let lo = mods.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = mods.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        radii.push(mean);
        circularity.push(var.sqrt());
        spread.push(hi - lo);
    }
    for (j, s) in spread.iter().enumerate() {
        if *s > 10.0 * options.circularity_tolerance {
            return Err(Error::Accuracy(format!(
                "boundary {j} image is not circular: |ω| spread {s:.3e} exceeds 10× tolerance {:.1e}; increase n",
                options.circularity_tolerance
            )));
        }
        if *s > options.circularity_tolerance {
            log::warn!("boundary {j} image |ω| spread {s:.3e} above tolerance {:.1e}", options.circularity_tolerance);
        }
    }
    let first_slit = match kind {
        MapKind::Disc => 1,
        MapKind::Annular { .. } => 2,
    };
    for (j, r) in radii.iter().enumerate().skip(1) {
        if !(*r > 0.0 && *r < 1.0) {
            return Err(Error::Accuracy(format!("boundary {j} mapped to radius {r}, outside (0, 1)")));
        }
    }
    if let MapKind::Annular { .. } = kind {
        if let Some((j, _)) = radii.iter().enumerate().skip(2).find(|(_, r)| **r <= radii[1]) {
            return Err(Error::Accuracy(format!(
                "annular map: slit {j} radius {} not above inner radius {}",
                radii[j], radii[1]
            )));
        }
    }
    let mut slits = Vec::new();
    for j in first_slit..count {
        let img = &images[j];
        let (start, extent) = if winding(img) != 0 {
            (0.0, TAU)
        } else {
            let angles: Vec<f64> = img.iter().map(|w| w.arg()).collect();
            angular_hull(&angles)
        };
        slits.push(SlitArc {
            boundary: j,
            radius: radii[j],
            start,
            extent,
        });
    }
    let polygons = db.boundaries.iter().map(|b| Polygon::new(b.z.clone())).collect();
    let inverse_nodes = db
        .boundaries
        .iter()
        .zip(images.iter().zip(&velocity))
        .map(|(b, (img, vel))| InverseNodes {
            z: trig_upsample(&b.z, INVERSE_OVERSAMPLE),
            w: trig_upsample(img, INVERSE_OVERSAMPLE),
            dw: trig_upsample(vel, INVERSE_OVERSAMPLE),
        })
        .collect();
    Ok(MappingSolution {
        kind,
        origin,
        n,
        mu: density.mu.iter().copied().collect(),
        h: density.h.iter().copied().collect(),
        constants: density.constants.clone(),
        h_deviation: density.deviation.clone(),
        c,
        f,
        images,
        image_velocity: velocity,
        radii,
        circularity,
        spread,
        slits,
        boundary: db.clone(),
        exclusion_factor: options.exclusion_factor,
        polygons,
        inverse_nodes,
    })
}

impl MappingSolution {
    /// Smallest mapped radius reachable in the image domain (0 or `R1`).
    pub fn r_min(&self) -> f64 {
        match self.kind {
            MapKind::Disc => 0.0,
            MapKind::Annular { .. } => self.radii[1],
        }
    }

    pub fn boundary_count(&self) -> usize {
        self.images.len()
    }

    pub fn boundary_samples(&self, j: usize) -> &[Point] {
        &self.boundary.boundaries[j].z
    }

    /// Whether `z` is inside the sampled region.
    pub fn contains(&self, z: Point) -> bool {
        self.polygons[0].contains(z) && !self.polygons[1..].iter().any(|p| p.contains(z))
    }

    fn step(&self) -> f64 {
        TAU / self.n as f64
    }

    /// Map an interior point.
    pub fn forward_eval(&self, z: Point) -> Result<Point> {
        if !self.contains(z) {
            return Err(Error::Domain(format!("point ({}, {}) is not inside the region", z.re, z.im)));
        }
        let mut nearest = (f64::INFINITY, 0.0);
        for b in &self.boundary.boundaries {
            for (p, dp) in b.z.iter().zip(&b.dz) {
                let d = (p - z).norm();
                if d < nearest.0 {
                    nearest = (d, dp.norm());
                }
            }
        }
        let limit = self.exclusion_factor * self.step() * nearest.1;
        if nearest.0 < limit {
            return Err(Error::Accuracy(format!(
                "point ({}, {}) is within {:.3e} of the boundary (exclusion radius {:.3e}); increase n",
                z.re, z.im, nearest.0, limit
            )));
        }
        Ok(self.forward_eval_unchecked(z))
    }

    /// Quotient Cauchy formula without domain or proximity checks.
    pub fn forward_eval_unchecked(&self, z: Point) -> Point {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for (b, img) in self.boundary.boundaries.iter().zip(&self.images) {
            for k in 0..b.z.len() {
                let d = b.z[k] - z;
                if d.norm_sqr() == 0.0 {
                    return img[k];
                }
                let r = b.dz[k] * d.conj() / d.norm_sqr();
                num += img[k] * r;
                den += r;
            }
        }
        num / den
    }

    pub fn forward_eval_many(&self, zs: &[Point]) -> Result<Vec<Point>> {
        zs.iter().map(|z| self.forward_eval(*z)).collect()
    }

    fn check_image_point(&self, w: Point) -> Result<()> {
        let r = w.norm();
        if !(r < 1.0) {
            return Err(Error::Domain(format!("|w| = {r} is not inside the unit disc")));
        }
        if let MapKind::Annular { .. } = self.kind {
            if r <= self.radii[1] {
                return Err(Error::Domain(format!("|w| = {r} is inside the inner circle R1 = {}", self.radii[1])));
            }
        }
        Ok(())
    }

    /// Inverse map of an interior image point.
    pub fn inverse_eval(&self, w: Point) -> Result<Point> {
        self.check_image_point(w)?;
        let mut nearest = (f64::INFINITY, 0.0);
        for (img, vel) in self.images.iter().zip(&self.image_velocity) {
            for (p, dp) in img.iter().zip(vel) {
                let d = (p - w).norm();
                if d < nearest.0 {
                    nearest = (d, dp.norm());
                }
            }
        }
        let limit = self.exclusion_factor * self.step() * nearest.1;
        if nearest.0 < limit {
            return Err(Error::Accuracy(format!(
                "image point ({}, {}) is within {:.3e} of a slit or circle (exclusion radius {:.3e}); increase n",
                w.re, w.im, nearest.0, limit
            )));
        }
        Ok(self.inverse_eval_unchecked(w))
    }

    /// Quotient Cauchy formula for the inverse map, summed over boundary data
    /// refined by [`INVERSE_OVERSAMPLE`] so that image points a few sample
    /// spacings from a slit still resolve. Degrades gracefully closer in: as
    /// `w` approaches an image node the result tends to its preimage.
    pub fn inverse_eval_unchecked(&self, w: Point) -> Point {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for nodes in &self.inverse_nodes {
            for k in 0..nodes.w.len() {
                let d = nodes.w[k] - w;
                if d.norm_sqr() == 0.0 {
                    return nodes.z[k];
                }
                let r = nodes.dw[k] * d.conj() / d.norm_sqr();
                num += nodes.z[k] * r;
                den += r;
            }
        }
        num / den
    }

    pub fn inverse_eval_many(&self, ws: &[Point]) -> Result<Vec<Point>> {
        ws.iter().map(|w| self.inverse_eval(*w)).collect()
    }

    /// Sample segment `(k, s)` of boundary `j` whose image passes through
    /// argument `phi`, for boundaries whose image winds around the origin.
    fn angle_segment(&self, j: usize, phi: f64) -> (usize, f64) {
        let img = &self.images[j];
        let n = img.len();
        let mut best = (f64::INFINITY, 0usize, 0.0);
        for k in 0..n {
            let a = img[k];
            let b = img[(k + 1) % n];
            let step = (b / a).arg();
            let off = (Point::from_polar(1.0, phi) / a).arg();
            if step != 0.0 {
                let s = off / step;
                if (0.0..=1.0).contains(&s) {
                    return (k, s);
                }
                let miss = off.abs().min((off - step).abs());
                if miss < best.0 {
                    best = (miss, k, s.clamp(0.0, 1.0));
                }
            }
        }
        (best.1, best.2)
    }

    /// Point on boundary `j` whose image has argument `phi`, for boundaries
    /// whose image winds around the origin (the outer boundary and, for the
    /// annular map, hole 1).
    pub fn boundary_point_at_angle(&self, j: usize, phi: f64) -> Point {
        let z = &self.boundary.boundaries[j].z;
        let (k, s) = self.angle_segment(j, phi);
        z[k] + (z[(k + 1) % z.len()] - z[k]) * s
    }

    /// Inverse map that stays accurate next to the unit circle and, for the
    /// annular map, the inner circle. Within a few sample spacings of those
    /// circles the Cauchy value is replaced by a first-order expansion about
    /// the boundary, blended quadratically into the Cauchy value at the edge
    /// of the band.
    pub fn inverse_eval_banded(&self, w: Point) -> Point {
        let rho = w.norm();
        let phi = w.arg();
        let mut circles = vec![(0usize, 1.0)];
        if let MapKind::Annular { .. } = self.kind {
            circles.push((1, self.radii[1]));
        }
        for (j, rb) in circles {
            let (k, s) = self.angle_segment(j, phi);
            let b = &self.boundary.boundaries[j];
            let m = b.z.len();
            let k1 = (k + 1) % m;
            let speed = self.image_velocity[j][k].norm() * (1.0 - s) + self.image_velocity[j][k1].norm() * s;
            let band = self.exclusion_factor * self.step() * speed;
            let inward = if j == 0 { -band } else { band };
            let x = rho - rb;
            if x * inward < 0.0 || x.abs() > band {
                continue;
            }
            let eta = b.z[k] + (b.z[k1] - b.z[k]) * s;
            let dzdw = (b.dz[k] / self.image_velocity[j][k]) * (1.0 - s) + (b.dz[k1] / self.image_velocity[j][k1]) * s;
            let radial = dzdw * Point::from_polar(1.0, phi);
            let edge = self.inverse_eval_unchecked(Point::from_polar(rb + inward, phi));
            let t = x / inward;
            return eta + radial * x + (edge - eta - radial * inward) * (t * t);
        }
        self.inverse_eval_unchecked(w)
    }

    /// Preimage of the circle `|w| = radius` sampled at `count` points.
    /// Radii at the outer or inner circle return the boundary samples themselves.
    pub fn circle_preimage(&self, radius: f64, count: usize) -> Vec<Point> {
        if radius >= 1.0 - 1e-12 {
            return self.boundary_samples(0).to_vec();
        }
        if let MapKind::Annular { .. } = self.kind {
            if radius <= self.radii[1] + 1e-12 {
                return self.boundary_samples(1).to_vec();
            }
        }
        (0..count)
            .map(|i| self.inverse_eval_unchecked(Point::from_polar(radius, TAU * i as f64 / count as f64)))
            .collect()
    }

    /// Signed phase of the boundary value `ω = c·B·e^{A f}` relative to `π` (diagnostic).
    pub fn max_h_deviation(&self) -> f64 {
        self.h_deviation.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::boundary::{parameterize, BoundaryCurve, Orientation, Segment};

    fn circle_db(n: usize, circles: &[(Point, f64)], origin: Point) -> DiscretizedBoundary {
        let boundaries = circles
            .iter()
            .enumerate()
            .map(|(j, (c, r))| {
                let o = if j == 0 { Orientation::Ccw } else { Orientation::Cw };
                parameterize(&BoundaryCurve::smooth(Segment::circle(*c, *r, o)).unwrap(), 3, n).unwrap()
            })
            .collect();
        DiscretizedBoundary { n, origin, boundaries }
    }

    #[test]
    fn unit_circle_kernel_is_constant() {
        let db = circle_db(64, &[(Point::new(0.0, 0.0), 1.0)], Point::new(0.0, 0.0));
        let kp = assemble_kernels(&db).unwrap();
        for s in 0..64 {
            for t in 0..64 {
                assert!((kp.n_matrix[(s, t)] + 1.0 / TAU).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn omitted_diagonal_is_zero() {
        let db = circle_db(32, &[(Point::new(0.0, 0.0), 1.0), (Point::new(0.2, 0.0), 0.3)], Point::new(-0.5, 0.0));
        let kp = assemble_kernels_with(&db, DiagonalRule::Omit).unwrap();
        for i in 0..64 {
            assert_eq!(kp.n_matrix[(i, i)], 0.0);
            assert_eq!(kp.m_matrix[(i, i)], 0.0);
        }
    }

    #[test]
    fn wittich_parity_rule() {
        let db = circle_db(32, &[(Point::new(0.0, 0.0), 1.0), (Point::new(0.2, 0.0), 0.3)], Point::new(-0.5, 0.0));
        let kp = assemble_kernels(&db).unwrap();
        let b = &db.boundaries[1];
        let o = db.origin;
        for (s, t) in [(3usize, 7usize), (10, 2), (5, 6), (0, 31)] {
            let m = m_kernel(b.z[s] - o, b.z[t] - o, b.dz[t]);
            let cot = 1.0 / ((b.t[s] - b.t[t]) / 2.0).tan();
            let m1 = m + cot / TAU;
            let expect = if (s as i64 - t as i64) % 2 == 0 { m1 } else { m1 - cot / PI };
            let got = kp.m_matrix[(32 + s, 32 + t)];
            assert!((got - expect).abs() < 1e-10, "({s},{t}): {got} vs {expect}");
        }
    }

    #[test]
    fn gamma_cases() {
        let db = circle_db(16, &[(Point::new(0.0, 0.0), 1.0), (Point::new(0.0, 0.0), 2.0)], Point::new(0.0, 0.0));
        let g = rhs_gamma(&db, MapKind::Disc).unwrap();
        for k in 0..16 {
            assert!(g[k].abs() < 1e-15);
            assert!((g[16 + k] + 2f64.ln()).abs() < 1e-15);
        }
        assert!(matches!(
            rhs_gamma(&db, MapKind::Annular { z1: Point::new(0.0, 0.0) }),
            Err(Error::Configuration(_))
        ));
        // |1 − η/z1| = 1 where η = 1 and z1 = 0.5 + 0.5i·(something): choose z1 = 1/(1 − e^{iπ/3})
        let z1 = Point::new(1.0, 0.0) / (Point::new(1.0, 0.0) - Point::from_polar(1.0, PI / 3.0));
        let g = rhs_gamma(&db, MapKind::Annular { z1 }).unwrap();
        assert!(g[0].abs() < 1e-14);
    }

    #[test]
    fn zero_gamma_gives_zero_density() {
        let db = circle_db(32, &[(Point::new(0.0, 0.0), 1.0), (Point::new(0.3, 0.0), 0.2)], Point::new(-0.4, 0.0));
        let kp = assemble_kernels(&db).unwrap();
        let d = solve_density(&kp, &DVector::zeros(64)).unwrap();
        assert_eq!(d.mu.norm(), 0.0);
        assert_eq!(d.h.norm(), 0.0);
    }

    #[test]
    fn concentric_annulus_h_is_constant() {
        let db = circle_db(256, &[(Point::new(0.0, 0.0), 1.0), (Point::new(0.0, 0.0), 0.35)], Point::new(0.6, 0.0));
        let sol = solve_mapping(&db, MapKind::Annular { z1: Point::new(0.05, 0.0) }, &SolveOptions::default()).unwrap();
        assert!(sol.max_h_deviation() < 1e-6, "{:?}", sol.h_deviation);
        assert!((sol.radii[1] - 0.35).abs() < 1e-8, "R1 = {}", sol.radii[1]);
        assert!(sol.slits.is_empty());
    }

    #[test]
    fn disc_map_normalization() {
        let db = circle_db(128, &[(Point::new(0.0, 0.0), 1.0), (Point::new(0.4, 0.1), 0.2)], Point::new(-0.2, 0.0));
        let sol = solve_mapping(&db, MapKind::Disc, &SolveOptions::default()).unwrap();
        for w in &sol.images[0] {
            assert!((w.norm() - 1.0).abs() < 1e-8);
        }
        let w0 = sol.forward_eval(Point::new(-0.2, 0.0)).unwrap();
        assert!(w0.norm() < 1e-10, "ω(O) = {w0}");
        assert!(sol.inverse_eval(Point::new(0.0, 0.0)).unwrap().re + 0.2 < 1e-10);
        assert_eq!(sol.slits.len(), 1);
        assert!(sol.slits[0].extent < TAU);
    }

    #[test]
    fn spectral_derivative_of_sine() {
        let n = 64;
        let v: Vec<f64> = (0..n).map(|k| (3.0 * TAU * k as f64 / n as f64).sin()).collect();
        let d = spectral_derivative(&v);
        for k in 0..n {
            let expect = 3.0 * (3.0 * TAU * k as f64 / n as f64).cos();
            assert!((d[k] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn upsampling_reproduces_trig_polynomial() {
        let n = 16;
        let f = |t: f64| Point::new(t.cos() + 0.3 * (3.0 * t).sin(), (2.0 * t).cos() - 0.1 * (8.0 * t).cos());
        let coarse: Vec<Point> = (0..n).map(|k| f(TAU * k as f64 / n as f64)).collect();
        let fine = trig_upsample(&coarse, 4);
        for (k, v) in fine.iter().enumerate() {
            assert!((v - f(TAU * k as f64 / (4 * n) as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn angular_hull_wraps() {
        let (s, e) = angular_hull(&[3.0, -3.0, 3.1]);
        assert!((s - 3.0).abs() < 1e-12);
        assert!((e - (TAU - 6.0)).abs() < 1e-12);
    }
}
