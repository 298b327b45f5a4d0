//! Path quality: length, raster coverage, turning, turn-to-turn spacing and
//! the operation-count-per-second ratio STR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, turning_angle, BBox, Point, Region};

pub fn path_length(path: &[Point]) -> f64 {
    path.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Cells of a uniform grid whose centers lie inside a region.
#[derive(Debug, Clone)]
pub struct CoverageRaster {
    origin: Point,
    resolution: f64,
    nx: usize,
    ny: usize,
    /// Indices into the full grid of cells inside the region.
    cells: Vec<u32>,
    /// Position in `cells` for every grid cell, `u32::MAX` outside the region.
    slot: Vec<u32>,
}

impl CoverageRaster {
    pub fn new(region: &Region, resolution: f64) -> Result<CoverageRaster> {
        if !(resolution > 0.0) {
            return Err(Error::Parameter(format!("raster resolution must be positive, got {resolution}")));
        }
        let b = region.bbox();
        let nx = (b.width() / resolution).ceil() as usize + 1;
        let ny = (b.height() / resolution).ceil() as usize + 1;
        if nx.saturating_mul(ny) > 200_000_000 {
            return Err(Error::Parameter(format!("raster of {nx}×{ny} cells is too large")));
        }
        let origin = b.min;
        let mut cells = Vec::new();
        let mut slot = vec![u32::MAX; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let c = origin + Point::new((ix as f64 + 0.5) * resolution, (iy as f64 + 0.5) * resolution);
                if region.contains(c) {
                    slot[iy * nx + ix] = cells.len() as u32;
                    cells.push((iy * nx + ix) as u32);
                }
            }
        }
        Ok(CoverageRaster {
            origin,
            resolution,
            nx,
            ny,
            cells,
            slot,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn center(&self, cell: usize) -> Point {
        let g = self.cells[cell] as usize;
        self.origin
            + Point::new(
                ((g % self.nx) as f64 + 0.5) * self.resolution,
                ((g / self.nx) as f64 + 0.5) * self.resolution,
            )
    }

    /// Calls `visit(cell, segment)` for every region cell whose center lies
    /// within `radius` of a path segment. A single vertex counts as a segment.
    pub fn for_each_covered<F: FnMut(usize, usize)>(&self, path: &[Point], radius: f64, mut visit: F) {
        let segs: Vec<(Point, Point)> = match path.len() {
            0 => Vec::new(),
            1 => vec![(path[0], path[0])],
            _ => path.windows(2).map(|w| (w[0], w[1])).collect(),
        };
        let r = self.resolution;
        for (s, (a, b)) in segs.into_iter().enumerate() {
            let lo = Point::new(a.re.min(b.re) - radius, a.im.min(b.im) - radius) - self.origin;
            let hi = Point::new(a.re.max(b.re) + radius, a.im.max(b.im) + radius) - self.origin;
            let ix0 = ((lo.re / r - 0.5).ceil().max(0.0)) as usize;
            let iy0 = ((lo.im / r - 0.5).ceil().max(0.0)) as usize;
            let ix1 = ((hi.re / r - 0.5).floor()).min(self.nx as f64 - 1.0);
            let iy1 = ((hi.im / r - 0.5).floor()).min(self.ny as f64 - 1.0);
            if ix1 < 0.0 || iy1 < 0.0 {
                continue;
            }
            for iy in iy0..=iy1 as usize {
                for ix in ix0..=ix1 as usize {
                    let slot = self.slot[iy * self.nx + ix];
                    if slot == u32::MAX {
                        continue;
                    }
                    let c = self.origin + Point::new((ix as f64 + 0.5) * r, (iy as f64 + 0.5) * r);
                    if point_segment_distance(c, a, b) <= radius {
                        visit(slot as usize, s);
                    }
                }
            }
        }
    }

    pub fn covered_mask(&self, path: &[Point], radius: f64) -> Vec<bool> {
        let mut mask = vec![false; self.cells.len()];
        self.for_each_covered(path, radius, |c, _| mask[c] = true);
        mask
    }

    /// Per cell, the first and last segment index covering it (`None` if uncovered).
    pub fn segment_extents(&self, path: &[Point], radius: f64) -> Vec<Option<(u32, u32)>> {
        let mut out: Vec<Option<(u32, u32)>> = vec![None; self.cells.len()];
        self.for_each_covered(path, radius, |c, s| {
            let s = s as u32;
            out[c] = Some(match out[c] {
                None => (s, s),
                Some((a, b)) => (a.min(s), b.max(s)),
            });
        });
        out
    }

    pub fn fraction(&self, path: &[Point], radius: f64) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        let covered = self.covered_mask(path, radius).into_iter().filter(|c| *c).count();
        covered as f64 / self.cells.len() as f64
    }
}

/// Fraction of the region within `radius` of the path, on a raster of the
/// given resolution (at most `radius / 10`).
pub fn coverage_fraction(path: &[Point], region: &Region, radius: f64, resolution: f64) -> Result<f64> {
    if !(resolution <= radius / 10.0) {
        return Err(Error::Parameter(format!(
            "raster resolution {resolution} is coarser than tool radius / 10 = {}",
            radius / 10.0
        )));
    }
    Ok(CoverageRaster::new(region, resolution)?.fraction(path, radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningStats {
    pub max_angle_deg: f64,
    pub sharp_count: usize,
    pub threshold_deg: f64,
    /// Turning angle over mean adjacent segment length.
    pub max_curvature: f64,
    pub mean_curvature: f64,
}

/// Exterior angle at every interior vertex; vertices flagged in `skip` are ignored.
pub fn turning_stats(path: &[Point], threshold_deg: f64, skip: Option<&[bool]>) -> TurningStats {
    let mut max_angle: f64 = 0.0;
    let mut sharp = 0;
    let mut max_k: f64 = 0.0;
    let mut sum_k = 0.0;
    let mut counted = 0usize;
    for i in 1..path.len().saturating_sub(1) {
        if skip.is_some_and(|s| s[i]) {
            continue;
        }
        let (a, b, c) = (path[i - 1], path[i], path[i + 1]);
        let ang = turning_angle(a, b, c).to_degrees();
        let mean_len = 0.5 * ((b - a).norm() + (c - b).norm());
        let k = if mean_len > 0.0 { ang.to_radians() / mean_len } else { 0.0 };
        max_angle = max_angle.max(ang);
        if ang > threshold_deg {
            sharp += 1;
        }
        max_k = max_k.max(k);
        sum_k += k;
        counted += 1;
    }
    TurningStats {
        max_angle_deg: max_angle,
        sharp_count: sharp,
        threshold_deg,
        max_curvature: max_k,
        mean_curvature: if counted > 0 { sum_k / counted as f64 } else { 0.0 },
    }
}

/// `STR = k·ln(1/ε)·N·ln N / t` with `N = (m+1)n + n̂`.
pub fn str_ratio(m: usize, n: usize, n_hat: usize, k: usize, epsilon: f64, elapsed_seconds: f64) -> Result<f64> {
    if m == 0 || n == 0 || n_hat == 0 || k == 0 {
        return Err(Error::Parameter(format!(
            "STR needs positive counts, got m={m}, n={n}, n̂={n_hat}, k={k}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!("STR needs 0 < ε < 1, got {epsilon}")));
    }
    if !(elapsed_seconds > 0.0) {
        return Err(Error::Parameter(format!("STR needs positive elapsed time, got {elapsed_seconds}")));
    }
    Ok(predicted_operations(m, n, n_hat, k, epsilon) / elapsed_seconds)
}

/// `k·ln(1/ε)·N·ln N`, the predicted operation count of spacing control.
pub fn predicted_operations(m: usize, n: usize, n_hat: usize, k: usize, epsilon: f64) -> f64 {
    let size = ((m + 1) * n + n_hat) as f64;
    k as f64 * (1.0 / epsilon).ln() * size * size.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingStats {
    pub samples: usize,
    pub max: f64,
    pub mean: f64,
    pub p95: f64,
}

/// Distance from sampled path points to the nearest point of a different turn,
/// where turns are counted by the unwrapped angle of the path around `center`
/// and "different" means more than half a turn apart.
pub fn spacing_stats(path: &[Point], center: Point, samples: usize, cell: f64) -> SpacingStats {
    let n = path.len();
    if n < 3 || samples == 0 || !(cell > 0.0) {
        return SpacingStats {
            samples: 0,
            max: 0.0,
            mean: 0.0,
            p95: 0.0,
        };
    }
    let mut winding = Vec::with_capacity(n);
    let mut acc = 0.0;
    winding.push(0.0);
    for i in 1..n {
        let a = path[i - 1] - center;
        let b = path[i] - center;
        if a.norm_sqr() > 0.0 && b.norm_sqr() > 0.0 {
            acc += (b / a).arg();
        }
        winding.push(acc);
    }
    let grid = crate::geometry::SegmentIndex::new(path, false);
    let bbox = BBox::of(path);
    let diag = bbox.diameter();
    let mut dists = Vec::new();
    let mut buf = Vec::new();
    let m = samples.min(n);
    for s in 0..m {
        let i = if m > 1 { s * (n - 1) / (m - 1) } else { 0 };
        let p = path[i];
        let wi = winding[i];
        let mut radius = cell;
        let mut best = f64::INFINITY;
        while radius <= 2.0 * diag + cell {
            buf.clear();
            let r = Point::new(radius, radius);
            grid.candidates(p - r, p + r, &mut buf);
            for &seg in &buf {
                let seg = seg as usize;
                if (winding[seg] - wi).abs() <= std::f64::consts::PI
                    && (winding[seg + 1] - wi).abs() <= std::f64::consts::PI
                {
                    continue;
                }
                let (a, b) = grid.segment(seg);
                best = best.min(point_segment_distance(p, a, b));
            }
            if best <= radius {
                break;
            }
            radius *= 2.0;
        }
        if best.is_finite() {
            dists.push(best);
        }
    }
    if dists.is_empty() {
        return SpacingStats {
            samples: 0,
            max: 0.0,
            mean: 0.0,
            p95: 0.0,
        };
    }
    dists.sort_by(f64::total_cmp);
    let count = dists.len();
    SpacingStats {
        samples: count,
        max: dists[count - 1],
        mean: dists.iter().sum::<f64>() / count as f64,
        p95: dists[((count as f64 * 0.95) as usize).min(count - 1)],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub vertices: usize,
    pub length: f64,
    pub tool_radius: f64,
    pub resolution: f64,
    pub coverage_fraction: f64,
    pub uncovered_fraction: f64,
    pub turning: TurningStats,
    pub spacing: SpacingStats,
    pub self_crossings: usize,
    pub str_ratio: Option<f64>,
}

/// Score a path against a region.
pub fn report(
    path: &[Point],
    region: &Region,
    tool_radius: f64,
    resolution: f64,
    threshold_deg: f64,
    skip: Option<&[bool]>,
    center: Point,
) -> Result<PathReport> {
    let coverage = coverage_fraction(path, region, tool_radius, resolution)?;
    Ok(PathReport {
        vertices: path.len(),
        length: path_length(path),
        tool_radius,
        resolution,
        coverage_fraction: coverage,
        uncovered_fraction: 1.0 - coverage,
        turning: turning_stats(path, threshold_deg, skip),
        spacing: spacing_stats(path, center, 500, tool_radius),
        self_crossings: crate::geometry::self_crossings(path).len(),
        str_ratio: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn lengths() {
        assert_eq!(path_length(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)])), 4.0);
        assert_eq!(path_length(&pts(&[(0.0, 0.0), (3.0, 4.0)])), 5.0);
        let n = 10_000;
        let circle: Vec<Point> = (0..=n).map(|i| Point::from_polar(2.0, TAU * i as f64 / n as f64)).collect();
        assert!((path_length(&circle) / (TAU * 2.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn str_anchors() {
        let a = str_ratio(2, 8192, 1000, 11, 0.01, 267.09).unwrap();
        assert!((a / 49232.75 - 1.0).abs() < 1e-3, "{a}");
        let b = str_ratio(3, 8192, 1000, 8, 0.01, 290.04).unwrap();
        assert!((b / 44725.34 - 1.0).abs() < 1e-3, "{b}");
        let half = str_ratio(2, 8192, 1000, 11, 0.01, 2.0 * 267.09).unwrap();
        assert!((half * 2.0 - a).abs() < 1e-9 * a);
        assert!(str_ratio(0, 1, 1, 1, 0.1, 1.0).is_err());
        assert!(str_ratio(1, 1, 1, 1, 1.5, 1.0).is_err());
    }

    #[test]
    fn turning_of_square_corner_and_line() {
        let line = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        let s = turning_stats(&line, 30.0, None);
        assert_eq!((s.max_angle_deg, s.sharp_count), (0.0, 0));
        let corner = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        let s = turning_stats(&corner, 30.0, None);
        assert!((s.max_angle_deg - 90.0).abs() < 1e-9);
        assert_eq!(s.sharp_count, 1);
        assert_eq!(turning_stats(&corner, 30.0, Some(&[false, true, false])).sharp_count, 0);
    }

    #[test]
    fn thin_ring_covered_by_its_boundary() {
        let n = 400;
        let outer: Vec<Point> = (0..n).map(|i| Point::from_polar(1.0, TAU * i as f64 / n as f64)).collect();
        let inner: Vec<Point> = (0..n).map(|i| Point::from_polar(0.9, -TAU * i as f64 / n as f64)).collect();
        let region = Region::new(outer.clone(), vec![inner]);
        let mut path = outer.clone();
        path.push(outer[0]);
        let f = coverage_fraction(&path, &region, 0.12, 0.01).unwrap();
        assert_eq!(f, 1.0);
        assert_eq!(coverage_fraction(&[], &region, 0.12, 0.01).unwrap(), 0.0);
        assert!(coverage_fraction(&path, &region, 0.12, 0.05).is_err());
    }

    #[test]
    fn coverage_is_monotone_in_segments() {
        let sq = pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]);
        let region = Region::new(sq, vec![]);
        let raster = CoverageRaster::new(&region, 0.05).unwrap();
        let path = pts(&[(0.5, 0.5), (3.5, 0.5), (3.5, 1.5), (0.5, 1.5), (0.5, 2.5), (3.5, 2.5)]);
        let mut last = 0.0;
        for end in 1..=path.len() {
            let f = raster.fraction(&path[..end], 0.5);
            assert!(f >= last);
            last = f;
        }
    }

    #[test]
    fn spacing_of_concentric_turns() {
        // Archimedean spiral with pitch 0.2
        let turns = 4.0;
        let n = 4000;
        let path: Vec<Point> = (0..=n)
            .map(|i| {
                let a = TAU * turns * i as f64 / n as f64;
                Point::from_polar(1.0 - 0.2 * a / TAU, a)
            })
            .collect();
        let s = spacing_stats(&path, Point::new(0.0, 0.0), 200, 0.05);
        assert!(s.samples > 100);
        assert!(s.max < 0.21 && s.mean > 0.15, "{s:?}");
    }
}
