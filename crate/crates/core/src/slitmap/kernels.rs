use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::boundary::DiscretizedBoundary;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// How the diagonal of the discretized kernels is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalRule {
    /// Diagonal chosen so each row reproduces the exact integral of a constant
    /// density. Off-diagonal quadrature error then only acts on `u(t) − u(s)`,
    /// which keeps rows next to graded corners accurate.
    #[default]
    RowSum,
    /// Continuous limits `N(t,t)` and `M1(t,t)` (zero at graded corners).
    Limit,
    /// Zero diagonal for both kernels.
    Omit,
}

/// Discretized generalized Neumann kernel `N̂` and the Wittich-split kernel `M̂`,
/// both indexed `[s, t]` over the flattened grid `p = j*n + k`.
#[derive(Debug, Clone)]
pub struct KernelPair {
    pub n: usize,
    pub n_matrix: DMatrix<f64>,
    pub m_matrix: DMatrix<f64>,
}

impl KernelPair {
    pub fn size(&self) -> usize {
        self.n_matrix.nrows()
    }

    /// Quadrature weight `2π/n` of the trapezoidal rule.
    pub fn weight(&self) -> f64 {
        2.0 * PI / self.n as f64
    }
}

/// `A(s) η'(t) / (A(t) (η(t) − η(s)))` with `A = η` (origin-relative coordinates).
/// Real part over π is `M(s,t)`, imaginary part over π is `N(s,t)`.
#[inline]
pub fn kernel_quotient(eta_s: Point, eta_t: Point, deta_t: Point) -> Point {
    let d = eta_t - eta_s;
    eta_s * (deta_t / eta_t) * d.conj() / d.norm_sqr()
}

/// Continuous Neumann kernel `N(s,t)` for `s ≠ t`.
pub fn neumann_kernel(eta_s: Point, eta_t: Point, deta_t: Point) -> f64 {
    kernel_quotient(eta_s, eta_t, deta_t).im / PI
}

/// Continuous kernel `M(s,t)` for `s ≠ t`.
pub fn m_kernel(eta_s: Point, eta_t: Point, deta_t: Point) -> f64 {
    kernel_quotient(eta_s, eta_t, deta_t).re / PI
}

/// Diagonal limits `(N(t,t), M1(t,t))` of a smooth boundary point.
pub fn diagonal_limits(eta: Point, deta: Point, d2eta: Point) -> (f64, f64) {
    let curv = d2eta / deta;
    let log_a = deta / eta;
    (
        (0.5 * curv.im - log_a.im) / PI,
        (0.5 * curv.re - log_a.re) / PI,
    )
}

/// Fill `N̂` and `M̂` for the trapezoidal/Wittich discretization.
pub fn assemble_kernels(db: &DiscretizedBoundary) -> Result<KernelPair> {
    assemble_kernels_with(db, DiagonalRule::default())
}

pub fn assemble_kernels_with(db: &DiscretizedBoundary, rule: DiagonalRule) -> Result<KernelPair> {
    let n = db.n;
    let total = db.total();
    let origin = db.origin;
    let eta: Vec<Point> = db.boundaries.iter().flat_map(|b| b.z.iter().map(|z| z - origin)).collect();
    let deta: Vec<Point> = db.boundaries.iter().flat_map(|b| b.dz.iter().copied()).collect();
    let d2eta: Vec<Point> = db.boundaries.iter().flat_map(|b| b.d2z.iter().copied()).collect();
    let corner: Vec<bool> = db.boundaries.iter().flat_map(|b| b.corner.iter().copied()).collect();
    // strength of the Hilbert-type singularity of row s: η(t) − η(s) vanishes to
    // order p at a graded corner, so η'(t)/(η(t) − η(s)) ~ p/(t − s) there
    let order: Vec<f64> = db
        .boundaries
        .iter()
        .flat_map(|b| b.corner.iter().map(move |&c| if c { b.grading as f64 } else { 1.0 }))
        .collect();

    let scale = eta.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if let Some(p) = eta.iter().position(|z| z.norm() <= 1e-14 * scale) {
        return Err(Error::Geometry(format!(
            "boundary {} passes through the origin at sample {}",
            p / n,
            p % n
        )));
    }

    // cot(π d / n) for d = 0..n (the d = 0 entry is never read)
    let cot: Vec<f64> = (0..n)
        .map(|d| if d == 0 { 0.0 } else { 1.0 / (PI * d as f64 / n as f64).tan() })
        .collect();
    let coincide = 1e-12 * scale;

    let mut nm = DMatrix::<f64>::zeros(total, total);
    let mut mm = DMatrix::<f64>::zeros(total, total);
    let mut n_rows = vec![0.0; total];
    let mut m_rows = vec![0.0; total];
    for t in 0..total {
        let (jt, kt) = (t / n, t % n);
        let et = eta[t];
        let a = deta[t] / et;
        let ncol = &mut nm.as_mut_slice()[t * total..(t + 1) * total];
        for s in 0..total {
            if s == t {
                continue;
            }
            let es = eta[s];
            let d = et - es;
            let dn = d.norm_sqr();
            if dn <= coincide * coincide {
                return Err(Error::Geometry(format!(
                    "boundary samples coincide: boundary {} sample {} and boundary {} sample {}",
                    s / n,
                    s % n,
                    jt,
                    kt
                )));
            }
            let q = es * a * d.conj() / dn;
            ncol[s] = q.im / PI;
            n_rows[s] += q.im / PI;
        }
        let mcol = &mut mm.as_mut_slice()[t * total..(t + 1) * total];
        for s in 0..total {
            if s == t {
                continue;
            }
            let es = eta[s];
            let d = et - es;
            let q = es * a * d.conj() / d.norm_sqr();
            let mut v = q.re / PI;
            if s / n == jt {
                // M = -(1/2π) cot((s−t)/2) + M1; Wittich keeps the cot part on odd offsets only
                let diff = (s % n + n - kt) % n;
                let c = order[s] * cot[diff] / (2.0 * PI);
                v += if diff % 2 == 0 { c } else { -c };
            }
            mcol[s] = v;
            m_rows[s] += v;
        }
        if rule == DiagonalRule::Limit && !corner[t] {
            let (nd, md) = diagonal_limits(et, deta[t], d2eta[t]);
            nm[(t, t)] = nd;
            mm[(t, t)] = md;
        }
    }
    if rule == DiagonalRule::RowSum {
        let w = 2.0 * PI / n as f64;
        // With A = η, N integrates to −1 and M to 0 at every smooth boundary
        // point (outer boundary counterclockwise around O, holes clockwise).
        // Corners take the same values, the limit from either side.
        for s in 0..total {
            nm[(s, s)] = (-1.0 - w * n_rows[s]) / w;
            mm[(s, s)] = -m_rows[s];
        }
    }
    Ok(KernelPair {
        n,
        n_matrix: nm,
        m_matrix: mm,
    })
}
