//! Linear solvers for the second-kind system `(I − w N̂) μ = b`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense systems up to this many unknowns use LU under [`SolverBackend::Auto`].
pub const AUTO_LU_LIMIT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverBackend {
    DenseLu,
    Gmres,
    #[default]
    Auto,
}

/// Relative residual bound for accepting a solution.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// `y = x − w N x`
pub fn apply_system(n_matrix: &DMatrix<f64>, weight: f64, x: &DVector<f64>) -> DVector<f64> {
    let mut y = x.clone();
    y.gemv(-weight, n_matrix, x, 1.0);
    y
}

pub fn solve_system(n_matrix: &DMatrix<f64>, weight: f64, rhs: &DVector<f64>, backend: SolverBackend) -> Result<DVector<f64>> {
    let size = rhs.len();
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return Ok(DVector::zeros(size));
    }
    let use_lu = match backend {
        SolverBackend::DenseLu => true,
        SolverBackend::Gmres => false,
        SolverBackend::Auto => size <= AUTO_LU_LIMIT,
    };
    let x = if use_lu {
        let a = DMatrix::<f64>::identity(size, size) - n_matrix * weight;
        a.lu()
            .solve(rhs)
            .ok_or_else(|| Error::numerical("LU factorization is singular", f64::INFINITY))?
    } else {
        gmres(|v| apply_system(n_matrix, weight, v), rhs, 1e-13, 60, 2000)?
    };
    let residual = (apply_system(n_matrix, weight, &x) - rhs).norm() / rhs_norm;
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(Error::numerical("boundary integral equation residual too large", residual));
    }
    Ok(x)
}

/// Restarted GMRES with modified Gram–Schmidt and Givens rotations.
pub fn gmres<F>(apply: F, b: &DVector<f64>, tol: f64, restart: usize, max_iter: usize) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let size = b.len();
    let b_norm = b.norm();
    let mut x = DVector::<f64>::zeros(size);
    let mut iterations = 0;
    let mut last = f64::INFINITY;
    while iterations < max_iter {
        let r = b - apply(&x);
        let beta = r.norm();
        last = beta / b_norm;
        if last <= tol {
            return Ok(x);
        }
        let m = restart.min(size);
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m + 1);
        basis.push(r / beta);
        let mut h = DMatrix::<f64>::zeros(m + 1, m);
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = DVector::<f64>::zeros(m + 1);
        g[0] = beta;
        let mut used = 0;
        for j in 0..m {
            let mut w = apply(&basis[j]);
            for (i, v) in basis.iter().enumerate() {
                let hij = w.dot(v);
                h[(i, j)] = hij;
                w.axpy(-hij, v, 1.0);
            }
            let wn = w.norm();
            h[(j + 1, j)] = wn;
            for i in 0..j {
                let t = cs[i] * h[(i, j)] + sn[i] * h[(i + 1, j)];
                h[(i + 1, j)] = -sn[i] * h[(i, j)] + cs[i] * h[(i + 1, j)];
                h[(i, j)] = t;
            }
            let denom = h[(j, j)].hypot(h[(j + 1, j)]);
            cs[j] = h[(j, j)] / denom;
            sn[j] = h[(j + 1, j)] / denom;
            h[(j, j)] = denom;
            h[(j + 1, j)] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            iterations += 1;
            last = g[j + 1].abs() / b_norm;
            if last <= tol || wn == 0.0 {
                break;
            }
            basis.push(w / wn);
        }
        // back substitution on the leading `used × used` block
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let mut acc = g[i];
            for k in (i + 1)..used {
                acc -= h[(i, k)] * y[k];
            }
            y[i] = acc / h[(i, i)];
        }
        for (i, yi) in y.iter().enumerate() {
            x.axpy(*yi, &basis[i], 1.0);
        }
        if last <= tol {
            return Ok(x);
        }
    }
    Err(Error::numerical(format!("GMRES did not converge in {max_iter} iterations"), last))
}
