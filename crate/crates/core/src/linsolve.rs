//! Conjugate gradients for the assembled symmetric positive definite system.

use alloc::vec;
use alloc::vec::Vec;

use crate::sparse::SparseSymMatrix;

/// Preconditioner choice for [`cg_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    None,
    #[default]
    Jacobi,
}

/// Solver configuration.
#[derive(Debug, Clone, Copy)]
pub struct CgConfig {
    /// Relative tolerance on the residual, checked against the true residual
    /// before returning.
    pub rel_tolerance: f64,
    /// Hard iteration cap; `None` means ten times the system dimension.
    pub max_iterations: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig {
            rel_tolerance: 1e-10,
            max_iterations: None,
            preconditioner: Preconditioner::Jacobi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CgError {
    DimensionMismatch { matrix: usize, rhs: usize },
    /// The iteration hit the cap without meeting the residual contract;
    /// usually a sign of an ill-conditioned or non-SPD matrix.
    MaxIterationsExceeded { iterations: usize, residual: f64 },
    /// A curvature or preconditioner quantity lost positivity: the matrix is
    /// not SPD.
    Breakdown { iterations: usize },
    InvalidConfig,
}

impl core::fmt::Display for CgError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CgError::DimensionMismatch { matrix, rhs } => {
                write!(f, "dimension mismatch: matrix {matrix}, rhs {rhs}")
            }
            CgError::MaxIterationsExceeded {
                iterations,
                residual,
            } => write!(
                f,
                "cg did not converge in {iterations} iterations (relative residual {residual:e})"
            ),
            CgError::Breakdown { iterations } => {
                write!(f, "cg breakdown at iteration {iterations}: matrix is not SPD")
            }
            CgError::InvalidConfig => write!(f, "invalid cg configuration"),
        }
    }
}

impl core::error::Error for CgError {}

/// A converged solution together with the iteration count that produced it.
#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Solves `M x = b` by (optionally Jacobi-preconditioned) conjugate
/// gradients from a zero initial guess.
///
/// On success the returned `x` satisfies `||b - M x|| <= rel_tolerance *
/// ||b||`; the solver never returns a vector that misses this contract.
pub fn cg_solve(m: &SparseSymMatrix, b: &[f64], cfg: &CgConfig) -> Result<CgSolution, CgError> {
    if m.dim() != b.len() {
        return Err(CgError::DimensionMismatch {
            matrix: m.dim(),
            rhs: b.len(),
        });
    }
    if !(cfg.rel_tolerance > 0.0 && cfg.rel_tolerance < 1.0) {
        return Err(CgError::InvalidConfig);
    }
    let n = m.dim();
    let max_iter = cfg.max_iterations.unwrap_or(10 * n.max(1)).max(1);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(CgSolution {
            x: vec![0.0; n],
            iterations: 0,
        });
    }

    let inv_diag: Option<Vec<f64>> = match cfg.preconditioner {
        Preconditioner::None => None,
        Preconditioner::Jacobi => {
            let d = m.diagonal();
            if d.iter().any(|&v| v <= 0.0) {
                return Err(CgError::Breakdown { iterations: 0 });
            }
            Some(d.iter().map(|&v| 1.0 / v).collect())
        }
    };
    let apply_prec = |r: &[f64], z: &mut [f64]| match &inv_diag {
        Some(d) => {
            for i in 0..r.len() {
                z[i] = d[i] * r[i];
            }
        }
        None => z.copy_from_slice(r),
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    apply_prec(&r, &mut z);
    let mut p = z.clone();
    let mut mp = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let tol = cfg.rel_tolerance * b_norm;

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        m.mul_vec(&p, &mut mp);
        let curvature = dot(&p, &mp);
        if curvature <= 0.0 || curvature.is_nan() {
            return Err(CgError::Breakdown { iterations });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * mp[i];
        }
        if norm(&r) <= tol {
            // Recurrence residual can drift; confirm against the true one.
            m.mul_vec(&x, &mut mp);
            let mut true_r = 0.0;
            for i in 0..n {
                let d = b[i] - mp[i];
                true_r += d * d;
            }
            let true_r = libm::sqrt(true_r);
            if true_r <= tol {
                return Ok(CgSolution { x, iterations });
            }
            // Restart the recurrence from the true residual.
            for i in 0..n {
                r[i] = b[i] - mp[i];
            }
            apply_prec(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        apply_prec(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(CgError::MaxIterationsExceeded {
        iterations,
        residual: norm(&r) / b_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_converges_in_one_iteration() {
        let m = SparseSymMatrix::identity(17);
        let b: Vec<f64> = (0..17).map(|i| i as f64 - 3.5).collect();
        let cfg = CgConfig::default();
        let sol = cg_solve(&m, &b, &cfg).unwrap();
        assert_eq!(sol.iterations, 1);
        for (xi, bi) in sol.x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn two_by_two_hand_solve() {
        let m = SparseSymMatrix::from_dense(&[&[4.0, 1.0], &[1.0, 3.0]]);
        let sol = cg_solve(&m, &[1.0, 2.0], &CgConfig::default()).unwrap();
        assert!((sol.x[0] - 1.0 / 11.0).abs() < 1e-12);
        assert!((sol.x[1] - 7.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn zero_row_reports_failure() {
        let m = SparseSymMatrix::from_dense(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let err = cg_solve(&m, &[1.0, 1.0], &CgConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            CgError::Breakdown { .. } | CgError::MaxIterationsExceeded { .. }
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let m = SparseSymMatrix::identity(3);
        let err = cg_solve(&m, &[1.0, 2.0], &CgConfig::default()).unwrap_err();
        assert!(matches!(err, CgError::DimensionMismatch { .. }));
    }

    #[test]
    fn cg_matches_dense_cholesky_on_an_assembled_system() {
        use crate::mwg::{assemble_load, assemble_system, BoundaryMode};
        use crate::verify::Problem;
        use alloc::vec::Vec;

        // Dense Cholesky as an independent direct-solve oracle.
        fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
            let n = b.len();
            let mut l = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..=i {
                    let mut s = a[i][j];
                    for k in 0..j {
                        s -= l[i][k] * l[j][k];
                    }
                    if i == j {
                        l[i][j] = libm::sqrt(s);
                    } else {
                        l[i][j] = s / l[j][j];
                    }
                }
            }
            let mut y = vec![0.0; n];
            for i in 0..n {
                let mut s = b[i];
                for k in 0..i {
                    s -= l[i][k] * y[k];
                }
                y[i] = s / l[i][i];
            }
            let mut x = vec![0.0; n];
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in (i + 1)..n {
                    s -= l[k][i] * x[k];
                }
                x[i] = s / l[i][i];
            }
            x
        }

        let problem = Problem::square_sine();
        let mut mesh = problem.mesh.clone();
        for _ in 0..2 {
            mesh = mesh.uniform_refine().fine_mesh;
        }
        let m = assemble_system(&mesh, BoundaryMode::HomogeneousDirichlet);
        let b = assemble_load(&mesh, |x| (problem.source)(x));
        let n = m.dim();
        let mut dense = vec![vec![0.0; n]; n];
        for r in 0..n {
            let (cols, vals) = m.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                dense[r][c] = v;
            }
        }
        let direct = cholesky_solve(&dense, &b);
        let cfg = CgConfig {
            rel_tolerance: 1e-13,
            ..CgConfig::default()
        };
        let sol = cg_solve(&m, &b, &cfg).unwrap();
        let scale = direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in sol.x.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-8 * (1.0 + scale));
        }
    }

    #[test]
    fn residual_contract_holds() {
        // A small SPD matrix with off-diagonal structure.
        let m = SparseSymMatrix::from_dense(&[
            &[5.0, 1.0, 0.0, 0.5],
            &[1.0, 4.0, 1.0, 0.0],
            &[0.0, 1.0, 6.0, 2.0],
            &[0.5, 0.0, 2.0, 3.0],
        ]);
        let b = [1.0, -2.0, 3.0, 0.25];
        for prec in [Preconditioner::None, Preconditioner::Jacobi] {
            let cfg = CgConfig {
                preconditioner: prec,
                ..CgConfig::default()
            };
            let sol = cg_solve(&m, &b, &cfg).unwrap();
            let mut mx = [0.0; 4];
            m.mul_vec(&sol.x, &mut mx);
            let res: f64 = b
                .iter()
                .zip(&mx)
                .map(|(bi, mi)| (bi - mi) * (bi - mi))
                .sum::<f64>()
                .sqrt();
            let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(res <= cfg.rel_tolerance * bn);
        }
    }
}
