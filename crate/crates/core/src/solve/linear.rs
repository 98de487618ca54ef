use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::SparseColMat;
use faer::{Col, Side};

use super::{dot, norm2, LinearSolver, SolverConfig};
use crate::error::{FemError, Result};
use crate::sparse::CsrMatrix;

enum Kind {
    Cholesky(Llt<usize, f64>),
    Lu(Lu<usize, f64>),
    Cg { diag_inv: Vec<f64> },
}

/// A matrix prepared for repeated solves.
pub struct Factorization {
    matrix: CsrMatrix,
    kind: Kind,
    tol: f64,
    max_iter: usize,
}

fn check_rows(a: &CsrMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(FemError::InvalidArgument(format!(
            "matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    for i in 0..a.nrows() {
        if a.row(i).1.iter().all(|&v| v == 0.0) {
            return Err(FemError::Singular(format!("row {i} is zero")));
        }
    }
    Ok(())
}

impl Factorization {
    pub fn new(a: &CsrMatrix, config: &SolverConfig) -> Result<Self> {
        check_rows(a)?;
        let n = a.nrows();
        let kind = match config.linear {
            LinearSolver::CgJacobi => {
                let diag = a.diagonal();
                if let Some(i) = diag.iter().position(|&d| d <= 0.0) {
                    return Err(FemError::InvalidArgument(format!(
                        "CG requires a positive diagonal (entry {i} is {})",
                        diag[i]
                    )));
                }
                Kind::Cg {
                    diag_inv: diag.iter().map(|d| 1.0 / d).collect(),
                }
            }
            LinearSolver::DirectSparse => {
                let symmetric = a.symmetry_error() <= 1e-12 * a.max_abs();
                let mut chol = None;
                if symmetric {
                    let lower = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &a.triplets(true))
                        .map_err(|e| FemError::InvalidArgument(format!("{e:?}")))?;
                    chol = lower.sp_cholesky(Side::Lower).ok();
                }
                match chol {
                    Some(llt) => Kind::Cholesky(llt),
                    None => {
                        let full = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &a.triplets(false))
                            .map_err(|e| FemError::InvalidArgument(format!("{e:?}")))?;
                        Kind::Lu(full.sp_lu().map_err(|e| FemError::Singular(format!("{e:?}")))?)
                    }
                }
            }
        };
        Ok(Factorization {
            matrix: a.clone(),
            kind,
            tol: config.tol_linear,
            max_iter: config.cg_max_iter,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.matrix.nrows();
        assert_eq!(b.len(), n);
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        match &self.kind {
            Kind::Cg { diag_inv } => self.cg(b, diag_inv, bnorm),
            _ => {
                let mut x = self.direct(b);
                // a few steps of iterative refinement
                for _ in 0..3 {
                    let r = self.residual(&x, b);
                    let rel = norm2(&r) / bnorm;
                    if !rel.is_finite() {
                        return Err(FemError::Singular("factorization produced non-finite values".into()));
                    }
                    if rel <= self.tol {
                        return Ok(x);
                    }
                    let dx = self.direct(&r);
                    x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
                }
                let rel = norm2(&self.residual(&x, b)) / bnorm;
                if !rel.is_finite() || rel > 1e-6 {
                    return Err(FemError::Singular(format!("direct solve residual {rel:e}")));
                }
                if rel > self.tol {
                    return Err(FemError::NotConverged {
                        method: "direct solve",
                        iterations: 3,
                        residual: rel,
                    });
                }
                Ok(x)
            }
        }
    }

    fn direct(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = match &self.kind {
            Kind::Cholesky(f) => f.solve(&rhs),
            Kind::Lu(f) => f.solve(&rhs),
            Kind::Cg { .. } => unreachable!(),
        };
        (0..b.len()).map(|i| x[i]).collect()
    }

    fn residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        let ax = self.matrix.matvec(x);
        b.iter().zip(&ax).map(|(bi, a)| bi - a).collect()
    }

    fn cg(&self, b: &[f64], diag_inv: &[f64], bnorm: f64) -> Result<Vec<f64>> {
        let n = b.len();
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(diag_inv).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        for it in 0..self.max_iter {
            self.matrix.matvec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                return Err(FemError::InvalidArgument(format!(
                    "CG detected an indefinite matrix at iteration {it}"
                )));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rel = norm2(&r) / bnorm;
            if rel <= self.tol {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] * diag_inv[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(FemError::NotConverged {
            method: "cg_jacobi",
            iterations: self.max_iter,
            residual: norm2(&r) / bnorm,
        })
    }
}

/// Solves `A x = b` with the configured method.
pub fn solve_linear(a: &CsrMatrix, b: &[f64], config: &SolverConfig) -> Result<Vec<f64>> {
    Factorization::new(a, config)?.solve(b)
}
