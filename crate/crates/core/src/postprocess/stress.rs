use nalgebra::{DVector, Matrix3};

use crate::assembly::{elasticity_tensor, voigt_index, voigt_size, MaterialModel, MaterialParams};
use crate::basis::FESpace;
use crate::error::{FemError, Result};

/// Von Mises stress of a `dim`-dimensional stress tensor (upper-left block
/// of `sigma` in 2D).
pub fn von_mises(sigma: &Matrix3<f64>, dim: usize) -> f64 {
    let s = sigma;
    let sq = if dim == 2 {
        s[(0, 0)].powi(2) - s[(0, 0)] * s[(1, 1)] + s[(1, 1)].powi(2) + 3.0 * s[(0, 1)] * s[(1, 0)]
    } else {
        ((s[(0, 0)] - s[(1, 1)]).powi(2) + (s[(2, 2)] - s[(1, 1)]).powi(2) + (s[(2, 2)] - s[(0, 0)]).powi(2)) / 2.0
            + 3.0 * (s[(0, 1)] * s[(1, 0)] + s[(2, 1)] * s[(1, 2)] + s[(2, 0)] * s[(0, 2)])
    };
    sq.max(0.0).sqrt()
}

/// Stress from a displacement gradient: small-strain `C : ε` for Hooke and
/// orthotropic materials, Cauchy stress for Neo-Hookean.
pub fn stress_from_gradient(grad: &Matrix3<f64>, material: &MaterialParams, dim: usize) -> Result<Matrix3<f64>> {
    if material.model == MaterialModel::NeoHookean {
        let f = Matrix3::identity() + grad;
        let j = f.determinant();
        let finv_t = f
            .try_inverse()
            .filter(|_| j > 0.0)
            .ok_or(FemError::ElementInverted { cell: usize::MAX, det_f: j })?
            .transpose();
        let (mu, lambda) = (material.mu(), material.lambda(dim));
        let p = mu * (f - finv_t) + lambda * j.ln() * finv_t;
        let mut s = p * f.transpose() / j;
        if dim == 2 {
            s[(2, 2)] = 0.0;
        }
        return Ok(s);
    }
    let c = elasticity_tensor(material, dim)?;
    let nv = voigt_size(dim);
    let mut e = DVector::zeros(nv);
    for i in 0..dim {
        for j in i..dim {
            e[voigt_index(dim, i, j)] = if i == j { grad[(i, i)] } else { grad[(i, j)] + grad[(j, i)] };
        }
    }
    let sv = c * e;
    let mut s = Matrix3::zeros();
    for i in 0..dim {
        for j in 0..dim {
            s[(i, j)] = sv[voigt_index(dim, i, j)];
        }
    }
    Ok(s)
}

/// Per-vertex stress: each cell's stress evaluated at its vertices, averaged
/// arithmetically over the incident cells.
pub fn vertex_averaged_stress(space: &FESpace, coeffs: &[f64], material: &MaterialParams) -> Result<Vec<Matrix3<f64>>> {
    let mesh = space.mesh();
    let dim = mesh.dim();
    if space.components() != dim {
        return Err(FemError::InvalidArgument("stress recovery needs a displacement field".into()));
    }
    let mut sum = vec![Matrix3::zeros(); mesh.num_vertices()];
    let mut count = vec![0usize; mesh.num_vertices()];
    let refs = mesh.kind().reference_vertices();
    for c in 0..mesh.num_cells() {
        for (lv, &v) in mesh.cell(c).iter().enumerate() {
            let (_, g) = space.eval_in_cell(c, refs[lv], coeffs);
            let mut grad = Matrix3::zeros();
            for i in 0..dim {
                for j in 0..dim {
                    grad[(i, j)] = g[i][j];
                }
            }
            let s = stress_from_gradient(&grad, material, dim).map_err(|e| match e {
                FemError::ElementInverted { det_f, .. } => FemError::ElementInverted { cell: c, det_f },
                other => other,
            })?;
            sum[v] += s;
            count[v] += 1;
        }
    }
    Ok(sum.into_iter().zip(count).map(|(s, n)| if n > 0 { s / n as f64 } else { s }).collect())
}
