//! Bilinear forms: Laplacian, linear elasticity, mass, Stokes and the mixed
//! incompressible elasticity system.

use super::material::{elasticity_tensor, voigt_index, voigt_size, MaterialParams};
use super::{BlockStructure, LinearSystem};
use crate::basis::{CellEvaluator, FESpace, Family};
use crate::error::{FemError, Result};
use crate::quadrature::{default_degree, gauss_rule, QuadratureRule};
use crate::sparse::CsrMatrix;

/// Rule of degree `2p + 1` for the space's basis degree `p`.
pub fn default_rule(space: &FESpace) -> Result<QuadratureRule> {
    gauss_rule(space.mesh().kind().into(), default_degree(space.family().degree()))
}

fn require_components(space: &FESpace, want: usize, what: &str) -> Result<()> {
    if space.components() != want {
        return Err(FemError::InvalidArgument(format!(
            "{what} needs {want} component(s), space has {}",
            space.components()
        )));
    }
    Ok(())
}

/// Loops over cells, filling a dense local block and scattering it.
fn assemble_square<F>(space: &FESpace, rule: &QuadratureRule, mut kernel: F) -> CsrMatrix
where
    F: FnMut(&CellEvaluator, &mut [f64]),
{
    let mut k = CsrMatrix::pattern(space, space);
    let mut ev = CellEvaluator::new(space, rule);
    let nd = space.dofs_per_cell();
    let mut local = vec![0.0; nd * nd];
    let mut dofs = Vec::with_capacity(nd);
    for c in 0..space.mesh().num_cells() {
        ev.reinit(c);
        local.iter_mut().for_each(|v| *v = 0.0);
        kernel(&ev, &mut local);
        space.cell_dofs(c, &mut dofs);
        k.add_block(&dofs, &dofs, &local);
    }
    k
}

/// `K_ij = ∫ ∇φ_i · ∇φ_j`.
pub fn assemble_poisson(space: &FESpace, rule: &QuadratureRule) -> Result<CsrMatrix> {
    require_components(space, 1, "Poisson")?;
    let n = space.nodes_per_cell();
    Ok(assemble_square(space, rule, |ev, local| {
        let cv = &ev.cv;
        for q in 0..cv.num_points() {
            let g = cv.basis_grads(q);
            let w = cv.jxw[q];
            for a in 0..n {
                for b in 0..n {
                    local[a * n + b] += w * (g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2]);
                }
            }
        }
    }))
}

/// `M_ij = ∫ φ_i φ_j`, block diagonal over components.
pub fn mass_matrix(space: &FESpace, rule: &QuadratureRule) -> Result<CsrMatrix> {
    let n = space.nodes_per_cell();
    let m = space.components();
    let nd = n * m;
    Ok(assemble_square(space, rule, |ev, local| {
        let cv = &ev.cv;
        for q in 0..cv.num_points() {
            let v = cv.basis_values(q);
            let w = cv.jxw[q];
            for a in 0..n {
                for b in 0..n {
                    let x = w * v[a] * v[b];
                    for k in 0..m {
                        local[(a * m + k) * nd + b * m + k] += x;
                    }
                }
            }
        }
    }))
}

/// Nonzero Voigt entries of the strain of `φ e_i` with physical gradient `g`.
pub(crate) fn basis_strain(dim: usize, i: usize, g: &[f64; 3]) -> [(usize, f64); 3] {
    let mut out = [(0usize, 0.0); 3];
    out[0] = (i, g[i]);
    let mut n = 1;
    for j in 0..dim {
        if j != i {
            out[n] = (voigt_index(dim, i, j), g[j]);
            n += 1;
        }
    }
    out
}

/// `K = ∫ ε(φ_i) : C : ε(φ_j)` for Hooke or orthotropic materials.
pub fn assemble_linear_elasticity(space: &FESpace, material: &MaterialParams, rule: &QuadratureRule) -> Result<CsrMatrix> {
    let dim = space.dim();
    require_components(space, dim, "elasticity")?;
    let c = elasticity_tensor(material, dim)?;
    let nv = voigt_size(dim);
    let n = space.nodes_per_cell();
    let nd = n * dim;
    let mut strains = vec![[(0usize, 0.0f64); 3]; nd];
    let mut stress = vec![0.0; nd * 6];
    let terms = dim;
    Ok(assemble_square(space, rule, |ev, local| {
        let cv = &ev.cv;
        for q in 0..cv.num_points() {
            let g = cv.basis_grads(q);
            let w = cv.jxw[q];
            for a in 0..n {
                for i in 0..dim {
                    let e = basis_strain(dim, i, &g[a]);
                    strains[a * dim + i] = e;
                    for r in 0..nv {
                        stress[(a * dim + i) * 6 + r] = e[..terms].iter().map(|&(s, v)| c[(r, s)] * v).sum();
                    }
                }
            }
            for row in 0..nd {
                let e = &strains[row];
                for col in 0..nd {
                    let s = &stress[col * 6..col * 6 + 6];
                    let mut v = 0.0;
                    for &(idx, val) in &e[..terms] {
                        v += val * s[idx];
                    }
                    local[row * nd + col] += w * v;
                }
            }
        }
    }))
}

fn check_taylor_hood(vel: &FESpace, p: &FESpace) -> Result<()> {
    let ok_family = matches!(vel.family(), Family::P2 | Family::Q2) && p.family() == vel.family().linear_partner();
    if !ok_family || !std::ptr::eq(vel.mesh(), p.mesh()) && vel.mesh().num_cells() != p.mesh().num_cells() {
        return Err(FemError::IncompatibleDiscretization(format!(
            "{}/{} is not a Taylor-Hood pair",
            vel.family(),
            p.family()
        )));
    }
    require_components(vel, vel.dim(), "velocity/displacement")?;
    require_components(p, 1, "pressure")
}

/// Velocity block (vector Laplacian or symmetric-gradient form) and
/// divergence block `B_{q,u} = sign ∫ q div u`.
fn mixed_blocks(
    vel: &FESpace,
    p: &FESpace,
    rule: &QuadratureRule,
    symmetric_gradient: bool,
    coefficient: f64,
    sign: f64,
) -> (CsrMatrix, CsrMatrix) {
    let dim = vel.dim();
    let n = vel.nodes_per_cell();
    let nd = n * dim;
    let a = assemble_square(vel, rule, |ev, local| {
        let cv = &ev.cv;
        for q in 0..cv.num_points() {
            let g = cv.basis_grads(q);
            let w = cv.jxw[q] * coefficient;
            for x in 0..n {
                for y in 0..n {
                    let dot = g[x][0] * g[y][0] + g[x][1] * g[y][1] + g[x][2] * g[y][2];
                    for i in 0..dim {
                        local[(x * dim + i) * nd + y * dim + i] += w * dot;
                        if symmetric_gradient {
                            for j in 0..dim {
                                local[(x * dim + i) * nd + y * dim + j] += w * g[x][j] * g[y][i];
                            }
                        }
                    }
                }
            }
        }
    });
    let mut b = CsrMatrix::pattern(p, vel);
    let mut ev_u = CellEvaluator::new(vel, rule);
    let mut ev_p = CellEvaluator::new(p, rule);
    let np = p.nodes_per_cell();
    let mut local = vec![0.0; np * nd];
    let (mut rows, mut cols) = (Vec::new(), Vec::new());
    for c in 0..vel.mesh().num_cells() {
        ev_u.reinit(c);
        ev_p.reinit(c);
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..ev_u.cv.num_points() {
            let g = ev_u.cv.basis_grads(q);
            let psi = ev_p.cv.basis_values(q);
            let w = sign * ev_u.cv.jxw[q];
            for r in 0..np {
                for x in 0..n {
                    for i in 0..dim {
                        local[r * nd + x * dim + i] += w * psi[r] * g[x][i];
                    }
                }
            }
        }
        p.cell_dofs(c, &mut rows);
        vel.cell_dofs(c, &mut cols);
        b.add_block(&rows, &cols, &local);
    }
    (a, b)
}

fn saddle(a: &CsrMatrix, b: &CsrMatrix, c: Option<&CsrMatrix>, nu: usize, np: usize) -> Result<LinearSystem> {
    let bt = b.transpose();
    let zero;
    let c = match c {
        Some(c) => c,
        None => {
            // explicit zero diagonal so a pressure DOF can be pinned later
            let diag: Vec<_> = (0..np).map(|i| (i, i, 0.0)).collect();
            zero = CsrMatrix::from_triplets(np, np, &diag)?;
            &zero
        }
    };
    let matrix = CsrMatrix::block(&[vec![Some(a), Some(&bt)], vec![Some(b), Some(c)]])?;
    Ok(LinearSystem {
        rhs: vec![0.0; matrix.nrows()],
        matrix,
        blocks: Some(BlockStructure {
            primary: nu,
            pressure: np,
        }),
    })
}

/// Stokes saddle system `[[A, Bᵀ], [B, 0]]` with `A = μ ∫ ∇u : ∇v` and
/// `B = −∫ q div u`.
pub fn assemble_stokes(vel: &FESpace, p: &FESpace, viscosity: f64, rule: &QuadratureRule) -> Result<LinearSystem> {
    check_taylor_hood(vel, p)?;
    if !(viscosity > 0.0) {
        return Err(FemError::InvalidArgument(format!("viscosity {viscosity} must be positive")));
    }
    let (a, b) = mixed_blocks(vel, p, rule, false, viscosity, -1.0);
    saddle(&a, &b, None, vel.num_dofs(), p.num_dofs())
}

/// Mixed incompressible elasticity `[[A, Bᵀ], [B, C]]` with
/// `A = ∫ 2μ ε(u) : ε(v)`, `B = ∫ q div u`, `C = −λ⁻¹ ∫ p q`.
pub fn assemble_mixed_incompressible(
    disp: &FESpace,
    p: &FESpace,
    material: &MaterialParams,
    rule: &QuadratureRule,
) -> Result<LinearSystem> {
    check_taylor_hood(disp, p)?;
    let dim = disp.dim();
    material.validate(dim)?;
    let lambda = material.lambda(dim);
    if !(lambda > 0.0) {
        return Err(FemError::InvalidMaterial(format!("mixed form needs λ > 0, got {lambda}")));
    }
    let (a, b) = mixed_blocks(disp, p, rule, true, material.mu(), 1.0);
    let mut c = mass_matrix(p, rule)?;
    c.scale(-1.0 / lambda);
    saddle(&a, &b, Some(&c), disp.num_dofs(), p.num_dofs())
}
