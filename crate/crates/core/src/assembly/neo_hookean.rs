//! Compressible Neo-Hookean energy
//! `W(F) = μ/2 (F:F − 3) − μ ln J + λ/2 (ln J)²`
//! with first Piola–Kirchhoff stress `P = μ (F − F⁻ᵀ) + λ ln J F⁻ᵀ`.
//! 2D problems embed F in 3×3 with `F₃₃ = 1`.

use nalgebra::{Matrix3, Vector3};

use super::dirichlet::{dirichlet_values, DirichletSpec};
use super::material::MaterialParams;
use crate::basis::{CellEvaluator, FESpace};
use crate::error::{FemError, Result};
use crate::quadrature::QuadratureRule;
use crate::solve::NewtonProblem;
use crate::sparse::CsrMatrix;

/// Energy, gradient and Hessian of the hyperelastic stored energy.
pub struct NeoHookean<'a> {
    space: &'a FESpace,
    rule: &'a QuadratureRule,
    mu: f64,
    lambda: f64,
}

struct PointState {
    f: Matrix3<f64>,
    /// F⁻ᵀ
    a: Matrix3<f64>,
    log_j: f64,
}

impl<'a> NeoHookean<'a> {
    pub fn new(space: &'a FESpace, material: &MaterialParams, rule: &'a QuadratureRule) -> Result<Self> {
        let dim = space.dim();
        if space.components() != dim {
            return Err(FemError::InvalidArgument("Neo-Hookean needs a vector space".into()));
        }
        material.validate(dim)?;
        Ok(NeoHookean {
            space,
            rule,
            mu: material.mu(),
            lambda: material.lambda(dim),
        })
    }

    pub fn space(&self) -> &FESpace {
        self.space
    }

    fn state(&self, ev: &CellEvaluator, q: usize, ue: &[f64], cell: usize) -> Result<PointState> {
        let dim = self.space.dim();
        let g = ev.cv.basis_grads(q);
        let mut f = Matrix3::identity();
        for (a, ga) in g.iter().enumerate() {
            for i in 0..dim {
                let u = ue[a * dim + i];
                for j in 0..dim {
                    f[(i, j)] += u * ga[j];
                }
            }
        }
        let det = f.determinant();
        if !(det > 0.0) {
            return Err(FemError::ElementInverted { cell, det_f: det });
        }
        let a = f.try_inverse().ok_or(FemError::ElementInverted { cell, det_f: det })?.transpose();
        Ok(PointState { f, a, log_j: det.ln() })
    }

    fn for_each_point<G>(&self, u: &[f64], mut visit: G) -> Result<()>
    where
        G: FnMut(&CellEvaluator, usize, &[usize], &PointState) -> Result<()>,
    {
        assert_eq!(u.len(), self.space.num_dofs());
        let mut ev = CellEvaluator::new(self.space, self.rule);
        let mut dofs = Vec::new();
        let mut ue = Vec::new();
        for c in 0..self.space.mesh().num_cells() {
            ev.reinit(c);
            self.space.cell_dofs(c, &mut dofs);
            ue.clear();
            ue.extend(dofs.iter().map(|&d| u[d]));
            for q in 0..ev.cv.num_points() {
                let st = self.state(&ev, q, &ue, c)?;
                visit(&ev, q, &dofs, &st)?;
            }
        }
        Ok(())
    }

    /// Stored energy `∫ W(F)`.
    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        let mut e = 0.0;
        self.for_each_point(u, |ev, q, _, st| {
            let w = 0.5 * self.mu * (st.f.norm_squared() - 3.0) - self.mu * st.log_j + 0.5 * self.lambda * st.log_j * st.log_j;
            e += ev.cv.jxw[q] * w;
            Ok(())
        })?;
        Ok(e)
    }

    /// Internal force `∫ P : ∇φ_i`.
    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let dim = self.space.dim();
        let mut r = vec![0.0; u.len()];
        self.for_each_point(u, |ev, q, dofs, st| {
            let p = self.mu * (st.f - st.a) + self.lambda * st.log_j * st.a;
            let w = ev.cv.jxw[q];
            for (a, g) in ev.cv.basis_grads(q).iter().enumerate() {
                let pg = p * Vector3::from(*g);
                for i in 0..dim {
                    r[dofs[a * dim + i]] += w * pg[i];
                }
            }
            Ok(())
        })?;
        Ok(r)
    }

    /// Consistent tangent `∫ ∇φ_i : ∂P/∂F : ∇φ_j`.
    pub fn hessian(&self, u: &[f64]) -> Result<CsrMatrix> {
        let dim = self.space.dim();
        let n = self.space.nodes_per_cell();
        let nd = n * dim;
        let mut k = CsrMatrix::pattern(self.space, self.space);
        let mut local = vec![0.0; nd * nd];
        let mut ag = vec![Vector3::zeros(); n];
        let mut cell_dofs: Vec<usize> = Vec::new();
        let flush = |k: &mut CsrMatrix, dofs: &[usize], local: &mut [f64]| {
            if !dofs.is_empty() {
                k.add_block(dofs, dofs, local);
            }
            local.iter_mut().for_each(|v| *v = 0.0);
        };
        self.for_each_point(u, |ev, q, dofs, st| {
            if q == 0 {
                // new cell: scatter the previous one
                flush(&mut k, &cell_dofs, &mut local);
                cell_dofs.clear();
                cell_dofs.extend_from_slice(dofs);
            }
            let g = ev.cv.basis_grads(q);
            let w = ev.cv.jxw[q];
            let c1 = w * self.mu;
            let c2 = w * (self.mu - self.lambda * st.log_j);
            let c3 = w * self.lambda;
            for (a, ga) in g.iter().enumerate() {
                ag[a] = st.a * Vector3::from(*ga);
            }
            for a in 0..n {
                for b in 0..n {
                    let gg = g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2];
                    for i in 0..dim {
                        let row = (a * dim + i) * nd + b * dim;
                        local[row + i] += c1 * gg;
                        for kk in 0..dim {
                            local[row + kk] += c2 * ag[b][i] * ag[a][kk] + c3 * ag[a][i] * ag[b][kk];
                        }
                    }
                }
            }
            Ok(())
        })?;
        flush(&mut k, &cell_dofs, &mut local);
        Ok(k)
    }
}

/// Neo-Hookean boundary-value problem with loads and Dirichlet data scaled by
/// the load fraction.
pub struct NeoHookeanProblem<'a> {
    pub model: NeoHookean<'a>,
    /// External load vector at full load (body force plus tractions).
    pub external: Vec<f64>,
    pub dirichlet: Vec<DirichletSpec>,
}

impl NewtonProblem for NeoHookeanProblem<'_> {
    fn num_dofs(&self) -> usize {
        self.model.space.num_dofs()
    }

    fn energy(&self, u: &[f64], s: f64) -> Result<f64> {
        let ext: f64 = self.external.iter().zip(u).map(|(f, x)| f * x).sum();
        Ok(self.model.energy(u)? - s * ext)
    }

    fn residual(&self, u: &[f64], s: f64) -> Result<Vec<f64>> {
        let mut r = self.model.residual(u)?;
        r.iter_mut().zip(&self.external).for_each(|(r, f)| *r -= s * f);
        Ok(r)
    }

    fn hessian(&self, u: &[f64], _s: f64) -> Result<CsrMatrix> {
        self.model.hessian(u)
    }

    fn dirichlet(&self, s: f64) -> Vec<(usize, f64)> {
        dirichlet_values(self.model.space, &self.dirichlet, s).expect("Dirichlet specs validated at construction")
    }
}

impl<'a> NeoHookeanProblem<'a> {
    pub fn new(model: NeoHookean<'a>, external: Vec<f64>, dirichlet: Vec<DirichletSpec>) -> Result<Self> {
        if external.len() != model.space.num_dofs() {
            return Err(FemError::InvalidArgument("external load length mismatch".into()));
        }
        dirichlet_values(model.space, &dirichlet, 1.0)?;
        Ok(NeoHookeanProblem {
            model,
            external,
            dirichlet,
        })
    }
}
