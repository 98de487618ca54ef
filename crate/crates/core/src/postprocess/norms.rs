use serde::{Deserialize, Serialize};

use crate::basis::{CellEvaluator, FESpace};
use crate::error::{FemError, Result};
use crate::problems::ManufacturedSolution;
use crate::quadrature::QuadratureRule;

/// Error of a discrete field against an exact solution. Pointwise errors
/// use the Euclidean norm over components (Frobenius for gradients); the
/// L∞ entries are maxima over quadrature points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub l2: f64,
    pub h1: f64,
    pub h1_semi: f64,
    pub linf: f64,
    pub linf_grad: f64,
    pub l8: f64,
}

pub fn error_norms(
    space: &FESpace,
    coeffs: &[f64],
    exact: &ManufacturedSolution,
    rule: &QuadratureRule,
) -> Result<ErrorReport> {
    let m = space.components();
    if exact.components != m || coeffs.len() != space.num_dofs() {
        return Err(FemError::InvalidArgument(format!(
            "exact solution has {} components, space {m}; {} coefficients for {} DOFs",
            exact.components,
            coeffs.len(),
            space.num_dofs()
        )));
    }
    let n = space.nodes_per_cell();
    let mut ev = CellEvaluator::new(space, rule);
    let (mut l2, mut semi, mut l8) = (0.0, 0.0, 0.0);
    let (mut linf, mut linf_grad) = (0.0f64, 0.0f64);
    let mut uh = vec![0.0; m];
    let mut gh = vec![[0.0; 3]; m];
    for c in 0..space.mesh().num_cells() {
        ev.reinit(c);
        let nodes = space.cell_nodes(c);
        for q in 0..ev.cv.num_points() {
            uh.iter_mut().for_each(|v| *v = 0.0);
            gh.iter_mut().for_each(|v| *v = [0.0; 3]);
            let phi = ev.cv.basis_values(q);
            let g = ev.cv.basis_grads(q);
            for a in 0..n {
                for k in 0..m {
                    let u = coeffs[nodes[a] * m + k];
                    uh[k] += u * phi[a];
                    for d in 0..3 {
                        gh[k][d] += u * g[a][d];
                    }
                }
            }
            let x = ev.cv.points[q];
            let ue = exact.value(x);
            let ge = exact.gradient(x);
            let mut e2 = 0.0;
            let mut g2 = 0.0;
            for k in 0..m {
                e2 += (uh[k] - ue[k]).powi(2);
                for d in 0..space.dim() {
                    g2 += (gh[k][d] - ge[k][d]).powi(2);
                }
            }
            let w = ev.cv.jxw[q];
            l2 += w * e2;
            semi += w * g2;
            l8 += w * e2.powi(4);
            linf = linf.max(e2.sqrt());
            linf_grad = linf_grad.max(g2.sqrt());
        }
    }
    Ok(ErrorReport {
        l2: l2.sqrt(),
        h1: (l2 + semi).sqrt(),
        h1_semi: semi.sqrt(),
        linf,
        linf_grad,
        l8: l8.powf(0.125),
    })
}

fn field_at(ev: &CellEvaluator, nodes: &[usize], coeffs: &[f64], m: usize, q: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (a, phi) in ev.cv.basis_values(q).iter().enumerate() {
        for k in 0..m {
            out[k] += coeffs[nodes[a] * m + k] * phi;
        }
    }
}

/// `(‖a − b‖, ‖b‖)` in L2 for two fields on spaces over the same mesh.
pub fn l2_difference(
    space_a: &FESpace,
    a: &[f64],
    space_b: &FESpace,
    b: &[f64],
    rule: &QuadratureRule,
) -> Result<(f64, f64)> {
    let m = space_a.components();
    if space_b.components() != m
        || space_a.mesh().num_cells() != space_b.mesh().num_cells()
        || a.len() != space_a.num_dofs()
        || b.len() != space_b.num_dofs()
    {
        return Err(FemError::InvalidArgument("fields live on incompatible spaces".into()));
    }
    let mut ea = CellEvaluator::new(space_a, rule);
    let mut eb = CellEvaluator::new(space_b, rule);
    let (mut va, mut vb) = (vec![0.0; m], vec![0.0; m]);
    let (mut diff, mut norm) = (0.0, 0.0);
    for c in 0..space_a.mesh().num_cells() {
        ea.reinit(c);
        eb.reinit(c);
        let (na, nb) = (space_a.cell_nodes(c), space_b.cell_nodes(c));
        for q in 0..ea.cv.num_points() {
            field_at(&ea, na, a, m, q, &mut va);
            field_at(&eb, nb, b, m, q, &mut vb);
            let w = ea.cv.jxw[q];
            diff += w * va.iter().zip(&vb).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
            norm += w * vb.iter().map(|y| y * y).sum::<f64>();
        }
    }
    Ok((diff.sqrt(), norm.sqrt()))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::assembly::default_rule;
    use crate::basis::{build_space, Discretization, Family};
    use crate::mesh::{generate_box_grid, CellKind};
    use crate::quadrature::{gauss_rule, Domain};

    fn affine() -> ManufacturedSolution {
        ManufacturedSolution::affine(3, vec![0.3], vec![[1.0, -0.5, 2.0]]).unwrap()
    }

    #[test]
    fn interpolant_of_linear_is_exact() {
        let mesh = Arc::new(generate_box_grid([0.0; 3], [1.0; 3], [2, 2, 2], CellKind::Tet).unwrap());
        let s = build_space(mesh, Discretization::new(Family::P1), 1).unwrap();
        let ex = affine();
        let u = s.interpolate(|p| ex.value(p));
        let r = error_norms(&s, &u, &ex, &default_rule(&s).unwrap()).unwrap();
        for v in [r.l2, r.h1, r.h1_semi, r.linf, r.linf_grad, r.l8] {
            assert!(v <= 1e-12);
        }
    }

    #[test]
    fn constant_shift() {
        let mesh = Arc::new(generate_box_grid([0.0; 3], [2.0, 1.0, 1.0], [2, 1, 1], CellKind::Hex).unwrap());
        let s = build_space(mesh, Discretization::new(Family::Q2), 1).unwrap();
        let ex = affine();
        let c = 0.25;
        let u: Vec<f64> = s.interpolate(|p| ex.value(p)).iter().map(|v| v + c).collect();
        let r = error_norms(&s, &u, &ex, &default_rule(&s).unwrap()).unwrap();
        assert!((r.l2 - c * 2f64.sqrt()).abs() < 1e-13);
        assert!(r.h1_semi < 1e-12);
        assert!((r.linf - c).abs() < 1e-13);
        assert!((r.l8 - c * 2f64.powf(0.125)).abs() < 1e-13);
    }

    #[test]
    fn bilinear_interpolation_error_of_square() {
        // one Q1 cell: interpolant of x² is x, error x − x², ∫(x − x²)² = 1/30
        let mesh = Arc::new(generate_box_grid([0.0; 3], [1.0, 1.0, 0.0], [1, 1, 1], CellKind::Quad).unwrap());
        let s = build_space(mesh, Discretization::new(Family::Q1), 1).unwrap();
        let ex = ManufacturedSolution::new(
            "x2",
            1,
            2,
            Arc::new(|p| vec![p[0] * p[0]]),
            Arc::new(|p| vec![[2.0 * p[0], 0.0, 0.0]]),
            Arc::new(|_| vec![[[2.0, 0.0, 0.0], [0.0; 3], [0.0; 3]]]),
        )
        .unwrap();
        let u = s.interpolate(|p| ex.value(p));
        let rule = gauss_rule(Domain::Quad, 8).unwrap();
        let r = error_norms(&s, &u, &ex, &rule).unwrap();
        assert!((r.l2 - (1.0f64 / 30.0).sqrt()).abs() < 1e-14);
        // ∫(1 − 2x)² = 1/3
        assert!((r.h1_semi - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((r.h1 * r.h1 - r.l2 * r.l2 - r.h1_semi * r.h1_semi).abs() <= 1e-10 * r.h1 * r.h1);
    }

    #[test]
    fn invariant_under_cell_reordering() {
        let mesh = generate_box_grid([0.0; 3], [1.0; 3], [2, 2, 2], CellKind::Hex).unwrap();
        let mut order: Vec<usize> = (0..mesh.num_cells()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let ex = crate::problems::franke_solution().unwrap();
        let mut reports = Vec::new();
        for m in [mesh.clone(), mesh.reorder_cells(&order).unwrap()] {
            let s = build_space(Arc::new(m), Discretization::new(Family::Ser2), 1).unwrap();
            let u = s.interpolate(|p| ex.value(p));
            reports.push(error_norms(&s, &u, &ex, &default_rule(&s).unwrap()).unwrap());
        }
        let (a, b) = (reports[0], reports[1]);
        for (x, y) in [(a.l2, b.l2), (a.h1, b.h1), (a.l8, b.l8), (a.linf, b.linf)] {
            assert!((x - y).abs() <= 1e-12 * x);
        }
    }

    #[test]
    fn difference_across_families() {
        let mesh = Arc::new(generate_box_grid([0.0; 3], [1.0; 3], [2, 2, 2], CellKind::Tet).unwrap());
        let p1 = build_space(mesh.clone(), Discretization::new(Family::P1), 1).unwrap();
        let p2 = build_space(mesh, Discretization::new(Family::P2), 1).unwrap();
        let ex = affine();
        let a = p1.interpolate(|p| ex.value(p));
        let b = p2.interpolate(|p| ex.value(p));
        let rule = default_rule(&p2).unwrap();
        let (d, _) = l2_difference(&p1, &a, &p2, &b, &rule).unwrap();
        assert!(d < 1e-13);
        let shifted: Vec<f64> = a.iter().map(|v| v + 0.5).collect();
        let (d, _) = l2_difference(&p1, &shifted, &p2, &b, &rule).unwrap();
        assert!((d - 0.5).abs() < 1e-13);
        assert!(l2_difference(&p1, &a, &p2, &a, &rule).is_err());
    }
}
