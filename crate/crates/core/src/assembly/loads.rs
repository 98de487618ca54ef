use crate::basis::{CellEvaluator, FESpace};
use crate::error::Result;
use crate::mesh::Point;
use crate::quadrature::{default_degree, QuadratureRule};

/// Load vector `∫ b · φ_i`; `b` returns one value per component.
pub fn assemble_rhs<F: Fn(Point) -> Vec<f64>>(space: &FESpace, rule: &QuadratureRule, b: F) -> Vec<f64> {
    let m = space.components();
    let n = space.nodes_per_cell();
    let mut out = vec![0.0; space.num_dofs()];
    let mut ev = CellEvaluator::new(space, rule);
    let mut dofs = Vec::new();
    for c in 0..space.mesh().num_cells() {
        ev.reinit(c);
        space.cell_dofs(c, &mut dofs);
        for q in 0..ev.cv.num_points() {
            let f = b(ev.cv.points[q]);
            let w = ev.cv.jxw[q];
            let phi = ev.cv.basis_values(q);
            for a in 0..n {
                for k in 0..m {
                    out[dofs[a * m + k]] += w * phi[a] * f[k];
                }
            }
        }
    }
    out
}

/// Surface load `∫_Γ f · φ_i` over boundary facets tagged `tag`.
pub fn assemble_neumann<F: Fn(Point) -> Vec<f64>>(space: &FESpace, tag: i32, f: F) -> Result<Vec<f64>> {
    space.boundary_nodes(tag)?;
    let m = space.components();
    let degree = default_degree(space.family().degree());
    let mut out = vec![0.0; space.num_dofs()];
    let mut dofs = Vec::new();
    for facet in space.mesh().boundary_facets().iter().filter(|b| b.tag == tag) {
        let fv = space.facet_values(facet.cell, facet.facet, degree)?;
        space.cell_dofs(facet.cell, &mut dofs);
        for q in 0..fv.jxw.len() {
            let t = f(fv.points[q]);
            for (a, phi) in fv.values[q].iter().enumerate() {
                for k in 0..m {
                    out[dofs[a * m + k]] += fv.jxw[q] * phi * t[k];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::assembly::default_rule;
    use crate::basis::{build_space, spline_space, Discretization, Family};
    use crate::error::FemError;
    use crate::mesh::{generate_box_grid, CellKind};

    #[test]
    fn zero_and_unit_body_force() {
        let mesh = Arc::new(generate_box_grid([0.0; 3], [2.0, 1.0, 1.0], [2, 2, 2], CellKind::Tet).unwrap());
        let s = build_space(mesh, Discretization::new(Family::P1), 1).unwrap();
        let rule = default_rule(&s).unwrap();
        assert!(assemble_rhs(&s, &rule, |_| vec![0.0]).iter().all(|&v| v == 0.0));
        let total: f64 = assemble_rhs(&s, &rule, |_| vec![1.0]).iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn constant_traction_sums_to_force() {
        let mut mesh = generate_box_grid([0.0; 3], [1.0, 2.0, 3.0], [2, 2, 2], CellKind::Hex).unwrap();
        mesh.tag_boundary(|c| Some(if (c[0] - 1.0).abs() < 1e-9 { 7 } else { 1 }));
        let mesh = Arc::new(mesh);
        for s in [
            build_space(mesh.clone(), Discretization::new(Family::Q2), 3).unwrap(),
            build_space(mesh.clone(), Discretization::new(Family::Ser2), 3).unwrap(),
            spline_space(mesh.clone(), 3).unwrap(),
        ] {
            let f = assemble_neumann(&s, 7, |_| vec![0.5, -1.0, 2.0]).unwrap();
            for k in 0..3 {
                let sum: f64 = f.iter().skip(k).step_by(3).sum();
                assert!((sum - [0.5, -1.0, 2.0][k] * 6.0).abs() < 1e-12);
            }
            assert!(matches!(assemble_neumann(&s, 99, |_| vec![0.0; 3]), Err(FemError::UnknownTag(99))));
        }
    }

    #[test]
    fn traction_moment_on_tri_edge() {
        // linear traction t = y on the x = 1 edge of the unit square: ∫ y dy = 1/2
        let mut mesh = generate_box_grid([0.0; 3], [1.0, 1.0, 1.0], [3, 3, 1], CellKind::Tri).unwrap();
        mesh.tag_boundary(|c| Some(if (c[0] - 1.0).abs() < 1e-9 { 2 } else { 1 }));
        let s = build_space(Arc::new(mesh), Discretization::new(Family::P2), 1).unwrap();
        let f = assemble_neumann(&s, 2, |p| vec![p[1]]).unwrap();
        assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-14);
    }
}
