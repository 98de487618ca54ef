//! Linear/multilinear isoparametric map from the reference cell.
//!
//! 2D cells are embedded in 3D: points carry `z = 0` and the Jacobian gets a
//! unit `(2, 2)` entry so determinants and inverses work uniformly.

use nalgebra::Matrix3;

use crate::mesh::{CellKind, Point};

/// Values and reference gradients of the vertex (P1/Q1) shape functions.
pub fn vertex_shape(kind: CellKind, xi: Point, values: &mut [f64], grads: &mut [[f64; 3]]) {
    let [x, y, z] = xi;
    match kind {
        CellKind::Tri => {
            values[..3].copy_from_slice(&[1.0 - x - y, x, y]);
            grads[..3].copy_from_slice(&[[-1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        }
        CellKind::Tet => {
            values[..4].copy_from_slice(&[1.0 - x - y - z, x, y, z]);
            grads[..4].copy_from_slice(&[
                [-1.0, -1.0, -1.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
            ]);
        }
        CellKind::Quad | CellKind::Hex => {
            let refs = kind.reference_vertices();
            let three_d = kind == CellKind::Hex;
            for (i, r) in refs.iter().enumerate() {
                let fx = if r[0] > 0.5 { x } else { 1.0 - x };
                let fy = if r[1] > 0.5 { y } else { 1.0 - y };
                let fz = if !three_d {
                    1.0
                } else if r[2] > 0.5 {
                    z
                } else {
                    1.0 - z
                };
                let sx = if r[0] > 0.5 { 1.0 } else { -1.0 };
                let sy = if r[1] > 0.5 { 1.0 } else { -1.0 };
                let sz = if r[2] > 0.5 { 1.0 } else { -1.0 };
                values[i] = fx * fy * fz;
                grads[i] = [
                    sx * fy * fz,
                    fx * sy * fz,
                    if three_d { fx * fy * sz } else { 0.0 },
                ];
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MapEval {
    pub point: Point,
    /// `jacobian[(i, j)] = d x_i / d xi_j`.
    pub jacobian: Matrix3<f64>,
    pub det: f64,
}

/// Evaluates the geometric map of a cell with the given vertex coordinates.
pub fn geometric_map(kind: CellKind, vertices: &[Point], xi: Point) -> MapEval {
    let mut values = [0.0; 8];
    let mut grads = [[0.0; 3]; 8];
    vertex_shape(kind, xi, &mut values, &mut grads);
    let mut point = [0.0; 3];
    let mut jac = Matrix3::zeros();
    for (a, v) in vertices.iter().enumerate() {
        for i in 0..3 {
            point[i] += values[a] * v[i];
            for j in 0..3 {
                jac[(i, j)] += v[i] * grads[a][j];
            }
        }
    }
    if kind.dim() == 2 {
        jac[(2, 2)] = 1.0;
        for k in 0..2 {
            jac[(2, k)] = 0.0;
            jac[(k, 2)] = 0.0;
        }
    }
    let det = jac.determinant();
    MapEval {
        point,
        jacobian: jac,
        det,
    }
}

/// Signed measure of a cell. Exact: the multilinear Jacobian determinant has
/// degree at most 2 per axis, so two Gauss points per axis suffice.
pub fn cell_measure(kind: CellKind, vertices: &[Point]) -> f64 {
    match kind {
        CellKind::Tri | CellKind::Tet => {
            geometric_map(kind, vertices, [0.0; 3]).det * kind.reference_measure()
        }
        CellKind::Quad | CellKind::Hex => {
            let g = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
            let zs: &[f64] = if kind == CellKind::Hex { &g } else { &[0.0] };
            let w = if kind == CellKind::Hex { 0.125 } else { 0.25 };
            let mut sum = 0.0;
            for &x in &g {
                for &y in &g {
                    for &z in zs {
                        sum += w * geometric_map(kind, vertices, [x, y, z]).det;
                    }
                }
            }
            sum
        }
    }
}

/// Inverts the geometric map by Newton iteration. Returns the reference
/// coordinates (possibly outside the reference cell) or `None` when the
/// iteration fails to converge.
pub fn inverse_map(kind: CellKind, vertices: &[Point], x: Point, tol: f64) -> Option<Point> {
    let mut xi = match kind {
        CellKind::Tri => [1.0 / 3.0, 1.0 / 3.0, 0.0],
        CellKind::Tet => [0.25; 3],
        CellKind::Quad => [0.5, 0.5, 0.0],
        CellKind::Hex => [0.5; 3],
    };
    let scale = vertices
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |m, c| m.max(c.abs()))
        .max(1.0);
    for _ in 0..50 {
        let m = geometric_map(kind, vertices, xi);
        let r = nalgebra::Vector3::new(x[0] - m.point[0], x[1] - m.point[1], x[2] - m.point[2]);
        let inv = m.jacobian.try_inverse()?;
        let d = inv * r;
        let dim = kind.dim();
        for k in 0..dim {
            xi[k] += d[k];
        }
        if d.iter().take(dim).map(|v| v.abs()).fold(0.0, f64::max) <= tol
            && r.iter().take(dim).map(|v| v.abs()).fold(0.0, f64::max) <= tol * scale
        {
            return Some(xi);
        }
    }
    None
}

/// Whether reference coordinates lie in the closed reference cell (with tolerance).
pub fn in_reference_cell(kind: CellKind, xi: Point, tol: f64) -> bool {
    let d = kind.dim();
    match kind {
        CellKind::Tri | CellKind::Tet => {
            xi[..d].iter().all(|&c| c >= -tol) && xi[..d].iter().sum::<f64>() <= 1.0 + tol
        }
        CellKind::Quad | CellKind::Hex => xi[..d].iter().all(|&c| c >= -tol && c <= 1.0 + tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_tet_has_unit_det() {
        let verts = CellKind::Tet.reference_vertices();
        let m = geometric_map(CellKind::Tet, verts, [0.2, 0.3, 0.1]);
        assert!((m.det - 1.0).abs() < 1e-15);
        assert!((m.point[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn scaled_cube_det_is_cubed() {
        let s = 2.5;
        let verts: Vec<Point> = CellKind::Hex
            .reference_vertices()
            .iter()
            .map(|v| v.map(|c| c * s))
            .collect();
        for xi in [[0.0; 3], [0.3, 0.9, 0.1], [1.0; 3]] {
            let m = geometric_map(CellKind::Hex, &verts, xi);
            assert!((m.det - s * s * s).abs() < 1e-12);
        }
    }

    #[test]
    fn sheared_hex_has_unit_det() {
        let verts: Vec<Point> = CellKind::Hex
            .reference_vertices()
            .iter()
            .map(|v| [v[0] + 0.3 * v[1], v[1], v[2]])
            .collect();
        for i in 0..=4 {
            for j in 0..=4 {
                for k in 0..=4 {
                    let xi = [i as f64 / 4.0, j as f64 / 4.0, k as f64 / 4.0];
                    let m = geometric_map(CellKind::Hex, &verts, xi);
                    assert!((m.det - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn quad_det_in_plane() {
        let verts = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [2.0, 3.0, 0.0], [0.0, 3.0, 0.0]];
        let m = geometric_map(CellKind::Quad, &verts, [0.5, 0.5, 0.0]);
        assert!((m.det - 6.0).abs() < 1e-14);
        assert!((cell_measure(CellKind::Quad, &verts) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn hex_inverse_round_trip() {
        let verts: Vec<Point> = CellKind::Hex
            .reference_vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let w = 0.07 * (i as f64).sin();
                [v[0] + w, v[1] - 0.5 * w, v[2] + 0.3 * w]
            })
            .collect();
        let xi = [0.31, 0.77, 0.45];
        let x = geometric_map(CellKind::Hex, &verts, xi).point;
        let back = inverse_map(CellKind::Hex, &verts, x, 1e-13).unwrap();
        for k in 0..3 {
            assert!((back[k] - xi[k]).abs() < 1e-10);
        }
    }
}
