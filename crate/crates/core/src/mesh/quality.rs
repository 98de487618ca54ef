use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::geometry::geometric_map;
use crate::error::{FemError, Result};

use super::{CellKind, Mesh, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub num_vertices: usize,
    pub num_cells: usize,
    pub avg_edge_length: f64,
    pub min_edge_length: f64,
    pub max_edge_length: f64,
    pub max_aspect_ratio: f64,
    pub mean_aspect_ratio: f64,
}

/// Covariance aspect ratio `sqrt(lambda_max / lambda_min)` of the element's
/// vertex positions, in the dimension the points span (z ignored when every
/// point has z = 0). Degenerate elements report `f64::INFINITY`.
pub fn element_aspect_ratio(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return f64::INFINITY;
    }
    let dim = if vertices.iter().all(|v| v[2] == 0.0) { 2 } else { 3 };
    let mut mean = [0.0; 3];
    for v in vertices {
        for k in 0..dim {
            mean[k] += v[k] / n as f64;
        }
    }
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    for v in vertices {
        for i in 0..dim {
            for j in 0..dim {
                cov[(i, j)] += (v[i] - mean[i]) * (v[j] - mean[j]) / n as f64;
            }
        }
    }
    let eig = SymmetricEigen::new(cov);
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(max > 0.0) || min < 1e-14 * max {
        return f64::INFINITY;
    }
    (max / min).sqrt().max(1.0)
}

/// Reference sample points `i / (n - 1)` per axis (the centre when n = 1).
fn samples(n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5];
    }
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Cells whose trilinear Jacobian determinant is negative at any of the
/// `samples_per_axis^3` uniformly spaced reference points.
pub fn detect_flipped_hex(mesh: &Mesh, samples_per_axis: usize) -> Result<Vec<usize>> {
    let kind = mesh.kind();
    if !matches!(kind, CellKind::Hex | CellKind::Quad) {
        return Err(FemError::InvalidArgument(
            "flipped-element detection needs a hex (or quad) mesh".into(),
        ));
    }
    let s = samples(samples_per_axis);
    let zs = if kind == CellKind::Hex { s.clone() } else { vec![0.0] };
    let mut flipped = Vec::new();
    for c in 0..mesh.num_cells() {
        let verts = mesh.cell_vertices(c);
        if is_flipped(kind, &verts, &s, &zs) {
            flipped.push(c);
        }
    }
    Ok(flipped)
}

pub(crate) fn is_flipped(kind: CellKind, verts: &[Point], s: &[f64], zs: &[f64]) -> bool {
    for &z in zs {
        for &y in s {
            for &x in s {
                if geometric_map(kind, verts, [x, y, z]).det < 0.0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Whether a single hex is flipped under `samples_per_axis^3` sampling.
pub fn hex_is_flipped(verts: &[Point], samples_per_axis: usize) -> bool {
    let s = samples(samples_per_axis);
    is_flipped(CellKind::Hex, verts, &s, &s)
}

pub fn mesh_stats(mesh: &Mesh) -> MeshStats {
    let v = mesh.vertices();
    let edges = mesh.unique_edges();
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for [a, b] in &edges {
        let l = (0..3).map(|k| (v[*a][k] - v[*b][k]).powi(2)).sum::<f64>().sqrt();
        sum += l;
        min = min.min(l);
        max = max.max(l);
    }
    let mut ar_max = 0.0f64;
    let mut ar_sum = 0.0;
    for c in 0..mesh.num_cells() {
        let ar = element_aspect_ratio(&mesh.cell_vertices(c));
        ar_max = ar_max.max(ar);
        ar_sum += ar;
    }
    MeshStats {
        num_vertices: mesh.num_vertices(),
        num_cells: mesh.num_cells(),
        avg_edge_length: sum / edges.len() as f64,
        min_edge_length: min,
        max_edge_length: max,
        max_aspect_ratio: ar_max,
        mean_aspect_ratio: ar_sum / mesh.num_cells() as f64,
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::mesh::generate_box_grid;

    fn box_corners(a: f64, b: f64, c: f64) -> Vec<Point> {
        CellKind::Hex
            .reference_vertices()
            .iter()
            .map(|v| [v[0] * a, v[1] * b, v[2] * c])
            .collect()
    }

    #[test]
    fn cube_aspect_ratio_is_one() {
        assert!((element_aspect_ratio(&box_corners(1.0, 1.0, 1.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stretched_box_aspect_ratio() {
        // covariance diag (1/4, 1/4, 1): eigenvalue ratio 4
        assert!((element_aspect_ratio(&box_corners(1.0, 1.0, 2.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn regular_tet_aspect_ratio_is_one() {
        let t = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        assert!((element_aspect_ratio(&t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_element_is_infinite() {
        let t = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [2.0, 0.0, 1.0], [3.0, 0.0, 1.0]];
        assert!(element_aspect_ratio(&t).is_infinite());
    }

    #[test]
    fn stats_single_hex() {
        let m = generate_box_grid([0.0; 3], [1.0; 3], [1, 1, 1], CellKind::Hex).unwrap();
        let s = mesh_stats(&m);
        assert!((s.avg_edge_length - 1.0).abs() < 1e-15);
        assert!((s.min_edge_length - 1.0).abs() < 1e-15);
        assert!((s.max_aspect_ratio - 1.0).abs() < 1e-12);

        let m = generate_box_grid([0.0; 3], [1.0, 1.0, 2.0], [1, 1, 1], CellKind::Hex).unwrap();
        assert!((mesh_stats(&m).avg_edge_length - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn stats_six_tet_cube() {
        let m = generate_box_grid([0.0; 3], [1.0; 3], [1, 1, 1], CellKind::Tet).unwrap();
        let s = mesh_stats(&m);
        assert!((s.min_edge_length - 1.0).abs() < 1e-15);
        assert!((s.max_edge_length - 3f64.sqrt()).abs() < 1e-15);
        assert!(s.min_edge_length <= s.avg_edge_length);
    }

    #[test]
    fn reflected_hex_is_flipped() {
        let m = generate_box_grid([0.0; 3], [1.0; 3], [1, 1, 1], CellKind::Hex).unwrap();
        assert!(detect_flipped_hex(&m, 10).unwrap().is_empty());
        let c = m.cell(0);
        let swapped = vec![c[4], c[5], c[6], c[7], c[0], c[1], c[2], c[3]];
        let f = Mesh::new(CellKind::Hex, m.vertices().to_vec(), swapped).unwrap();
        assert_eq!(detect_flipped_hex(&f, 10).unwrap(), vec![0]);
    }

    #[test]
    fn twisted_hex_agrees_with_dense_sampling() {
        for deg in [30.0f64, 60.0, 90.0, 120.0, 150.0] {
            let a = deg.to_radians();
            let verts: Vec<Point> = CellKind::Hex
                .reference_vertices()
                .iter()
                .map(|v| {
                    if v[2] > 0.5 {
                        let (x, y) = (v[0] - 0.5, v[1] - 0.5);
                        [0.5 + a.cos() * x - a.sin() * y, 0.5 + a.sin() * x + a.cos() * y, 1.0]
                    } else {
                        *v
                    }
                })
                .collect();
            assert_eq!(hex_is_flipped(&verts, 10), hex_is_flipped(&verts, 50), "twist {deg}");
        }
    }

    #[test]
    fn generated_grids_are_clean() {
        let m = generate_box_grid([0.0; 3], [1.0, 2.0, 0.5], [3, 2, 4], CellKind::Hex).unwrap();
        assert!(detect_flipped_hex(&m, 10).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn aspect_ratio_rigid_and_scale_invariant(
            pts in proptest::collection::vec(proptest::array::uniform3(-1.0f64..1.0), 4..9),
            angles in proptest::array::uniform3(0.0f64..6.28),
            shift in proptest::array::uniform3(-5.0f64..5.0),
            scale in 0.1f64..10.0,
        ) {
            let ar = element_aspect_ratio(&pts);
            prop_assume!(ar.is_finite() && ar < 100.0);
            let rot = nalgebra::Rotation3::from_euler_angles(angles[0], angles[1], angles[2]);
            let moved: Vec<Point> = pts
                .iter()
                .map(|p| {
                    let q = rot * nalgebra::Vector3::new(p[0], p[1], p[2]) * scale;
                    [q[0] + shift[0], q[1] + shift[1], q[2] + shift[2]]
                })
                .collect();
            let ar2 = element_aspect_ratio(&moved);
            prop_assert!((ar - ar2).abs() <= 1e-10 * ar);
        }
    }
}
