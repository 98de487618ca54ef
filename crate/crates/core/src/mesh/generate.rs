use crate::error::{FemError, Result};

use super::{hex_to_tet_split, CellKind, Lattice, Mesh, Point, TetSplit};

/// Structured axis-aligned grid on `[lower, upper]`.
///
/// Boundary tags: 1 x-min, 2 x-max, 3 y-min, 4 y-max, 5 z-min, 6 z-max.
/// 2D kinds ignore the z components of the box and of `resolution`.
pub fn generate_box_grid(
    lower: Point,
    upper: Point,
    resolution: [usize; 3],
    kind: CellKind,
) -> Result<Mesh> {
    let dim = kind.dim();
    for k in 0..dim {
        if !(upper[k] > lower[k]) {
            return Err(FemError::Degenerate(format!(
                "box has zero extent along axis {k}"
            )));
        }
        if resolution[k] == 0 {
            return Err(FemError::InvalidArgument(format!(
                "resolution along axis {k} must be at least 1"
            )));
        }
    }
    let mesh = match kind {
        CellKind::Quad | CellKind::Hex => tensor_grid(lower, upper, resolution, dim)?,
        CellKind::Tet => {
            let hex = tensor_grid(lower, upper, resolution, 3)?;
            hex_to_tet_split(&hex, TetSplit::Six)?
        }
        CellKind::Tri => {
            let quad = tensor_grid(lower, upper, resolution, 2)?;
            split_quads(&quad)?
        }
    };
    let mut mesh = mesh;
    tag_box_faces(&mut mesh, lower, upper);
    Ok(mesh)
}

fn tensor_grid(lower: Point, upper: Point, res: [usize; 3], dim: usize) -> Result<Mesh> {
    let n = [res[0], res[1], if dim == 3 { res[2] } else { 0 }];
    let (nx, ny) = (n[0] + 1, n[1] + 1);
    let nz = n[2] + 1;
    let coord = |k: usize, i: usize| lower[k] + (upper[k] - lower[k]) * i as f64 / n[k] as f64;
    let mut vertices = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let z = if dim == 3 { coord(2, k) } else { 0.0 };
                vertices.push([coord(0, i), coord(1, j), z]);
            }
        }
    }
    let vid = |i: usize, j: usize, k: usize| i + nx * (j + ny * k);
    let mut cells = Vec::new();
    let mut cell_index = Vec::new();
    let kind = if dim == 3 { CellKind::Hex } else { CellKind::Quad };
    let kmax = if dim == 3 { n[2] } else { 1 };
    for k in 0..kmax {
        for j in 0..n[1] {
            for i in 0..n[0] {
                for r in kind.reference_vertices() {
                    cells.push(vid(i + r[0] as usize, j + r[1] as usize, k + r[2] as usize));
                }
                cell_index.push([i, j, k]);
            }
        }
    }
    let dims = [n[0], n[1], if dim == 3 { n[2] } else { 1 }];
    Mesh::new(kind, vertices, cells)?.with_lattice(Lattice { dims, cell_index })
}

/// Splits every quad along its 0-2 diagonal.
pub(crate) fn split_quads(mesh: &Mesh) -> Result<Mesh> {
    let mut cells = Vec::with_capacity(mesh.num_cells() * 6);
    for q in mesh.cells() {
        cells.extend_from_slice(&[q[0], q[1], q[2], q[0], q[2], q[3]]);
    }
    let mut tri = Mesh::new(CellKind::Tri, mesh.vertices().to_vec(), cells)?;
    tri.copy_tags_from(mesh);
    Ok(tri)
}

fn tag_box_faces(mesh: &mut Mesh, lower: Point, upper: Point) {
    let dim = mesh.dim();
    let diag: f64 = (0..dim).map(|k| (upper[k] - lower[k]).powi(2)).sum::<f64>().sqrt();
    let tol = 1e-8 * diag;
    mesh.tag_boundary(|c| {
        for k in 0..dim {
            if (c[k] - lower[k]).abs() <= tol {
                return Some(2 * k as i32 + 1);
            }
            if (c[k] - upper[k]).abs() <= tol {
                return Some(2 * k as i32 + 2);
            }
        }
        None
    });
}

/// Boundary tags of [`generate_l_shape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LShapeTag {
    Bottom = 1,
    Top = 2,
    Free = 3,
}

/// L-shaped domain `[0,size]^2 \ (thickness,size]^2`, extruded by `thickness`
/// along z for 3D kinds. `resolution` is the target cell size and must divide
/// both `size` and `thickness`.
///
/// Tags: [`LShapeTag::Bottom`] on y = 0, [`LShapeTag::Top`] on y = size,
/// [`LShapeTag::Free`] elsewhere.
pub fn generate_l_shape(size: f64, thickness: f64, resolution: f64, kind: CellKind) -> Result<Mesh> {
    if !(thickness > 0.0 && thickness < size) {
        return Err(FemError::InvalidArgument(format!(
            "thickness {thickness} must lie in (0, {size})"
        )));
    }
    let cells_along = |len: f64| -> Result<usize> {
        let n = (len / resolution).round();
        if n < 1.0 || (n * resolution - len).abs() > 1e-6 * resolution {
            return Err(FemError::InvalidArgument(format!(
                "resolution {resolution} does not resolve length {len}"
            )));
        }
        Ok(n as usize)
    };
    let nt = cells_along(thickness)?;
    let ns = cells_along(size)?;
    let dim = kind.dim();
    let tensor_kind = if dim == 3 { CellKind::Hex } else { CellKind::Quad };
    let nz = if dim == 3 { nt } else { 0 };
    let (nx, ny) = (ns + 1, ns + 1);
    let h = size / ns as f64;
    let mut index = vec![usize::MAX; nx * ny * (nz + 1)];
    let mut vertices = Vec::new();
    let mut cells = Vec::new();
    let kmax = if dim == 3 { nz } else { 1 };
    for k in 0..kmax {
        for j in 0..ns {
            for i in 0..ns {
                if i >= nt && j >= nt {
                    continue;
                }
                for r in tensor_kind.reference_vertices() {
                    let (a, b, c) = (i + r[0] as usize, j + r[1] as usize, k + r[2] as usize);
                    let key = a + nx * (b + ny * c);
                    if index[key] == usize::MAX {
                        index[key] = vertices.len();
                        let z = if dim == 3 { c as f64 * thickness / nz as f64 } else { 0.0 };
                        vertices.push([a as f64 * h, b as f64 * h, z]);
                    }
                    cells.push(index[key]);
                }
            }
        }
    }
    let tensor = Mesh::new(tensor_kind, vertices, cells)?;
    let mut mesh = match kind {
        CellKind::Quad | CellKind::Hex => tensor,
        CellKind::Tet => hex_to_tet_split(&tensor, TetSplit::Six)?,
        CellKind::Tri => split_quads(&tensor)?,
    };
    let tol = 1e-8 * size;
    mesh.tag_boundary(|c| {
        Some(if c[1].abs() <= tol {
            LShapeTag::Bottom as i32
        } else if (c[1] - size).abs() <= tol {
            LShapeTag::Top as i32
        } else {
            LShapeTag::Free as i32
        })
    });
    Ok(mesh)
}
