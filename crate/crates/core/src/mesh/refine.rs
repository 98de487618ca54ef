use std::collections::{HashMap, VecDeque};

use crate::error::{FemError, Result};

use super::{centroid, entity_key, CellKind, EntityKey, Lattice, Mesh, Point};

/// Hexahedron-to-tetrahedron splitting schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TetSplit {
    /// Alternating corner-cut split; needs a checkerboard-consistent grid.
    Five,
    /// Split around the local 0-6 diagonal; face-conforming on structured grids.
    Six,
}

/// Local hex vertex for reference offsets (x, y, z) in {0,1}^3.
const HEX_AT: [[[usize; 2]; 2]; 2] = [[[0, 4], [3, 7]], [[1, 5], [2, 6]]];

fn hex_at(x: usize, y: usize, z: usize) -> usize {
    HEX_AT[x][y][z]
}

fn six_split() -> [[usize; 4]; 6] {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms.map(|p| {
        let mut off = [0usize; 3];
        let mut tet = [0usize; 4];
        tet[0] = hex_at(0, 0, 0);
        for (s, &axis) in p.iter().enumerate() {
            off[axis] = 1;
            tet[s + 1] = hex_at(off[0], off[1], off[2]);
        }
        tet
    })
}

const EVEN: [usize; 4] = [0, 2, 5, 7];
const FIVE_EVEN: [[usize; 4]; 5] = [[0, 2, 5, 7], [1, 0, 2, 5], [3, 0, 2, 7], [4, 0, 5, 7], [6, 2, 5, 7]];
const FIVE_ODD: [[usize; 4]; 5] = [[1, 3, 4, 6], [0, 1, 3, 4], [2, 1, 3, 6], [5, 1, 4, 6], [7, 3, 4, 6]];

fn tet_volume(p: [Point; 4]) -> f64 {
    let d = |a: Point, b: Point| [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let (u, v, w) = (d(p[0], p[1]), d(p[0], p[2]), d(p[0], p[3]));
    (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0]))
        / 6.0
}

/// The face diagonal (global, sorted) used on a hex face by a given parity.
fn face_diagonal(hex: &[usize], face: &[usize], even: bool) -> [usize; 2] {
    let mut d: Vec<usize> = face
        .iter()
        .filter(|l| EVEN.contains(l) == even)
        .map(|&l| hex[l])
        .collect();
    d.sort_unstable();
    [d[0], d[1]]
}

/// Parity assignment for the five-tet split so that neighbouring hexes cut
/// shared faces along the same diagonal.
fn five_split_parity(mesh: &Mesh) -> Result<Vec<bool>> {
    let n = mesh.num_cells();
    let facets = CellKind::Hex.facets();
    let mut owners: HashMap<EntityKey, Vec<(usize, usize)>> = HashMap::new();
    for c in 0..n {
        let hex = mesh.cell(c);
        for (f, local) in facets.iter().enumerate() {
            let verts: Vec<usize> = local.iter().map(|&l| hex[l]).collect();
            owners.entry(entity_key(&verts)).or_default().push((c, f));
        }
    }
    let mut neighbours: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for list in owners.values() {
        if let [(a, fa), (b, fb)] = list[..] {
            neighbours[a].push((b, fa, fb));
            neighbours[b].push((a, fb, fa));
        }
    }
    let mut parity: Vec<Option<bool>> = vec![None; n];
    for start in 0..n {
        if parity[start].is_some() {
            continue;
        }
        parity[start] = Some(true);
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            let pc = parity[c].unwrap();
            for &(nb, fc, fn_) in &neighbours[c] {
                let diag = face_diagonal(mesh.cell(c), facets[fc], pc);
                let want = face_diagonal(mesh.cell(nb), facets[fn_], true) == diag;
                match parity[nb] {
                    None => {
                        parity[nb] = Some(want);
                        queue.push_back(nb);
                    }
                    Some(p) if p != want => {
                        return Err(FemError::InvalidArgument(
                            "five-tet split requires a checkerboard-colorable hex grid".into(),
                        ))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(parity.into_iter().map(|p| p.unwrap()).collect())
}

/// Splits every hexahedron into tetrahedra. Boundary tags are inherited
/// from the parent hex facets.
pub fn hex_to_tet_split(mesh: &Mesh, scheme: TetSplit) -> Result<Mesh> {
    if mesh.kind() != CellKind::Hex {
        return Err(FemError::InvalidArgument("hex_to_tet_split needs a hex mesh".into()));
    }
    let parity = match scheme {
        TetSplit::Five => Some(five_split_parity(mesh)?),
        TetSplit::Six => None,
    };
    let six = six_split();
    let verts = mesh.vertices();
    let mut cells = Vec::new();
    let mut parent = Vec::new();
    for c in 0..mesh.num_cells() {
        let hex = mesh.cell(c);
        let local: &[[usize; 4]] = match &parity {
            None => &six,
            Some(p) if p[c] => &FIVE_EVEN,
            Some(_) => &FIVE_ODD,
        };
        for t in local {
            let mut g = t.map(|l| hex[l]);
            let vol = tet_volume(g.map(|v| verts[v]));
            if vol < 0.0 {
                g.swap(2, 3);
            } else if vol == 0.0 {
                return Err(FemError::InvalidArgument(format!(
                    "hex {c} produces a degenerate tetrahedron (flipped input?)"
                )));
            }
            cells.extend_from_slice(&g);
            parent.push(c);
        }
    }
    let mut tets = Mesh::new(CellKind::Tet, verts.to_vec(), cells)?;
    let parent_tag: HashMap<(usize, usize), i32> = mesh
        .boundary_facets()
        .iter()
        .map(|b| ((b.cell, b.facet), b.tag))
        .collect();
    let hex_facets = CellKind::Hex.facets();
    for i in 0..tets.boundary.len() {
        let b = tets.boundary[i];
        let tri = tets.facet_vertices(&b);
        let p = parent[b.cell];
        let hex = mesh.cell(p);
        let face = hex_facets
            .iter()
            .position(|f| tri.iter().all(|v| f.iter().any(|&l| hex[l] == *v)));
        if let Some(tag) = face.and_then(|f| parent_tag.get(&(p, f))) {
            tets.boundary[i].tag = *tag;
        }
    }
    Ok(tets)
}

struct Midpoints<'a> {
    vertices: Vec<Point>,
    lookup: HashMap<Vec<usize>, usize>,
    base: &'a [Point],
}

impl Midpoints<'_> {
    /// Index of the vertex at the centroid of the given original vertices.
    fn get(&mut self, verts: &[usize]) -> usize {
        if verts.len() == 1 {
            return verts[0];
        }
        let mut key = verts.to_vec();
        key.sort_unstable();
        if let Some(&i) = self.lookup.get(&key) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push(centroid(verts.iter().map(|&v| self.base[v])));
        self.lookup.insert(key, i);
        i
    }
}

/// One level of uniform refinement: hex/quad by midpoint subdivision, tet by
/// red refinement, tri into four. Cell count grows by 2^dim; tags and lattice
/// structure are inherited.
pub fn uniform_refine(mesh: &Mesh) -> Result<Mesh> {
    let kind = mesh.kind();
    let mut mid = Midpoints {
        vertices: mesh.vertices().to_vec(),
        lookup: HashMap::new(),
        base: mesh.vertices(),
    };
    let mut cells = Vec::with_capacity(mesh.connectivity().len() << kind.dim());
    let mut lattice_index = Vec::new();
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        match kind {
            CellKind::Hex | CellKind::Quad => {
                let dim = kind.dim();
                let refs = kind.reference_vertices();
                // node at doubled reference coordinates (a, b, c) in {0,1,2}^dim
                let mut node = |a: usize, b: usize, d: usize| -> usize {
                    let verts: Vec<usize> = refs
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| {
                            let ok = |coord: usize, rv: f64| coord == 1 || coord == 2 * rv as usize;
                            ok(a, r[0]) && ok(b, r[1]) && (dim == 2 || ok(d, r[2]))
                        })
                        .map(|(l, _)| cell[l])
                        .collect();
                    mid.get(&verts)
                };
                let zr = if dim == 3 { 2 } else { 1 };
                for r in 0..zr {
                    for q in 0..2 {
                        for p in 0..2 {
                            for rv in refs {
                                let n = node(p + rv[0] as usize, q + rv[1] as usize, r + rv[2] as usize);
                                cells.push(n);
                            }
                            if let Some(l) = mesh.lattice() {
                                let idx = l.cell_index[c];
                                lattice_index.push([
                                    2 * idx[0] + p,
                                    2 * idx[1] + q,
                                    if dim == 3 { 2 * idx[2] + r } else { 0 },
                                ]);
                            }
                        }
                    }
                }
            }
            CellKind::Tri => {
                let (v0, v1, v2) = (cell[0], cell[1], cell[2]);
                let m01 = mid.get(&[v0, v1]);
                let m02 = mid.get(&[v0, v2]);
                let m12 = mid.get(&[v1, v2]);
                cells.extend_from_slice(&[v0, m01, m02, m01, v1, m12, m02, m12, v2, m01, m12, m02]);
            }
            CellKind::Tet => {
                let x = [cell[0], cell[1], cell[2], cell[3]];
                let m = |mid: &mut Midpoints, a: usize, b: usize| mid.get(&[x[a], x[b]]);
                let (x01, x02, x03) = (m(&mut mid, 0, 1), m(&mut mid, 0, 2), m(&mut mid, 0, 3));
                let (x12, x13, x23) = (m(&mut mid, 1, 2), m(&mut mid, 1, 3), m(&mut mid, 2, 3));
                let children = [
                    [x[0], x01, x02, x03],
                    [x01, x[1], x12, x13],
                    [x02, x12, x[2], x23],
                    [x03, x13, x23, x[3]],
                    [x01, x02, x03, x13],
                    [x01, x02, x12, x13],
                    [x02, x03, x13, x23],
                    [x02, x12, x13, x23],
                ];
                for mut t in children {
                    if tet_volume(t.map(|v| mid.vertices[v])) < 0.0 {
                        t.swap(2, 3);
                    }
                    cells.extend_from_slice(&t);
                }
            }
        }
    }

    // children of every tagged boundary facet, keyed for tag lookup
    let mut tags: HashMap<EntityKey, i32> = HashMap::new();
    for b in mesh.boundary_facets() {
        let f = mesh.facet_vertices(b);
        let children: Vec<Vec<usize>> = match f.len() {
            2 => {
                let m = mid.get(&f);
                vec![vec![f[0], m], vec![m, f[1]]]
            }
            3 => {
                let (a, bb, c) = (f[0], f[1], f[2]);
                let (ab, ac, bc) = (mid.get(&[a, bb]), mid.get(&[a, c]), mid.get(&[bb, c]));
                vec![vec![a, ab, ac], vec![ab, bb, bc], vec![ac, bc, c], vec![ab, bc, ac]]
            }
            _ => {
                let (a, bb, c, d) = (f[0], f[1], f[2], f[3]);
                let ctr = mid.get(&f);
                let (ab, bc, cd, da) = (mid.get(&[a, bb]), mid.get(&[bb, c]), mid.get(&[c, d]), mid.get(&[d, a]));
                vec![
                    vec![a, ab, ctr, da],
                    vec![ab, bb, bc, ctr],
                    vec![ctr, bc, c, cd],
                    vec![da, ctr, cd, d],
                ]
            }
        };
        for ch in children {
            tags.insert(entity_key(&ch), b.tag);
        }
    }
    let mut refined = Mesh::new(kind, mid.vertices, cells)?;
    refined.tag_boundary_from_keys(&tags);
    if let Some(l) = mesh.lattice() {
        let dims = if kind.dim() == 3 {
            l.dims.map(|d| 2 * d)
        } else {
            [2 * l.dims[0], 2 * l.dims[1], 1]
        };
        refined.set_lattice(Some(Lattice {
            dims,
            cell_index: lattice_index,
        }));
    }
    Ok(refined)
}
