//! Pure tet/hex (and tri/quad) meshes with tagged boundary facets.
//!
//! Local vertex orderings follow VTK. Facets of tensor cells are numbered
//! `2 * axis + side` (x-min, x-max, y-min, y-max, z-min, z-max); facet `i` of
//! a simplex is the facet opposite vertex `i`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::basis::geometry;
use crate::error::{FemError, Result};

mod generate;
mod io;
mod quality;
mod refine;

pub use generate::{generate_box_grid, generate_l_shape, LShapeTag};
pub use io::{load_mesh, parse_msh, parse_vtk, write_msh, write_vtk, MeshFormat, VtkPointData};
pub use quality::{detect_flipped_hex, element_aspect_ratio, hex_is_flipped, mesh_stats, MeshStats};
pub use refine::{hex_to_tet_split, uniform_refine, TetSplit};

pub type Point = [f64; 3];

/// Tag assigned to boundary facets that no rule or file tag covers.
pub const UNTAGGED: i32 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Tri,
    Quad,
    Tet,
    Hex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FacetKind {
    Segment,
    Tri,
    Quad,
}

const TRI_REF: [Point; 3] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
const QUAD_REF: [Point; 4] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0],
];
const TET_REF: [Point; 4] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
];
const HEX_REF: [Point; 8] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 1.0],
    [1.0, 1.0, 1.0],
    [0.0, 1.0, 1.0],
];

const TRI_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
const QUAD_EDGES: [[usize; 2]; 4] = [[0, 1], [1, 2], [2, 3], [3, 0]];
const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
const HEX_EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [2, 3],
    [3, 0],
    [4, 5],
    [5, 6],
    [6, 7],
    [7, 4],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

const TRI_FACETS: [&[usize]; 3] = [&[1, 2], &[0, 2], &[0, 1]];
const QUAD_FACETS: [&[usize]; 4] = [&[0, 3], &[1, 2], &[0, 1], &[3, 2]];
const TET_FACETS: [&[usize]; 4] = [&[1, 2, 3], &[0, 2, 3], &[0, 1, 3], &[0, 1, 2]];
const HEX_FACETS: [&[usize]; 6] = [
    &[0, 3, 7, 4],
    &[1, 2, 6, 5],
    &[0, 1, 5, 4],
    &[3, 2, 6, 7],
    &[0, 1, 2, 3],
    &[4, 5, 6, 7],
];

impl CellKind {
    pub fn dim(self) -> usize {
        match self {
            CellKind::Tri | CellKind::Quad => 2,
            CellKind::Tet | CellKind::Hex => 3,
        }
    }

    pub fn num_vertices(self) -> usize {
        match self {
            CellKind::Tri => 3,
            CellKind::Quad | CellKind::Tet => 4,
            CellKind::Hex => 8,
        }
    }

    pub fn is_simplex(self) -> bool {
        matches!(self, CellKind::Tri | CellKind::Tet)
    }

    pub fn reference_vertices(self) -> &'static [Point] {
        match self {
            CellKind::Tri => &TRI_REF,
            CellKind::Quad => &QUAD_REF,
            CellKind::Tet => &TET_REF,
            CellKind::Hex => &HEX_REF,
        }
    }

    pub fn edges(self) -> &'static [[usize; 2]] {
        match self {
            CellKind::Tri => &TRI_EDGES,
            CellKind::Quad => &QUAD_EDGES,
            CellKind::Tet => &TET_EDGES,
            CellKind::Hex => &HEX_EDGES,
        }
    }

    /// Local vertex lists of the facets; quad facets are cyclic.
    pub fn facets(self) -> &'static [&'static [usize]] {
        match self {
            CellKind::Tri => &TRI_FACETS,
            CellKind::Quad => &QUAD_FACETS,
            CellKind::Tet => &TET_FACETS,
            CellKind::Hex => &HEX_FACETS,
        }
    }

    pub fn num_facets(self) -> usize {
        self.facets().len()
    }

    pub fn facet_kind(self) -> FacetKind {
        match self {
            CellKind::Tri | CellKind::Quad => FacetKind::Segment,
            CellKind::Tet => FacetKind::Tri,
            CellKind::Hex => FacetKind::Quad,
        }
    }

    /// Reference-cell measure: 1/2 tri, 1/6 tet, 1 quad/hex.
    pub fn reference_measure(self) -> f64 {
        match self {
            CellKind::Tri => 0.5,
            CellKind::Tet => 1.0 / 6.0,
            CellKind::Quad | CellKind::Hex => 1.0,
        }
    }

    /// Cell kind whose facets are this kind's facets (tensor cells only).
    pub fn facet_cell_kind(self) -> Option<CellKind> {
        match self {
            CellKind::Hex => Some(CellKind::Quad),
            CellKind::Tet => Some(CellKind::Tri),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryFacet {
    pub cell: usize,
    pub facet: usize,
    pub tag: i32,
}

/// Structured-lattice bookkeeping carried by generated tensor grids and their
/// uniform refinements; required by spline spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    /// Cells per axis (unused axes are 1).
    pub dims: [usize; 3],
    /// Lattice index of every cell.
    pub cell_index: Vec<[usize; 3]>,
}

/// Sorted, padded vertex key identifying an edge or facet independent of orientation.
pub type EntityKey = [usize; 4];

pub fn entity_key(vertices: &[usize]) -> EntityKey {
    let mut key = [usize::MAX; 4];
    key[..vertices.len()].copy_from_slice(vertices);
    key[..vertices.len()].sort_unstable();
    key
}

#[derive(Clone, Debug)]
pub struct Mesh {
    kind: CellKind,
    vertices: Vec<Point>,
    cells: Vec<usize>,
    boundary: Vec<BoundaryFacet>,
    lattice: Option<Lattice>,
}

impl Mesh {
    /// Builds a mesh and derives its boundary facets by facet counting. All
    /// boundary facets start out with tag [`UNTAGGED`].
    pub fn new(kind: CellKind, vertices: Vec<Point>, cells: Vec<usize>) -> Result<Self> {
        let nv = kind.num_vertices();
        if cells.is_empty() {
            return Err(FemError::InvalidMesh("mesh has zero cells".into()));
        }
        if cells.len() % nv != 0 {
            return Err(FemError::InvalidMesh(format!(
                "connectivity length {} is not a multiple of {nv}",
                cells.len()
            )));
        }
        if let Some(&bad) = cells.iter().find(|&&v| v >= vertices.len()) {
            return Err(FemError::InvalidMesh(format!(
                "cell references vertex {bad} but mesh has {} vertices",
                vertices.len()
            )));
        }
        let mut mesh = Mesh {
            kind,
            vertices,
            cells,
            boundary: Vec::new(),
            lattice: None,
        };
        if kind.is_simplex() {
            let scale = mesh.bounding_box_diagonal().powi(kind.dim() as i32);
            for c in 0..mesh.num_cells() {
                let vol = mesh.signed_cell_measure(c);
                if vol.abs() <= 1e-14 * scale {
                    return Err(FemError::InvalidMesh(format!("cell {c} has zero volume")));
                }
            }
        }
        mesh.boundary = mesh.find_boundary_facets();
        Ok(mesh)
    }

    pub fn with_lattice(mut self, lattice: Lattice) -> Result<Self> {
        if lattice.cell_index.len() != self.num_cells() || matches!(self.kind, CellKind::Tri | CellKind::Tet) {
            return Err(FemError::InvalidMesh("lattice does not match mesh".into()));
        }
        self.lattice = Some(lattice);
        Ok(self)
    }

    pub(crate) fn set_lattice(&mut self, lattice: Option<Lattice>) {
        self.lattice = lattice;
    }

    fn find_boundary_facets(&self) -> Vec<BoundaryFacet> {
        let mut count: HashMap<EntityKey, (usize, usize, u32)> = HashMap::new();
        let mut scratch = Vec::with_capacity(4);
        for c in 0..self.num_cells() {
            let cell = self.cell(c);
            for (f, local) in self.kind.facets().iter().enumerate() {
                scratch.clear();
                scratch.extend(local.iter().map(|&l| cell[l]));
                count
                    .entry(entity_key(&scratch))
                    .and_modify(|e| e.2 += 1)
                    .or_insert((c, f, 1));
            }
        }
        let mut facets: Vec<BoundaryFacet> = count
            .into_values()
            .filter(|&(_, _, n)| n == 1)
            .map(|(cell, facet, _)| BoundaryFacet {
                cell,
                facet,
                tag: UNTAGGED,
            })
            .collect();
        facets.sort_by_key(|b| (b.cell, b.facet));
        facets
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len() / self.kind.num_vertices()
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let nv = self.kind.num_vertices();
        &self.cells[c * nv..(c + 1) * nv]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> {
        self.cells.chunks_exact(self.kind.num_vertices())
    }

    pub fn connectivity(&self) -> &[usize] {
        &self.cells
    }

    pub fn cell_vertices(&self, c: usize) -> Vec<Point> {
        self.cell(c).iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn boundary_facets(&self) -> &[BoundaryFacet] {
        &self.boundary
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    /// Global vertex indices of a boundary facet, in the cell's local facet order.
    pub fn facet_vertices(&self, facet: &BoundaryFacet) -> Vec<usize> {
        let cell = self.cell(facet.cell);
        self.kind.facets()[facet.facet]
            .iter()
            .map(|&l| cell[l])
            .collect()
    }

    pub fn boundary_tags(&self) -> Vec<i32> {
        let mut tags: Vec<i32> = self.boundary.iter().map(|b| b.tag).collect();
        tags.sort_unstable();
        tags.dedup();
        tags
    }

    pub fn has_tag(&self, tag: i32) -> bool {
        self.boundary.iter().any(|b| b.tag == tag)
    }

    /// Retags every boundary facet by evaluating `rule` at the facet centroid.
    /// Facets for which the rule returns `None` keep their current tag.
    pub fn tag_boundary<F>(&mut self, mut rule: F)
    where
        F: FnMut(Point) -> Option<i32>,
    {
        for i in 0..self.boundary.len() {
            let verts = self.facet_vertices(&self.boundary[i]);
            let centroid = centroid(verts.iter().map(|&v| self.vertices[v]));
            if let Some(tag) = rule(centroid) {
                self.boundary[i].tag = tag;
            }
        }
    }

    /// Assigns tags to boundary facets from a key → tag map; unmatched facets
    /// keep their tag.
    pub fn tag_boundary_from_keys(&mut self, tags: &HashMap<EntityKey, i32>) {
        for i in 0..self.boundary.len() {
            let key = entity_key(&self.facet_vertices(&self.boundary[i]));
            if let Some(&tag) = tags.get(&key) {
                self.boundary[i].tag = tag;
            }
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (0..3).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// Signed length/area/volume of a cell under its (bi/tri)linear map.
    pub fn signed_cell_measure(&self, c: usize) -> f64 {
        geometry::cell_measure(self.kind, &self.cell_vertices(c))
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.signed_cell_measure(c)).sum()
    }

    /// Unique edges as sorted vertex pairs, in sorted order.
    pub fn unique_edges(&self) -> Vec<[usize; 2]> {
        let mut edges: Vec<[usize; 2]> = self
            .cells()
            .flat_map(|cell| {
                self.kind.edges().iter().map(move |&[a, b]| {
                    let (a, b) = (cell[a], cell[b]);
                    [a.min(b), a.max(b)]
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Returns a copy with cells permuted by `order` (new cell i = old cell order[i]).
    pub fn reorder_cells(&self, order: &[usize]) -> Result<Mesh> {
        let mut cells = Vec::with_capacity(self.cells.len());
        for &c in order {
            cells.extend_from_slice(self.cell(c));
        }
        let mut mesh = Mesh::new(self.kind, self.vertices.clone(), cells)?;
        mesh.copy_tags_from(self);
        if let Some(l) = &self.lattice {
            let cell_index = order.iter().map(|&c| l.cell_index[c]).collect();
            mesh.lattice = Some(Lattice {
                dims: l.dims,
                cell_index,
            });
        }
        Ok(mesh)
    }

    /// Returns a copy whose vertices are renumbered: old vertex v becomes `perm[v]`.
    pub fn renumber_vertices(&self, perm: &[usize]) -> Result<Mesh> {
        let mut vertices = vec![[0.0; 3]; self.vertices.len()];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let cells = self.cells.iter().map(|&v| perm[v]).collect();
        let mut mesh = Mesh::new(self.kind, vertices, cells)?;
        let tags: HashMap<EntityKey, i32> = self
            .boundary
            .iter()
            .map(|b| {
                let verts: Vec<usize> = self.facet_vertices(b).iter().map(|&v| perm[v]).collect();
                (entity_key(&verts), b.tag)
            })
            .collect();
        mesh.tag_boundary_from_keys(&tags);
        mesh.lattice = self.lattice.clone();
        Ok(mesh)
    }

    pub(crate) fn copy_tags_from(&mut self, other: &Mesh) {
        let tags: HashMap<EntityKey, i32> = other
            .boundary
            .iter()
            .map(|b| (entity_key(&other.facet_vertices(b)), b.tag))
            .collect();
        self.tag_boundary_from_keys(&tags);
    }

    /// Maps every vertex through `f`, keeping connectivity and tags.
    pub fn map_vertices<F: FnMut(Point) -> Point>(&self, mut f: F) -> Mesh {
        let mut mesh = self.clone();
        for v in &mut mesh.vertices {
            *v = f(*v);
        }
        mesh
    }
}

pub(crate) fn centroid<I: IntoIterator<Item = Point>>(points: I) -> Point {
    let mut c = [0.0; 3];
    let mut n = 0usize;
    for p in points {
        for k in 0..3 {
            c[k] += p[k];
        }
        n += 1;
    }
    c.map(|x| x / n as f64)
}
