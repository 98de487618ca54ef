//! ASCII mesh formats: Gmsh MSH 2.2 and legacy VTK unstructured grids.
//!
//! MSH: element types 2 (tri3), 3 (quad4), 4 (tet4), 5 (hex8); the first
//! element tag is the physical region. Elements of the top dimension become
//! cells, lower-dimensional elements tag the boundary facets they match.
//!
//! VTK: `DATASET UNSTRUCTURED_GRID` with `POINTS`, `CELLS`, `CELL_TYPES`
//! 10 (tet) / 12 (hex), and 5 (tri) / 9 (quad) for planar meshes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};

use super::{entity_key, CellKind, EntityKey, Mesh, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFormat {
    MshAscii,
    VtkAsciiLegacy,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "msh" => Some(MeshFormat::MshAscii),
            "vtk" => Some(MeshFormat::VtkAsciiLegacy),
            _ => None,
        }
    }
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<Mesh> {
    let text = std::fs::read_to_string(path).map_err(|source| FemError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        MeshFormat::MshAscii => parse_msh(&text),
        MeshFormat::VtkAsciiLegacy => parse_vtk(&text),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn next_nonempty(&mut self) -> Result<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Ok(t);
            }
        }
        Err(self.err("unexpected end of file"))
    }

    fn err(&self, message: impl Into<String>) -> FemError {
        FemError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        let l = self.next_nonempty()?;
        if l != token {
            return Err(self.err(format!("expected {token}, found {l:?}")));
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(lines: &Lines, tok: Option<&str>) -> Result<T> {
    let tok = tok.ok_or_else(|| lines.err("missing value"))?;
    tok.parse()
        .map_err(|_| lines.err(format!("cannot parse {tok:?}")))
}

fn msh_kind(ty: u32) -> Option<CellKind> {
    match ty {
        2 => Some(CellKind::Tri),
        3 => Some(CellKind::Quad),
        4 => Some(CellKind::Tet),
        5 => Some(CellKind::Hex),
        _ => None,
    }
}

fn msh_type(kind: CellKind) -> u32 {
    match kind {
        CellKind::Tri => 2,
        CellKind::Quad => 3,
        CellKind::Tet => 4,
        CellKind::Hex => 5,
    }
}

pub fn parse_msh(text: &str) -> Result<Mesh> {
    let mut lines = Lines::new(text);
    lines.expect("$MeshFormat")?;
    let version = lines.next_nonempty()?;
    let mut it = version.split_whitespace();
    if it.next() != Some("2.2") || it.next() != Some("0") {
        return Err(lines.err(format!("unsupported MSH version line {version:?}")));
    }
    lines.expect("$EndMeshFormat")?;

    let mut node_index: HashMap<u64, usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut elements: Vec<(CellKind, i32, Vec<u64>)> = Vec::new();
    let mut seen_nodes = false;
    let mut seen_elements = false;
    loop {
        let header = match lines.next_nonempty() {
            Ok(h) => h,
            Err(_) => break,
        };
        match header {
            "$Nodes" => {
                let count = lines.next_nonempty()?;
                let n: usize = parse_num(&lines, Some(count))?;
                for _ in 0..n {
                    let l = lines.next_nonempty()?;
                    let mut it = l.split_whitespace();
                    let id: u64 = parse_num(&lines, it.next())?;
                    let x: f64 = parse_num(&lines, it.next())?;
                    let y: f64 = parse_num(&lines, it.next())?;
                    let z: f64 = parse_num(&lines, it.next())?;
                    if node_index.insert(id, vertices.len()).is_some() {
                        return Err(lines.err(format!("duplicate node id {id}")));
                    }
                    vertices.push([x, y, z]);
                }
                lines.expect("$EndNodes")?;
                seen_nodes = true;
            }
            "$Elements" => {
                let count = lines.next_nonempty()?;
                let n: usize = parse_num(&lines, Some(count))?;
                for _ in 0..n {
                    let l = lines.next_nonempty()?;
                    let mut it = l.split_whitespace();
                    let _id: u64 = parse_num(&lines, it.next())?;
                    let ty: u32 = parse_num(&lines, it.next())?;
                    let ntags: usize = parse_num(&lines, it.next())?;
                    let tags: Vec<i32> = (0..ntags)
                        .map(|_| parse_num(&lines, it.next()))
                        .collect::<Result<_>>()?;
                    let Some(kind) = msh_kind(ty) else {
                        // points and lines carry no cell or facet data for us
                        if matches!(ty, 1 | 15) {
                            continue;
                        }
                        return Err(lines.err(format!("unsupported element type {ty}")));
                    };
                    let nodes: Vec<u64> = (0..kind.num_vertices())
                        .map(|_| parse_num(&lines, it.next()))
                        .collect::<Result<_>>()?;
                    elements.push((kind, tags.first().copied().unwrap_or(0), nodes));
                }
                lines.expect("$EndElements")?;
                seen_elements = true;
            }
            other if other.starts_with('$') => {
                // skip unknown sections
                let end = format!("$End{}", &other[1..]);
                while lines.next_nonempty()? != end {}
            }
            other => return Err(lines.err(format!("unexpected line {other:?}"))),
        }
    }
    if !seen_nodes || !seen_elements {
        return Err(lines.err("missing $Nodes or $Elements section"));
    }
    let max_dim = elements.iter().map(|e| e.0.dim()).max().unwrap_or(0);
    if max_dim == 0 {
        return Err(FemError::InvalidMesh("mesh has zero cells".into()));
    }
    let mut kind: Option<CellKind> = None;
    let mut cells = Vec::new();
    let mut facet_tags: HashMap<EntityKey, i32> = HashMap::new();
    for (k, tag, nodes) in &elements {
        let idx: Vec<usize> = nodes
            .iter()
            .map(|id| {
                node_index.get(id).copied().ok_or_else(|| {
                    FemError::InvalidMesh(format!("element references unknown node {id}"))
                })
            })
            .collect::<Result<_>>()?;
        if k.dim() == max_dim {
            match kind {
                None => kind = Some(*k),
                Some(prev) if prev != *k => return Err(FemError::MixedCellKinds(prev, *k)),
                _ => {}
            }
            cells.extend(idx);
        } else if k.dim() + 1 == max_dim {
            facet_tags.insert(entity_key(&idx), *tag);
        }
    }
    let kind = kind.expect("max_dim > 0 implies a cell kind");
    if kind.dim() == 2 && vertices.iter().any(|v| v[2] != 0.0) {
        return Err(FemError::InvalidMesh("planar mesh with nonzero z coordinates".into()));
    }
    let mut mesh = Mesh::new(kind, vertices, cells)?;
    mesh.tag_boundary_from_keys(&facet_tags);
    Ok(mesh)
}

/// Writes MSH 2.2 with cells in physical region 1 and boundary facets as
/// lower-dimensional elements carrying their tags.
pub fn write_msh(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", mesh.num_vertices());
    for (i, v) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(s, "{} {:?} {:?} {:?}", i + 1, v[0], v[1], v[2]);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let facet_ty = mesh.kind().facet_cell_kind().map(msh_type);
    let nb = if facet_ty.is_some() { mesh.boundary_facets().len() } else { 0 };
    let _ = writeln!(s, "{}", nb + mesh.num_cells());
    let mut id = 1;
    if let Some(ty) = facet_ty {
        for b in mesh.boundary_facets() {
            let _ = write!(s, "{id} {ty} 2 {} {}", b.tag, b.tag);
            for v in mesh.facet_vertices(b) {
                let _ = write!(s, " {}", v + 1);
            }
            s.push('\n');
            id += 1;
        }
    }
    let ty = msh_type(mesh.kind());
    for cell in mesh.cells() {
        let _ = write!(s, "{id} {ty} 2 1 1");
        for v in cell {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
        id += 1;
    }
    s.push_str("$EndElements\n");
    s
}

fn vtk_kind(ty: u32) -> Option<CellKind> {
    match ty {
        5 => Some(CellKind::Tri),
        9 => Some(CellKind::Quad),
        10 => Some(CellKind::Tet),
        12 => Some(CellKind::Hex),
        _ => None,
    }
}

fn vtk_type(kind: CellKind) -> u32 {
    match kind {
        CellKind::Tri => 5,
        CellKind::Quad => 9,
        CellKind::Tet => 10,
        CellKind::Hex => 12,
    }
}

pub fn parse_vtk(text: &str) -> Result<Mesh> {
    let mut lines = Lines::new(text);
    let magic = lines.next_nonempty()?;
    if !magic.starts_with("# vtk DataFile") {
        return Err(lines.err("missing '# vtk DataFile' header"));
    }
    let _title = lines.next_nonempty()?;
    lines.expect("ASCII")?;
    let ds = lines.next_nonempty()?;
    if ds.split_whitespace().collect::<Vec<_>>() != ["DATASET", "UNSTRUCTURED_GRID"] {
        return Err(lines.err(format!("unsupported dataset {ds:?}")));
    }
    // remaining file as a token stream
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (i, l) in lines.inner.by_ref() {
        for t in l.split_whitespace() {
            tokens.push((i + 1, t));
        }
    }
    let mut pos = 0usize;
    let mut next = |what: &str| -> Result<(usize, &str)> {
        let t = tokens.get(pos).copied().ok_or_else(|| FemError::Parse {
            line: tokens.last().map(|t| t.0).unwrap_or(0),
            message: format!("unexpected end of file reading {what}"),
        })?;
        pos += 1;
        Ok(t)
    };
    fn num<T: std::str::FromStr>(t: (usize, &str)) -> Result<T> {
        t.1.parse().map_err(|_| FemError::Parse {
            line: t.0,
            message: format!("cannot parse {:?}", t.1),
        })
    }
    let mut vertices: Vec<Point> = Vec::new();
    let mut conn: Vec<Vec<usize>> = Vec::new();
    let mut types: Vec<u32> = Vec::new();
    while let Ok(kw) = next("section") {
        match kw.1 {
            "POINTS" => {
                let n: usize = num(next("point count")?)?;
                let _dtype = next("point type")?;
                for _ in 0..n {
                    let x = num(next("x")?)?;
                    let y = num(next("y")?)?;
                    let z = num(next("z")?)?;
                    vertices.push([x, y, z]);
                }
            }
            "CELLS" => {
                let n: usize = num(next("cell count")?)?;
                let _size: usize = num(next("cell list size")?)?;
                for _ in 0..n {
                    let k: usize = num(next("cell size")?)?;
                    let c = (0..k)
                        .map(|_| next("cell vertex").and_then(num))
                        .collect::<Result<Vec<usize>>>()?;
                    conn.push(c);
                }
            }
            "CELL_TYPES" => {
                let n: usize = num(next("type count")?)?;
                for _ in 0..n {
                    types.push(num(next("cell type")?)?);
                }
            }
            // point/cell data and anything after it is ignored
            "POINT_DATA" | "CELL_DATA" => break,
            other => {
                return Err(FemError::Parse {
                    line: kw.0,
                    message: format!("unexpected keyword {other:?}"),
                })
            }
        }
    }
    if types.len() != conn.len() {
        return Err(FemError::Parse {
            line: 0,
            message: format!("{} cells but {} cell types", conn.len(), types.len()),
        });
    }
    let mut kind: Option<CellKind> = None;
    let mut cells = Vec::new();
    let mut facet_cells: Vec<(CellKind, &Vec<usize>)> = Vec::new();
    let max_dim = types
        .iter()
        .filter_map(|&t| vtk_kind(t))
        .map(|k| k.dim())
        .max()
        .unwrap_or(0);
    for (c, &t) in conn.iter().zip(&types) {
        let k = vtk_kind(t).ok_or_else(|| FemError::Parse {
            line: 0,
            message: format!("unsupported VTK cell type {t}"),
        })?;
        if c.len() != k.num_vertices() {
            return Err(FemError::InvalidMesh(format!(
                "cell of type {t} has {} vertices",
                c.len()
            )));
        }
        if k.dim() < max_dim {
            facet_cells.push((k, c));
            continue;
        }
        match kind {
            None => kind = Some(k),
            Some(prev) if prev != k => return Err(FemError::MixedCellKinds(prev, k)),
            _ => {}
        }
        cells.extend_from_slice(c);
    }
    let kind = kind.ok_or_else(|| FemError::InvalidMesh("mesh has zero cells".into()))?;
    Mesh::new(kind, vertices, cells)
}

/// Named per-vertex data attached to a VTK dump.
pub struct VtkPointData<'a> {
    pub name: &'a str,
    /// 1 (scalar) or 3 (vector) components per vertex.
    pub components: usize,
    pub values: &'a [f64],
}

pub fn write_vtk(mesh: &Mesh, point_data: &[VtkPointData]) -> String {
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 2.0\nfembench output\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.num_vertices());
    for v in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?} {:?}", v[0], v[1], v[2]);
    }
    let nv = mesh.kind().num_vertices();
    let _ = writeln!(s, "CELLS {} {}", mesh.num_cells(), mesh.num_cells() * (nv + 1));
    for cell in mesh.cells() {
        let _ = write!(s, "{nv}");
        for v in cell {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {}", mesh.num_cells());
    let ty = vtk_type(mesh.kind());
    for _ in 0..mesh.num_cells() {
        let _ = writeln!(s, "{ty}");
    }
    if !point_data.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.num_vertices());
        for d in point_data {
            if d.components == 1 {
                let _ = writeln!(s, "SCALARS {} double 1\nLOOKUP_TABLE default", d.name);
                for v in d.values {
                    let _ = writeln!(s, "{v:?}");
                }
            } else {
                let _ = writeln!(s, "VECTORS {} double", d.name);
                for v in d.values.chunks(d.components) {
                    let mut c = [0.0; 3];
                    c[..v.len().min(3)].copy_from_slice(&v[..v.len().min(3)]);
                    let _ = writeln!(s, "{:?} {:?} {:?}", c[0], c[1], c[2]);
                }
            }
        }
    }
    s
}
