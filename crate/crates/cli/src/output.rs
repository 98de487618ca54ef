//! CSV rows, field dumps and mesh audits.

use std::io::Write;
use std::path::Path;

use fembench::driver::Solution;
use fembench::mesh::{detect_flipped_hex, element_aspect_ratio, mesh_stats, write_vtk, CellKind, Mesh, MeshStats, VtkPointData};
use fembench::postprocess::{vertex_averaged_stress, von_mises, RunRecord};
use fembench::problems::Pde;
use fembench::basis::FESpace;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV line. Column order is part of the schema.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub schema_version: u32,
    pub problem: String,
    pub family: String,
    pub num_vertices: usize,
    pub num_cells: usize,
    pub num_dofs: usize,
    pub matrix_nnz: usize,
    pub avg_edge: f64,
    pub min_edge: f64,
    pub max_ar: f64,
    pub l2: Option<f64>,
    pub h1: Option<f64>,
    pub h1_semi: Option<f64>,
    pub linf: Option<f64>,
    pub linf_grad: Option<f64>,
    pub l8: Option<f64>,
    pub t_b: f64,
    pub t_a: f64,
    pub t_s: f64,
    pub t_total: f64,
    pub mean_ar: f64,
    pub peak_memory: u64,
}

impl From<&RunRecord> for CsvRow {
    fn from(r: &RunRecord) -> Self {
        let e = r.errors;
        CsvRow {
            schema_version: SCHEMA_VERSION,
            problem: r.problem.clone(),
            family: r.family.clone(),
            num_vertices: r.mesh_stats.num_vertices,
            num_cells: r.mesh_stats.num_cells,
            num_dofs: r.num_dofs,
            matrix_nnz: r.matrix_nnz,
            avg_edge: r.mesh_stats.avg_edge_length,
            min_edge: r.mesh_stats.min_edge_length,
            max_ar: r.mesh_stats.max_aspect_ratio,
            l2: e.map(|e| e.l2),
            h1: e.map(|e| e.h1),
            h1_semi: e.map(|e| e.h1_semi),
            linf: e.map(|e| e.linf),
            linf_grad: e.map(|e| e.linf_grad),
            l8: e.map(|e| e.l8),
            t_b: r.timings.t_b,
            t_a: r.timings.t_a,
            t_s: r.timings.t_s,
            t_total: r.timings.t_total,
            mean_ar: r.mesh_stats.mean_aspect_ratio,
            peak_memory: r.peak_memory,
        }
    }
}

pub fn write_csv(path: &Path, records: &[RunRecord]) -> CliResult<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(path, e),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in records {
        w.serialize(CsvRow::from(r)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|e| CliError::io(path, e))
}

/// Field values at mesh vertices, `stride` entries per vertex.
fn vertex_values(space: &FESpace, coeffs: &[f64], stride: usize) -> Vec<f64> {
    let mesh = space.mesh();
    let refs = mesh.kind().reference_vertices();
    let mut out = vec![0.0; mesh.num_vertices() * stride];
    for c in 0..mesh.num_cells() {
        for (i, &v) in mesh.cell(c).iter().enumerate() {
            let (val, _) = space.eval_in_cell(c, refs[i], coeffs);
            out[v * stride..v * stride + val.len()].copy_from_slice(&val);
        }
    }
    out
}

/// Legacy VTK dump of the solution, pressure and von Mises stress.
pub fn solution_vtk(s: &Solution, pde: Pde, material: &fembench::assembly::MaterialParams) -> CliResult<String> {
    let mesh = s.space.mesh();
    let m = s.space.components();
    let stride = if m == 1 { 1 } else { 3 };
    let u = vertex_values(&s.space, &s.u, stride);
    let mut data = vec![VtkPointData {
        name: "solution",
        components: stride,
        values: &u,
    }];
    let p = match (&s.pressure_space, &s.pressure) {
        (Some(ps), Some(p)) => Some(vertex_values(ps, p, 1)),
        _ => None,
    };
    if let Some(p) = &p {
        data.push(VtkPointData {
            name: "pressure",
            components: 1,
            values: p,
        });
    }
    let vm: Option<Vec<f64>> = if matches!(pde, Pde::LinearElasticity | Pde::NeoHookean) {
        let stress = vertex_averaged_stress(&s.space, &s.u, material)?;
        Some(stress.iter().map(|sigma| von_mises(sigma, mesh.dim())).collect())
    } else {
        None
    };
    if let Some(vm) = &vm {
        data.push(VtkPointData {
            name: "von_mises",
            components: 1,
            values: vm,
        });
    }
    Ok(write_vtk(mesh, &data))
}

pub const HISTOGRAM_BINS: usize = 32;
/// Aspect ratios are binned on [1, 10^3]; larger values land in the last bin.
pub const HISTOGRAM_DECADES: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `HISTOGRAM_BINS + 1` log-spaced edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn aspect_ratio_histogram(ratios: &[f64]) -> Histogram {
    let step = HISTOGRAM_DECADES / HISTOGRAM_BINS as f64;
    let edges = (0..=HISTOGRAM_BINS).map(|k| 10f64.powf(step * k as f64)).collect();
    let mut counts = vec![0; HISTOGRAM_BINS];
    for &ar in ratios {
        let k = if ar.is_finite() {
            ((ar.max(1.0).log10() / step).floor() as usize).min(HISTOGRAM_BINS - 1)
        } else {
            HISTOGRAM_BINS - 1
        };
        counts[k] += 1;
    }
    Histogram { edges, counts }
}

/// Output of `mesh-stats`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub stats: MeshStats,
    /// Hexes (quads) with a negative Jacobian sample, or simplices with
    /// non-positive signed volume.
    pub flipped: Vec<usize>,
    pub aspect_ratio_histogram: Histogram,
}

pub fn mesh_report(mesh: &Mesh) -> CliResult<MeshReport> {
    let flipped = match mesh.kind() {
        CellKind::Hex | CellKind::Quad => detect_flipped_hex(mesh, 10)?,
        _ => (0..mesh.num_cells()).filter(|&c| mesh.signed_cell_measure(c) <= 0.0).collect(),
    };
    let ratios: Vec<f64> = (0..mesh.num_cells()).map(|c| element_aspect_ratio(&mesh.cell_vertices(c))).collect();
    Ok(MeshReport {
        stats: mesh_stats(mesh),
        flipped,
        aspect_ratio_histogram: aspect_ratio_histogram(&ratios),
    })
}
