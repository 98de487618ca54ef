use std::path::PathBuf;

use thiserror::Error;

use crate::mesh::CellKind;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mixed cell kinds are not supported ({0:?} and {1:?})")]
    MixedCellKinds(CellKind, CellKind),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("incompatible discretization: {0}")]
    IncompatibleDiscretization(String),

    #[error("unsupported quadrature degree {degree} (supported 1..={max})")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown boundary tag {0}")]
    UnknownTag(i32),

    #[error("conflicting dirichlet values on dof {dof}: {first} vs {second}")]
    ConflictingDirichlet { dof: usize, first: f64, second: f64 },

    #[error("element {cell} inverted (det F = {det_f:e})")]
    ElementInverted { cell: usize, det_f: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("line search exhausted after {halvings} halvings")]
    LineSearchExhausted { halvings: usize },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("point {0:?} lies outside the mesh")]
    PointOutsideMesh([f64; 3]),

    #[error("timing: {0}")]
    Timing(String),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

pub type Result<T, E = FemError> = std::result::Result<T, E>;
