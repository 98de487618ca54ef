use std::path::PathBuf;

use fembench::FemError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Fem(#[from] FemError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 numerical failure, 2 configuration error, 3 IO error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Fem(e) => match e {
                FemError::Io { .. } | FemError::Parse { .. } | FemError::InvalidMesh(_) | FemError::MixedCellKinds(..) => 3,
                FemError::IncompatibleDiscretization(_)
                | FemError::UnsupportedDegree { .. }
                | FemError::InvalidArgument(_)
                | FemError::UnknownTag(_)
                | FemError::ConflictingDirichlet { .. }
                | FemError::InvalidMaterial(_)
                | FemError::UnknownPreset(_) => 2,
                FemError::Degenerate(_)
                | FemError::ElementInverted { .. }
                | FemError::Singular(_)
                | FemError::NotConverged { .. }
                | FemError::LineSearchExhausted { .. }
                | FemError::PointOutsideMesh(_)
                | FemError::Timing(_) => 1,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "numerical",
            2 => "configuration",
            _ => "io",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        serde_json::to_string(&Report {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("error report serializes")
    }
}

pub type CliResult<T> = Result<T, CliError>;
