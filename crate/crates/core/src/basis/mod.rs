//! Reference elements, geometric maps and global DOF numbering.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::mesh::{CellKind, Point};

pub mod geometry;
pub mod lagrange;
mod space;
pub mod spline;

pub use space::{build_space, spline_space, CellEvaluator, CellValues, FESpace, FacetValues};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    P1,
    P2,
    Q1,
    Q2,
    #[serde(rename = "SER2")]
    Ser2,
    #[serde(rename = "SPLINE2")]
    Spline2,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::P1,
        Family::P2,
        Family::Q1,
        Family::Q2,
        Family::Ser2,
        Family::Spline2,
    ];

    pub fn degree(self) -> usize {
        match self {
            Family::P1 | Family::Q1 => 1,
            _ => 2,
        }
    }

    pub fn is_simplicial(self) -> bool {
        matches!(self, Family::P1 | Family::P2)
    }

    pub fn supports(self, kind: CellKind) -> bool {
        self.is_simplicial() == kind.is_simplex()
    }

    /// The degree-1 family on the same cell shape (pressure space of a
    /// Taylor–Hood pair).
    pub fn linear_partner(self) -> Family {
        if self.is_simplicial() {
            Family::P1
        } else {
            Family::Q1
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::P1 => "P1",
            Family::P2 => "P2",
            Family::Q1 => "Q1",
            Family::Q2 => "Q2",
            Family::Ser2 => "SER2",
            Family::Spline2 => "SPLINE2",
        })
    }
}

impl FromStr for Family {
    type Err = FemError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| FemError::InvalidArgument(format!("unknown family {s:?}")))
    }
}

/// Basis family plus geometric map degree (always 1: straight-edged cells).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discretization {
    pub family: Family,
    pub geometric_map_degree: usize,
}

impl Discretization {
    pub fn new(family: Family) -> Self {
        Discretization {
            family,
            geometric_map_degree: 1,
        }
    }
}

fn check_pair(family: Family, kind: CellKind) -> Result<()> {
    if family.supports(kind) {
        Ok(())
    } else {
        Err(FemError::IncompatibleDiscretization(format!(
            "{family} is not defined on {kind:?} cells"
        )))
    }
}

/// Reference shape function values at `xi`.
pub fn shape_values(family: Family, kind: CellKind, xi: Point) -> Result<Vec<f64>> {
    check_pair(family, kind)?;
    let n = lagrange::local_size(family, kind);
    let mut v = vec![0.0; n];
    let mut g = vec![[0.0; 3]; n];
    lagrange::evaluate(family, kind, xi, &mut v, &mut g);
    Ok(v)
}

/// Reference gradients at `xi`, one row of `dim` entries per shape function.
pub fn shape_gradients(family: Family, kind: CellKind, xi: Point) -> Result<Vec<Vec<f64>>> {
    check_pair(family, kind)?;
    let n = lagrange::local_size(family, kind);
    let mut v = vec![0.0; n];
    let mut g = vec![[0.0; 3]; n];
    lagrange::evaluate(family, kind, xi, &mut v, &mut g);
    Ok(g.into_iter().map(|r| r[..kind.dim()].to_vec()).collect())
}
