//! Weak-form assembly, loads, Dirichlet elimination and the Neo-Hookean
//! energy.
//!
//! Matrices are assembled into a CSR pattern built from the space's cell
//! DOF lists, visiting cells in index order, so results are bitwise
//! reproducible.

use std::fmt;
use std::sync::Arc;

use crate::mesh::Point;
use crate::sparse::CsrMatrix;

mod dirichlet;
mod forms;
mod loads;
mod material;
mod neo_hookean;

pub use dirichlet::{apply_dirichlet, dirichlet_values, DirichletSpec};
pub use forms::{
    assemble_linear_elasticity, assemble_mixed_incompressible, assemble_poisson, assemble_stokes, default_rule,
    mass_matrix,
};
pub use loads::{assemble_neumann, assemble_rhs};
pub use material::{elasticity_tensor, voigt_index, voigt_size, MaterialModel, MaterialParams, OrthotropicConstants};
pub use neo_hookean::{NeoHookean, NeoHookeanProblem};

/// Vector-valued function of position.
pub type VectorFn = Arc<dyn Fn(Point) -> Vec<f64> + Send + Sync>;

/// Sizes of the two blocks of a mixed system, primary unknowns first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    pub primary: usize,
    pub pressure: usize,
}

#[derive(Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub blocks: Option<BlockStructure>,
}

impl LinearSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>) -> Self {
        assert_eq!(matrix.nrows(), rhs.len());
        LinearSystem {
            matrix,
            rhs,
            blocks: None,
        }
    }
}

impl fmt::Debug for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearSystem")
            .field("n", &self.matrix.nrows())
            .field("nnz", &self.matrix.nnz())
            .field("blocks", &self.blocks)
            .finish()
    }
}
