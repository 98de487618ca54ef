//! Manufactured solutions and benchmark problem presets.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assembly::{DirichletSpec, MaterialParams, VectorFn};
use crate::error::{FemError, Result};
use crate::mesh::Mesh;

mod manufactured;
mod presets;

pub use manufactured::{
    elasticity_manufactured, elasticity_polynomial, franke3d, franke_solution, manufactured_rhs, Hessian,
    ManufacturedSolution,
};
pub use manufactured::halton_points;
pub use presets::{builtin_problem, rotation_about, PresetParams, PRESETS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pde {
    Poisson,
    LinearElasticity,
    Stokes,
    MixedIncompressible,
    NeoHookean,
}

impl Pde {
    /// Whether the primary unknown is a vector field.
    pub fn is_vector(self) -> bool {
        self != Pde::Poisson
    }

    pub fn is_mixed(self) -> bool {
        matches!(self, Pde::Stokes | Pde::MixedIncompressible)
    }
}

#[derive(Clone)]
pub struct NeumannSpec {
    pub tag: i32,
    pub traction: VectorFn,
}

impl fmt::Debug for NeumannSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NeumannSpec(tag {})", self.tag)
    }
}

/// Time window for dynamic runs integrated with Newmark.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    pub t_end: f64,
    pub steps: usize,
}

/// Everything needed to pose one boundary-value problem.
#[derive(Clone)]
pub struct ProblemDefinition {
    pub name: String,
    pub pde: Pde,
    pub material: MaterialParams,
    /// Stokes viscosity.
    pub viscosity: f64,
    pub body_force: Option<VectorFn>,
    pub dirichlet: Vec<DirichletSpec>,
    pub neumann: Vec<NeumannSpec>,
    pub exact: Option<ManufacturedSolution>,
    pub load_steps: usize,
    pub dynamics: Option<Dynamics>,
    /// Mesh generated by the preset, if any.
    pub mesh: Option<Mesh>,
}

impl fmt::Debug for ProblemDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDefinition")
            .field("name", &self.name)
            .field("pde", &self.pde)
            .field("material", &self.material)
            .field("dirichlet", &self.dirichlet)
            .field("neumann", &self.neumann)
            .field("exact", &self.exact)
            .field("load_steps", &self.load_steps)
            .field("dynamics", &self.dynamics)
            .finish()
    }
}

impl ProblemDefinition {
    pub fn new(name: &str, pde: Pde, material: MaterialParams) -> Self {
        ProblemDefinition {
            name: name.to_string(),
            pde,
            material,
            viscosity: 1.0,
            body_force: None,
            dirichlet: Vec::new(),
            neumann: Vec::new(),
            exact: None,
            load_steps: 1,
            dynamics: None,
            mesh: None,
        }
    }

    /// Manufactured problem: body force from the PDE and Dirichlet data equal
    /// to the exact solution on every tag in `tags`.
    pub fn manufactured(
        name: &str,
        pde: Pde,
        material: MaterialParams,
        exact: ManufacturedSolution,
        tags: &[i32],
    ) -> Result<Self> {
        let mut p = ProblemDefinition::new(name, pde, material);
        p.body_force = Some(manufactured_rhs(pde, &exact, &material)?);
        for &t in tags {
            let e = exact.clone();
            p.dirichlet.push(DirichletSpec::new(t, move |x| e.value(x)));
        }
        p.exact = Some(exact);
        Ok(p)
    }

    pub fn with_traction(mut self, tag: i32, t: Vec<f64>) -> Self {
        self.neumann.push(NeumannSpec {
            tag,
            traction: Arc::new(move |_| t.clone()),
        });
        self
    }

    /// Dirichlet and Neumann tag sets must be disjoint.
    pub fn validate(&self) -> Result<()> {
        for n in &self.neumann {
            if self.dirichlet.iter().any(|d| d.tag == n.tag) {
                return Err(FemError::InvalidArgument(format!(
                    "tag {} carries both Dirichlet and Neumann conditions",
                    n.tag
                )));
            }
        }
        if self.load_steps == 0 {
            return Err(FemError::InvalidArgument("load_steps must be at least 1".into()));
        }
        Ok(())
    }
}
