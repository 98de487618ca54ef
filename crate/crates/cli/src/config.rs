//! JSON job description.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fembench::assembly::{DirichletSpec, MaterialParams};
use fembench::basis::Family;
use fembench::mesh::{generate_box_grid, generate_l_shape, load_mesh, uniform_refine, CellKind, Mesh, MeshFormat, Point};
use fembench::problems::{builtin_problem, Pde, PresetParams, ProblemDefinition};
use fembench::solve::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub problem: ProblemSpec,
    /// Omitted for presets that generate their own mesh.
    #[serde(default)]
    pub mesh: Option<MeshSource>,
    pub family: Family,
    #[serde(default)]
    pub quadrature_degree: Option<usize>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Preset {
        name: String,
        #[serde(default)]
        params: PresetParams,
    },
    Custom(CustomProblem),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProblem {
    #[serde(default = "custom_name")]
    pub name: String,
    pub pde: Pde,
    pub material: MaterialParams,
    #[serde(default = "unit")]
    pub viscosity: f64,
    #[serde(default)]
    pub dirichlet: Vec<DirichletBc>,
    #[serde(default)]
    pub neumann: Vec<NeumannBc>,
    #[serde(default)]
    pub body_force: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub load_steps: usize,
}

fn custom_name() -> String {
    "custom".into()
}

fn unit() -> f64 {
    1.0
}

fn one() -> usize {
    1
}

/// Constant displacement/velocity on a tagged boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletBc {
    pub tag: i32,
    pub value: Vec<f64>,
    /// Constrained components; all when omitted.
    #[serde(default)]
    pub components: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeumannBc {
    pub tag: i32,
    pub traction: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSource {
    File(PathBuf),
    Generate(GeneratorSpec),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Box {
        kind: CellKind,
        lower: Point,
        upper: Point,
        resolution: [usize; 3],
    },
    LShape {
        kind: CellKind,
        size: f64,
        thickness: f64,
        /// Target edge length.
        resolution: f64,
    },
}

impl GeneratorSpec {
    /// The same shape with every cell split `2^level` times per axis.
    fn refined(&self, level: u32) -> GeneratorSpec {
        let f = 1usize << level;
        match self.clone() {
            GeneratorSpec::Box {
                kind,
                lower,
                upper,
                resolution,
            } => GeneratorSpec::Box {
                kind,
                lower,
                upper,
                resolution: resolution.map(|r| r * f),
            },
            GeneratorSpec::LShape {
                kind,
                size,
                thickness,
                resolution,
            } => GeneratorSpec::LShape {
                kind,
                size,
                thickness,
                resolution: resolution / f as f64,
            },
        }
    }

    fn build(&self) -> CliResult<Mesh> {
        Ok(match *self {
            GeneratorSpec::Box {
                kind,
                lower,
                upper,
                resolution,
            } => generate_box_grid(lower, upper, resolution, kind)?,
            GeneratorSpec::LShape {
                kind,
                size,
                thickness,
                resolution,
            } => generate_l_shape(size, thickness, resolution, kind)?,
        })
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// RunRecord (run) or sweep summary (converge) as JSON.
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    /// Legacy VTK field dump (run only).
    pub vtk: Option<PathBuf>,
}

impl JobConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let c: JobConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if matches!(c.problem, ProblemSpec::Custom(_)) && c.mesh.is_none() {
            return Err(CliError::Config("custom problems need a mesh source".into()));
        }
        Ok(c)
    }

    /// Problem and mesh for refinement `level` (0 is the configured mesh).
    /// Generated meshes are regenerated finer; files and preset meshes
    /// without an explicit resolution are refined uniformly.
    pub fn build(&self, level: u32) -> CliResult<(ProblemDefinition, Mesh)> {
        let mut problem = match &self.problem {
            ProblemSpec::Preset { name, params } => {
                let mut params = params.clone();
                let regenerate = self.mesh.is_none() && params.resolution.is_some();
                if regenerate {
                    params.resolution = params.resolution.map(|r| r.map(|n| n << level));
                }
                let mut p = builtin_problem(name, &params)?;
                if self.mesh.is_none() {
                    let mut mesh = p.mesh.take().expect("generated presets carry a mesh");
                    if !regenerate {
                        for _ in 0..level {
                            mesh = uniform_refine(&mesh)?;
                        }
                    }
                    return Ok((p, mesh));
                }
                p
            }
            ProblemSpec::Custom(c) => c.definition(),
        };
        let mesh = match self.mesh.as_ref().expect("checked at parse time") {
            MeshSource::Generate(g) => g.refined(level).build()?,
            MeshSource::File(path) => {
                let format = MeshFormat::from_path(path)
                    .ok_or_else(|| CliError::Config(format!("unknown mesh format for {}", path.display())))?;
                let mut mesh = load_mesh(path, format)?;
                for _ in 0..level {
                    mesh = uniform_refine(&mesh)?;
                }
                mesh
            }
        };
        problem.mesh = None;
        Ok((problem, mesh))
    }
}

impl CustomProblem {
    fn definition(&self) -> ProblemDefinition {
        let mut p = ProblemDefinition::new(&self.name, self.pde, self.material);
        p.viscosity = self.viscosity;
        p.load_steps = self.load_steps;
        for bc in &self.dirichlet {
            let value = bc.value.clone();
            let mut spec = DirichletSpec::new(bc.tag, move |_| value.clone());
            if let Some(c) = &bc.components {
                spec = spec.only(c);
            }
            p.dirichlet.push(spec);
        }
        for n in &self.neumann {
            p = p.with_traction(n.tag, n.traction.clone());
        }
        if let Some(b) = self.body_force.clone() {
            p.body_force = Some(Arc::new(move |_| b.clone()));
        }
        p
    }
}
