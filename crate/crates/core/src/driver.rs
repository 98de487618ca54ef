//! End-to-end pipeline: build spaces, assemble, solve, measure.

use std::sync::Arc;

use crate::assembly::{
    apply_dirichlet, assemble_linear_elasticity, assemble_mixed_incompressible, assemble_neumann, assemble_poisson,
    assemble_rhs, assemble_stokes, default_rule, dirichlet_values, mass_matrix, LinearSystem, NeoHookean,
    NeoHookeanProblem,
};
use crate::basis::{build_space, spline_space, Discretization, FESpace, Family};
use crate::error::{FemError, Result};
use crate::mesh::{mesh_stats, Mesh};
use crate::postprocess::{error_norms, peak_memory_bytes, Phase, RunRecord, Stopwatch};
use crate::problems::{Pde, ProblemDefinition};
use crate::quadrature::{gauss_rule, QuadratureRule};
use crate::solve::{
    newmark_initial_acceleration, newmark_step, newton_solve, solve_linear, DynamicState, NewmarkSystem, NewtonTrace,
    SolverConfig,
};
use crate::sparse::CsrMatrix;

/// Output of [`run_problem`].
#[derive(Debug)]
pub struct Solution {
    pub space: FESpace,
    /// Primary coefficients (displacement, velocity or scalar field).
    pub u: Vec<f64>,
    pub pressure_space: Option<FESpace>,
    pub pressure: Option<Vec<f64>>,
    pub record: RunRecord,
    pub newton: Option<NewtonTrace>,
    /// States after every time step of a dynamic run.
    pub history: Vec<DynamicState>,
}

pub fn make_space(mesh: Arc<Mesh>, family: Family, components: usize) -> Result<FESpace> {
    if family == Family::Spline2 {
        spline_space(mesh, components)
    } else {
        build_space(mesh, Discretization::new(family), components)
    }
}

fn external_load(problem: &ProblemDefinition, space: &FESpace, rule: &QuadratureRule) -> Result<Vec<f64>> {
    let mut f = match &problem.body_force {
        Some(b) => assemble_rhs(space, rule, |x| b(x)),
        None => vec![0.0; space.num_dofs()],
    };
    for n in &problem.neumann {
        let t = assemble_neumann(space, n.tag, |x| (n.traction)(x))?;
        f.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
    }
    Ok(f)
}

struct LinearDynamics {
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    load: Vec<f64>,
    constrained: Vec<usize>,
}

impl NewmarkSystem for LinearDynamics {
    fn mass(&self) -> &CsrMatrix {
        &self.mass
    }
    fn internal_force(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.stiffness.matvec(u))
    }
    fn stiffness(&self, _: &[f64]) -> Result<CsrMatrix> {
        Ok(self.stiffness.clone())
    }
    fn external_force(&self, _: f64) -> Vec<f64> {
        self.load.clone()
    }
    fn constrained(&self) -> &[usize] {
        &self.constrained
    }
    fn is_linear(&self) -> bool {
        true
    }
}

/// Solves `problem` on `mesh` with `family` for the primary field (the
/// pressure uses the linear partner family).
pub fn run_problem(
    problem: &ProblemDefinition,
    mesh: Arc<Mesh>,
    family: Family,
    quadrature_degree: Option<usize>,
    solver: &SolverConfig,
) -> Result<Solution> {
    problem.validate()?;
    solver.validate()?;
    let watch = Stopwatch::new();
    let dim = mesh.dim();
    let components = if problem.pde.is_vector() { dim } else { 1 };
    let (space, pressure_space) = watch.time(Phase::Basis, || {
        let s = make_space(mesh.clone(), family, components)?;
        let p = if problem.pde.is_mixed() {
            Some(make_space(mesh.clone(), family.linear_partner(), 1)?)
        } else {
            None
        };
        Ok((s, p))
    })?;
    let rule = match quadrature_degree {
        Some(d) => gauss_rule(mesh.kind().into(), d)?,
        None => default_rule(&space)?,
    };
    let n = space.num_dofs();
    let mut newton = None;
    let mut history = Vec::new();
    let mut pressure = None;
    let (u, nnz) = match problem.pde {
        Pde::Poisson | Pde::LinearElasticity => {
            let (mut sys, mass) = watch.time(Phase::Assembly, || {
                let k = if problem.pde == Pde::Poisson {
                    assemble_poisson(&space, &rule)?
                } else {
                    assemble_linear_elasticity(&space, &problem.material, &rule)?
                };
                let f = external_load(problem, &space, &rule)?;
                let m = match problem.dynamics {
                    Some(_) => Some(mass_matrix(&space, &rule)?),
                    None => None,
                };
                Ok((LinearSystem::new(k, f), m))
            })?;
            let nnz = sys.matrix.nnz();
            let u = watch.time(Phase::Solve, || {
                let bc = dirichlet_values(&space, &problem.dirichlet, 1.0)?;
                match (problem.dynamics, mass) {
                    (Some(dynamics), Some(mass)) => {
                        if bc.iter().any(|&(_, g)| g != 0.0) {
                            return Err(FemError::InvalidArgument(
                                "dynamic runs support homogeneous Dirichlet data only".into(),
                            ));
                        }
                        let sys_dyn = LinearDynamics {
                            mass,
                            stiffness: sys.matrix.clone(),
                            load: sys.rhs.clone(),
                            constrained: bc.iter().map(|b| b.0).collect(),
                        };
                        let u0 = vec![0.0; n];
                        let a0 = newmark_initial_acceleration(&sys_dyn, &u0, 0.0, solver)?;
                        let mut state = DynamicState::new(u0, vec![0.0; n], a0, 0.0)?;
                        let dt = dynamics.t_end / dynamics.steps as f64;
                        for _ in 0..dynamics.steps {
                            state = newmark_step(&sys_dyn, &state, dt, solver)?;
                            history.push(state.clone());
                        }
                        Ok(state.u)
                    }
                    _ => {
                        apply_dirichlet(&mut sys, &bc)?;
                        solve_linear(&sys.matrix, &sys.rhs, solver)
                    }
                }
            })?;
            (u, nnz)
        }
        Pde::Stokes | Pde::MixedIncompressible => {
            let ps = pressure_space.as_ref().expect("mixed problems build a pressure space");
            let mut sys = watch.time(Phase::Assembly, || {
                let mut sys = if problem.pde == Pde::Stokes {
                    assemble_stokes(&space, ps, problem.viscosity, &rule)?
                } else {
                    assemble_mixed_incompressible(&space, ps, &problem.material, &rule)?
                };
                let f = external_load(problem, &space, &rule)?;
                sys.rhs[..n].copy_from_slice(&f);
                Ok(sys)
            })?;
            let nnz = sys.matrix.nnz();
            // enclosed flow: pressure is fixed only up to a constant
            let pin = problem.pde == Pde::Stokes && problem.neumann.is_empty();
            let x = watch.time(Phase::Solve, || {
                let mut bc = dirichlet_values(&space, &problem.dirichlet, 1.0)?;
                if pin {
                    bc.push((n, 0.0));
                }
                apply_dirichlet(&mut sys, &bc)?;
                solve_linear(&sys.matrix, &sys.rhs, solver)
            })?;
            let mut p = x[n..].to_vec();
            if pin {
                let m = mass_matrix(ps, &rule)?;
                let ones = vec![1.0; p.len()];
                let m1 = m.matvec(&ones);
                let mean = m1.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>() / m1.iter().sum::<f64>();
                p.iter_mut().for_each(|v| *v -= mean);
            }
            pressure = Some(p);
            (x[..n].to_vec(), nnz)
        }
        Pde::NeoHookean => {
            let (prob, nnz) = watch.time(Phase::Assembly, || {
                let model = NeoHookean::new(&space, &problem.material, &rule)?;
                let f = external_load(problem, &space, &rule)?;
                let nnz = CsrMatrix::pattern(&space, &space).nnz();
                Ok((NeoHookeanProblem::new(model, f, problem.dirichlet.clone())?, nnz))
            })?;
            let config = SolverConfig {
                load_steps: problem.load_steps,
                ..solver.clone()
            };
            let (u, trace) = watch.time(Phase::Solve, || newton_solve(&prob, &vec![0.0; n], &config))?;
            newton = Some(trace);
            (u, nnz)
        }
    };
    let errors = match &problem.exact {
        Some(exact) => Some(error_norms(&space, &u, exact, &rule)?),
        None => None,
    };
    let record = RunRecord {
        problem: problem.name.clone(),
        family: family.to_string(),
        num_dofs: n + pressure_space.as_ref().map_or(0, FESpace::num_dofs),
        matrix_nnz: nnz,
        mesh_stats: mesh_stats(&mesh),
        errors,
        timings: watch.timings(),
        peak_memory: peak_memory_bytes(),
    };
    Ok(Solution {
        space,
        u,
        pressure_space,
        pressure,
        record,
        newton,
        history,
    })
}
