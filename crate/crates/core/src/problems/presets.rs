//! Built-in benchmark problems.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Dynamics, ManufacturedSolution, Pde, ProblemDefinition};
use crate::assembly::{DirichletSpec, MaterialParams, OrthotropicConstants};
use crate::error::{FemError, Result};
use crate::mesh::{generate_box_grid, generate_l_shape, load_mesh, CellKind, LShapeTag, Mesh, MeshFormat, Point};

pub const PRESETS: &[&str] = &[
    "poisson_franke",
    "elasticity_polynomial",
    "patch_poisson",
    "patch_elasticity",
    "driven_cavity",
    "hanging_square",
    "square_beam",
    "ortho_beam",
    "incompressible_square",
    "torsion_beam",
    "l_shape",
    "plate_hole",
];

/// Optional overrides for a preset; unset fields take the preset defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PresetParams {
    /// Cell kind of the generated mesh.
    pub kind: Option<CellKind>,
    /// Cells per axis of the generated mesh.
    pub resolution: Option<[usize; 3]>,
    /// User mesh (required by `plate_hole`).
    pub mesh_file: Option<PathBuf>,
    pub nu: Option<f64>,
    /// Magnitude of the beam end force.
    pub force: Option<f64>,
    /// Beam cross-section height.
    pub height: Option<f64>,
    /// `incompressible_square`: mixed form (default) or pure displacement.
    pub mixed: Option<bool>,
    pub load_steps: Option<usize>,
}

/// Displacement of `x` under a rotation by `angle` about the axis through
/// `center` along coordinate `axis`.
pub fn rotation_about(x: Point, center: Point, axis: usize, angle: f64) -> [f64; 3] {
    let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
    let (c, s) = (angle.cos(), angle.sin());
    let (a, b) = (x[i] - center[i], x[j] - center[j]);
    let mut u = [0.0; 3];
    u[i] = c * a - s * b - a;
    u[j] = s * a + c * b - b;
    u
}

fn kind_or(params: &PresetParams, default: CellKind, dim: usize) -> Result<CellKind> {
    let k = params.kind.unwrap_or(default);
    if k.dim() != dim {
        return Err(FemError::InvalidArgument(format!("preset needs a {dim}D cell kind, got {k:?}")));
    }
    Ok(k)
}

fn resolution_or(params: &PresetParams, default: [usize; 3]) -> [usize; 3] {
    params.resolution.unwrap_or(default)
}

fn unit_square(params: &PresetParams, n: usize) -> Result<Mesh> {
    let kind = kind_or(params, CellKind::Quad, 2)?;
    let r = resolution_or(params, [n, n, 1]);
    generate_box_grid([0.0; 3], [1.0, 1.0, 0.0], [r[0], r[1], 1], kind)
}

fn unit_cube(params: &PresetParams, n: usize) -> Result<Mesh> {
    let kind = params.kind.unwrap_or(CellKind::Hex);
    let r = resolution_or(params, [n; 3]);
    let upper = if kind.dim() == 3 { [1.0; 3] } else { [1.0, 1.0, 0.0] };
    generate_box_grid([0.0; 3], upper, r, kind)
}

fn all_tags(dim: usize) -> Vec<i32> {
    (1..=2 * dim as i32).collect()
}

fn beam(name: &str, params: &PresetParams, material: MaterialParams) -> Result<ProblemDefinition> {
    let h = params.height.unwrap_or(20.0);
    let kind = kind_or(params, CellKind::Hex, 3)?;
    let r = resolution_or(params, [4, 4, 20]);
    let mesh = generate_box_grid([-10.0, -h / 2.0, 0.0], [10.0, h / 2.0, 100.0], r, kind)?;
    let force = params.force.unwrap_or(1.0);
    let area = 20.0 * h;
    // fixed at z = L, end force distributed over z = 0
    let mut p = ProblemDefinition::new(name, Pde::LinearElasticity, material).with_traction(5, vec![0.0, -force / area, 0.0]);
    p.dirichlet.push(DirichletSpec::zero(6));
    p.mesh = Some(mesh);
    Ok(p)
}

/// Builds preset `name`.
pub fn builtin_problem(name: &str, params: &PresetParams) -> Result<ProblemDefinition> {
    let mut p = match name {
        "poisson_franke" => {
            let mesh = unit_cube(params, 4)?;
            let tags = all_tags(mesh.dim());
            let mut p = ProblemDefinition::manufactured(
                name,
                Pde::Poisson,
                MaterialParams::hooke(1.0, 0.0),
                super::franke_solution()?,
                &tags,
            )?;
            p.mesh = Some(mesh);
            p
        }
        "elasticity_polynomial" => {
            let mesh = unit_cube(params, 4)?;
            if mesh.dim() != 3 {
                return Err(FemError::InvalidArgument("elasticity_polynomial is a 3D problem".into()));
            }
            let (sol, mat, _) = super::elasticity_manufactured()?;
            let mut p = ProblemDefinition::manufactured(name, Pde::LinearElasticity, mat, sol, &all_tags(3))?;
            p.mesh = Some(mesh);
            p
        }
        "patch_poisson" | "patch_elasticity" => {
            let mesh = unit_cube(params, 3)?;
            let dim = mesh.dim();
            let (pde, sol) = if name == "patch_poisson" {
                let s = ManufacturedSolution::affine(dim, vec![0.5], vec![[1.0, -2.0, 0.75]])?;
                (Pde::Poisson, s)
            } else {
                let offsets = vec![0.1, -0.2, 0.3][..dim].to_vec();
                let slopes = vec![[0.01, 0.02, -0.03], [-0.02, 0.015, 0.01], [0.005, -0.01, 0.02]][..dim].to_vec();
                (Pde::LinearElasticity, ManufacturedSolution::affine(dim, offsets, slopes)?)
            };
            let mut p = ProblemDefinition::manufactured(name, pde, MaterialParams::hooke(200.0, 0.35), sol, &all_tags(dim))?;
            p.mesh = Some(mesh);
            p
        }
        "driven_cavity" => {
            let mesh = unit_square(params, 64)?;
            let mut p = ProblemDefinition::new(name, Pde::Stokes, MaterialParams::hooke(1.0, 0.0));
            p.viscosity = 1.0;
            // the whole closed left side moves, corners included
            let lid = |x: Point| vec![0.0, if x[0] < 1e-12 { 0.25 } else { 0.0 }];
            for t in 1..=4 {
                p.dirichlet.push(DirichletSpec::new(t, lid));
            }
            p.mesh = Some(mesh);
            p
        }
        "hanging_square" => {
            let mesh = unit_square(params, 8)?;
            let mut p = ProblemDefinition::new(name, Pde::LinearElasticity, MaterialParams::hooke(200.0, 0.35));
            p.body_force = Some(Arc::new(|_| vec![0.0, -20.0]));
            p.dirichlet.push(DirichletSpec::zero(4));
            p.dynamics = Some(Dynamics { t_end: 0.5, steps: 40 });
            p.mesh = Some(mesh);
            p
        }
        "square_beam" => beam(name, params, MaterialParams::hooke(210_000.0, 0.3))?,
        "ortho_beam" => beam(name, params, MaterialParams::orthotropic(OrthotropicConstants::carbon_fiber()))?,
        "incompressible_square" => {
            let mesh = unit_square(params, 64)?;
            let nu = params.nu.unwrap_or(0.9999);
            let pde = if params.mixed.unwrap_or(true) {
                Pde::MixedIncompressible
            } else {
                Pde::LinearElasticity
            };
            let mut p = ProblemDefinition::new(name, pde, MaterialParams::hooke(0.1, nu));
            p.dirichlet.push(DirichletSpec::new(1, |_| vec![0.2, 0.0]));
            p.dirichlet.push(DirichletSpec::new(2, |_| vec![-0.2, 0.0]));
            p.mesh = Some(mesh);
            p
        }
        "torsion_beam" => {
            let kind = kind_or(params, CellKind::Hex, 3)?;
            let r = resolution_or(params, [4, 4, 29]);
            let mesh = generate_box_grid([-10.0, -10.0, 0.0], [10.0, 10.0, 100.0], r, kind)?;
            let mut p = ProblemDefinition::new(name, Pde::NeoHookean, MaterialParams::neo_hookean(200.0, 0.35));
            p.dirichlet.push(DirichletSpec::zero(5));
            p.dirichlet.push(DirichletSpec::scheduled(6, |x, s| {
                rotation_about(x, [0.0; 3], 2, s * std::f64::consts::FRAC_PI_2).to_vec()
            }));
            p.load_steps = 5;
            p.mesh = Some(mesh);
            p
        }
        "l_shape" => {
            let kind = kind_or(params, CellKind::Hex, 3)?;
            let (size, thickness) = (2.0, 1.0);
            let res = params.resolution.map_or(0.25, |r| thickness / r[0] as f64);
            let mesh = generate_l_shape(size, thickness, res, kind)?;
            let mut p = ProblemDefinition::new(name, Pde::NeoHookean, MaterialParams::neo_hookean(210_000.0, 0.3));
            p.dirichlet.push(DirichletSpec::zero(LShapeTag::Bottom as i32));
            let center = [thickness / 2.0, size, thickness / 2.0];
            p.dirichlet.push(DirichletSpec::scheduled(LShapeTag::Top as i32, move |x, s| {
                rotation_about(x, center, 1, s * 120f64.to_radians()).to_vec()
            }));
            p.load_steps = params.load_steps.unwrap_or(5);
            p.mesh = Some(mesh);
            p
        }
        "plate_hole" => {
            let path = params
                .mesh_file
                .as_ref()
                .ok_or_else(|| FemError::InvalidArgument("plate_hole needs a mesh_file".into()))?;
            let format = MeshFormat::from_path(path)
                .ok_or_else(|| FemError::InvalidArgument(format!("unknown mesh format for {}", path.display())))?;
            let mesh = load_mesh(path, format)?;
            let nu = params.nu.unwrap_or(0.3);
            // quarter model: tag 1 is the x-symmetry edge, tag 2 the
            // y-symmetry edge, tag 3 the loaded edge
            let mut p = ProblemDefinition::new(name, Pde::LinearElasticity, MaterialParams::hooke(210_000.0, nu))
                .with_traction(3, vec![100.0, 0.0]);
            p.dirichlet.push(DirichletSpec::zero(1).only(&[0]));
            p.dirichlet.push(DirichletSpec::zero(2).only(&[1]));
            p.mesh = Some(mesh);
            p
        }
        other => return Err(FemError::UnknownPreset(other.to_string())),
    };
    if let Some(n) = params.load_steps {
        p.load_steps = n;
    }
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::dirichlet_values;
    use crate::basis::{build_space, Discretization, Family};

    #[test]
    fn every_preset_builds_except_file_based() {
        for name in PRESETS {
            let r = builtin_problem(name, &PresetParams::default());
            if *name == "plate_hole" {
                assert!(r.is_err());
            } else {
                let p = r.unwrap();
                assert!(p.mesh.is_some(), "{name}");
                p.validate().unwrap();
            }
        }
        assert!(matches!(
            builtin_problem("nope", &PresetParams::default()),
            Err(FemError::UnknownPreset(_))
        ));
    }

    #[test]
    fn cavity_lid_is_tangential() {
        let p = builtin_problem("driven_cavity", &PresetParams::default()).unwrap();
        let tags: Vec<i32> = p.dirichlet.iter().map(|d| d.tag).collect();
        assert_eq!(tags, vec![1, 2, 3, 4]);
        assert_eq!(p.dirichlet[0].eval([0.0, 0.5, 0.0], 1.0), vec![0.0, 0.25]);
        // corner nodes agree between the lid and the walls
        assert_eq!(p.dirichlet[3].eval([0.0, 1.0, 0.0], 1.0), vec![0.0, 0.25]);
        assert_eq!(p.dirichlet[3].eval([0.5, 1.0, 0.0], 1.0), vec![0.0, 0.0]);
    }

    #[test]
    fn torsion_schedule_endpoints() {
        let p = builtin_problem("torsion_beam", &PresetParams::default()).unwrap();
        assert_eq!(p.load_steps, 5);
        let top = &p.dirichlet[1];
        let x = [7.0, -3.0, 100.0];
        assert!(top.eval(x, 0.0).iter().all(|v| v.abs() < 1e-15));
        let u = top.eval(x, 1.0);
        // 90° about z: (x, y) → (−y, x)
        assert!((x[0] + u[0] - 3.0).abs() < 1e-12 && (x[1] + u[1] - 7.0).abs() < 1e-12 && u[2] == 0.0);
        let mid = top.eval(x, 0.5);
        let want = rotation_about(x, [0.0; 3], 2, std::f64::consts::FRAC_PI_4);
        assert!((0..3).all(|k| (mid[k] - want[k]).abs() < 1e-14));
        let mesh = std::sync::Arc::new(p.mesh.unwrap());
        assert_eq!(mesh.num_vertices(), 750);
        let s = build_space(mesh, Discretization::new(Family::Q1), 3).unwrap();
        assert!(dirichlet_values(&s, &p.dirichlet, 1.0).is_ok());
    }

    #[test]
    fn incompressible_lambda() {
        let p = builtin_problem("incompressible_square", &PresetParams::default()).unwrap();
        let l = p.material.lambda(2);
        assert!((l - 0.9999 * 0.1 / (1.0 - 0.9999f64.powi(2))).abs() < 1e-12);
        assert!((l - 499.96).abs() < 0.05);
        assert_eq!(p.mesh.unwrap().num_vertices(), 4225);
    }

    #[test]
    fn beam_traction_totals_force() {
        let p = builtin_problem(
            "square_beam",
            &PresetParams {
                force: Some(2.0),
                ..Default::default()
            },
        )
        .unwrap();
        let t = (p.neumann[0].traction)([0.0; 3]);
        assert!((t[1] * 400.0 + 2.0).abs() < 1e-14);
    }

    #[test]
    fn disjoint_tags_enforced() {
        let mut p = builtin_problem("square_beam", &PresetParams::default()).unwrap();
        p.dirichlet.push(DirichletSpec::zero(5));
        assert!(p.validate().is_err());
    }
}
