use std::path::Path;
use std::sync::Arc;

use fembench::driver::{run_problem, Solution};
use fembench::mesh::{load_mesh, MeshFormat};
use fembench::postprocess::{fitted_rate, RunRecord};
use serde::{Deserialize, Serialize};

use crate::config::JobConfig;
use crate::error::{CliError, CliResult};
use crate::output::{mesh_report, solution_vtk, write_csv, write_file, MeshReport};

fn solve_level(config: &JobConfig, level: u32) -> CliResult<(Solution, fembench::problems::ProblemDefinition)> {
    let (problem, mesh) = config.build(level)?;
    let s = run_problem(&problem, Arc::new(mesh), config.family, config.quadrature_degree, &config.solver)?;
    Ok((s, problem))
}

pub fn run(config: &JobConfig) -> CliResult<RunRecord> {
    let (s, problem) = solve_level(config, 0)?;
    if let Some(path) = &config.output.vtk {
        write_file(path, &solution_vtk(&s, problem.pde, &problem.material)?)?;
    }
    if let Some(path) = &config.output.csv {
        write_csv(path, std::slice::from_ref(&s.record))?;
    }
    if let Some(path) = &config.output.json {
        write_file(path, &serde_json::to_string_pretty(&s.record).expect("records serialize"))?;
    }
    Ok(s.record)
}

/// Least-squares slopes of each error norm against the average edge length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub l2: f64,
    pub h1: f64,
    pub h1_semi: f64,
    pub linf: f64,
    pub linf_grad: f64,
    pub l8: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub problem: String,
    pub family: String,
    pub avg_edge: Vec<f64>,
    pub rates: Rates,
    pub records: Vec<RunRecord>,
}

pub fn converge(config: &JobConfig, levels: usize) -> CliResult<ConvergenceSummary> {
    if levels < 2 {
        return Err(CliError::Config("a convergence sweep needs at least 2 levels".into()));
    }
    let mut records = Vec::with_capacity(levels);
    for level in 0..levels {
        let (s, _) = solve_level(config, level as u32)?;
        if s.record.errors.is_none() {
            return Err(CliError::Config(format!("problem {} has no exact solution", s.record.problem)));
        }
        records.push(s.record);
    }
    let h: Vec<f64> = records.iter().map(|r| r.mesh_stats.avg_edge_length).collect();
    let rate = |f: fn(&fembench::postprocess::ErrorReport) -> f64| {
        let e: Vec<f64> = records.iter().map(|r| f(r.errors.as_ref().expect("checked above"))).collect();
        fitted_rate(&h, &e)
    };
    let rates = Rates {
        l2: rate(|e| e.l2),
        h1: rate(|e| e.h1),
        h1_semi: rate(|e| e.h1_semi),
        linf: rate(|e| e.linf),
        linf_grad: rate(|e| e.linf_grad),
        l8: rate(|e| e.l8),
    };
    if let Some(path) = &config.output.csv {
        write_csv(path, &records)?;
    }
    let summary = ConvergenceSummary {
        problem: records[0].problem.clone(),
        family: records[0].family.clone(),
        avg_edge: h,
        rates,
        records,
    };
    if let Some(path) = &config.output.json {
        write_file(path, &serde_json::to_string_pretty(&summary).expect("summaries serialize"))?;
    }
    Ok(summary)
}

pub fn mesh_stats(path: &Path) -> CliResult<MeshReport> {
    let format = MeshFormat::from_path(path)
        .ok_or_else(|| CliError::Config(format!("unknown mesh format for {}", path.display())))?;
    let mesh = load_mesh(path, format)?;
    mesh_report(&mesh)
}
