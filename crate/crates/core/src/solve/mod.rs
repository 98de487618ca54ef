//! Linear solvers, Newton with incremental loading, Newmark time stepping.

use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};

mod linear;
mod newmark;
mod newton;

pub use linear::{solve_linear, Factorization};
pub use newmark::{newmark_initial_acceleration, newmark_step, DynamicState, NewmarkSystem};
pub use newton::{newton_solve, NewtonProblem, NewtonTrace, TraceEntry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolver {
    DirectSparse,
    CgJacobi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub linear: LinearSolver,
    /// Relative residual target ‖Ax − b‖ / ‖b‖.
    pub tol_linear: f64,
    pub cg_max_iter: usize,
    /// Newton stops when the residual ∞-norm drops below this.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub load_steps: usize,
    pub line_search_factor: f64,
    pub line_search_max_halvings: usize,
    pub newmark_beta: f64,
    pub newmark_gamma: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            linear: LinearSolver::DirectSparse,
            tol_linear: 1e-12,
            cg_max_iter: 50_000,
            newton_tol: 1e-8,
            newton_max_iter: 100,
            load_steps: 1,
            line_search_factor: 0.5,
            line_search_max_halvings: 20,
            newmark_beta: 0.25,
            newmark_gamma: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FemError::InvalidArgument(m.to_string()));
        if !(self.newmark_beta > 0.0 && self.newmark_beta <= 0.5) {
            return bad("newmark_beta must lie in (0, 1/2]");
        }
        if !(self.newmark_gamma > 0.0 && self.newmark_gamma <= 1.0) {
            return bad("newmark_gamma must lie in (0, 1]");
        }
        if self.load_steps == 0 {
            return bad("load_steps must be at least 1");
        }
        if !(self.line_search_factor > 0.0 && self.line_search_factor < 1.0) {
            return bad("line_search_factor must lie in (0, 1)");
        }
        if !(self.tol_linear > 0.0 && self.newton_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }
}

/// Worker threads of the sparse direct solver; 0 or 1 runs sequentially.
pub fn set_thread_count(n: usize) {
    faer::set_global_parallelism(if n <= 1 { faer::Par::Seq } else { faer::Par::rayon(n) });
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_validation() {
        let c = SolverConfig::default();
        assert_eq!(c.newton_max_iter, 100);
        assert!(c.validate().is_ok());
        let bad = SolverConfig {
            newmark_beta: 0.6,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            load_steps: 0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
