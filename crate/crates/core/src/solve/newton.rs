use serde::{Deserialize, Serialize};

use super::{Factorization, SolverConfig};
use crate::error::{FemError, Result};
use crate::sparse::CsrMatrix;

/// Nonlinear problem driven by an energy, its gradient and Hessian. All
/// callbacks take the load fraction `s` in (0, 1].
pub trait NewtonProblem {
    fn num_dofs(&self) -> usize;

    /// Total energy; an [`FemError::ElementInverted`] is read as +∞ by the
    /// line search.
    fn energy(&self, u: &[f64], s: f64) -> Result<f64>;

    /// Energy gradient over all DOFs (constrained entries are ignored).
    fn residual(&self, u: &[f64], s: f64) -> Result<Vec<f64>>;

    /// Energy Hessian over all DOFs, before boundary conditions.
    fn hessian(&self, u: &[f64], s: f64) -> Result<CsrMatrix>;

    /// Constrained DOFs and their prescribed values at load fraction `s`.
    fn dirichlet(&self, s: f64) -> Vec<(usize, f64)>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub load_step: usize,
    pub iteration: usize,
    /// Free-DOF residual ∞-norm before the update.
    pub residual: f64,
    pub step_size: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NewtonTrace {
    pub entries: Vec<TraceEntry>,
    pub iterations_per_step: Vec<usize>,
    /// Free-DOF residual ∞-norm at the end of each load step.
    pub final_residuals: Vec<f64>,
}

impl NewtonTrace {
    pub fn total_iterations(&self) -> usize {
        self.iterations_per_step.iter().sum()
    }
}

fn energy_or_inf<P: NewtonProblem>(p: &P, u: &[f64], s: f64) -> Result<f64> {
    match p.energy(u, s) {
        Ok(e) if e.is_finite() => Ok(e),
        Ok(_) | Err(FemError::ElementInverted { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn free_residual_norm(r: &[f64], fixed: &[bool]) -> f64 {
    r.iter()
        .zip(fixed)
        .filter(|(_, f)| !**f)
        .fold(0.0, |m, (v, _)| m.max(v.abs()))
}

/// Newton's method with equal load steps and a backtracking line search on
/// the energy. Dirichlet data enter through the increment of the first
/// iterations of each step.
pub fn newton_solve<P: NewtonProblem>(problem: &P, u0: &[f64], config: &SolverConfig) -> Result<(Vec<f64>, NewtonTrace)> {
    config.validate()?;
    let n = problem.num_dofs();
    assert_eq!(u0.len(), n);
    let mut u = u0.to_vec();
    let mut trace = NewtonTrace::default();
    for step in 1..=config.load_steps {
        let s = step as f64 / config.load_steps as f64;
        let bc = problem.dirichlet(s);
        let mut fixed = vec![false; n];
        for &(d, _) in &bc {
            fixed[d] = true;
        }
        let mut iterations = 0;
        loop {
            let r = problem.residual(&u, s)?;
            let rnorm = free_residual_norm(&r, &fixed);
            let bc_gap = bc.iter().fold(0.0f64, |m, &(d, g)| m.max((g - u[d]).abs()));
            let bc_scale = bc.iter().fold(1.0f64, |m, &(_, g)| m.max(g.abs()));
            let bc_done = bc_gap <= 1e-14 * bc_scale;
            if rnorm <= config.newton_tol && bc_done {
                trace.final_residuals.push(rnorm);
                break;
            }
            if iterations == config.newton_max_iter {
                return Err(FemError::NotConverged {
                    method: "newton",
                    iterations,
                    residual: rnorm,
                });
            }
            let mut h = problem.hessian(&u, s)?;
            let mut rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let increments: Vec<(usize, f64)> = bc.iter().map(|&(d, g)| (d, g - u[d])).collect();
            h.eliminate(&mut rhs, &increments)?;
            let du = Factorization::new(&h, config)?.solve(&rhs)?;

            let e0 = energy_or_inf(problem, &u, s)?;
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..=config.line_search_max_halvings {
                let trial: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + alpha * b).collect();
                let e = energy_or_inf(problem, &trial, s)?;
                let ok = if !bc_done {
                    // boundary still moving: only inversion is rejected
                    e.is_finite()
                } else if e < e0 {
                    true
                } else if e.is_finite() && (e - e0).abs() <= 1e-12 * e0.abs().max(1.0) {
                    let rt = problem.residual(&trial, s)?;
                    free_residual_norm(&rt, &fixed) < rnorm
                } else {
                    false
                };
                if ok {
                    accepted = Some((trial, e));
                    break;
                }
                alpha *= config.line_search_factor;
            }
            let Some((trial, e)) = accepted else {
                return Err(FemError::LineSearchExhausted {
                    halvings: config.line_search_max_halvings,
                });
            };
            u = trial;
            if alpha == 1.0 {
                for &(d, g) in &bc {
                    u[d] = g;
                }
            }
            iterations += 1;
            trace.entries.push(TraceEntry {
                load_step: step,
                iteration: iterations,
                residual: rnorm,
                step_size: alpha,
                energy: e,
            });
        }
        trace.iterations_per_step.push(iterations);
    }
    Ok((u, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// E(u) = ½ uᵀAu − s fᵀu with A tridiagonal SPD.
    struct Quadratic {
        a: CsrMatrix,
        f: Vec<f64>,
        bc: Vec<(usize, f64)>,
    }

    impl Quadratic {
        fn new(n: usize, load: f64, bc: Vec<(usize, f64)>) -> Self {
            let mut t = Vec::new();
            for i in 0..n {
                t.push((i, i, 2.5));
                if i > 0 {
                    t.push((i, i - 1, -1.0));
                    t.push((i - 1, i, -1.0));
                }
            }
            Quadratic {
                a: CsrMatrix::from_triplets(n, n, &t).unwrap(),
                f: (0..n).map(|i| load * (1.0 + i as f64)).collect(),
                bc,
            }
        }
    }

    impl NewtonProblem for Quadratic {
        fn num_dofs(&self) -> usize {
            self.f.len()
        }
        fn energy(&self, u: &[f64], s: f64) -> Result<f64> {
            let au = self.a.matvec(u);
            Ok((0..u.len()).map(|i| 0.5 * u[i] * au[i] - s * self.f[i] * u[i]).sum())
        }
        fn residual(&self, u: &[f64], s: f64) -> Result<Vec<f64>> {
            let au = self.a.matvec(u);
            Ok((0..u.len()).map(|i| au[i] - s * self.f[i]).collect())
        }
        fn hessian(&self, _: &[f64], _: f64) -> Result<CsrMatrix> {
            Ok(self.a.clone())
        }
        fn dirichlet(&self, s: f64) -> Vec<(usize, f64)> {
            self.bc.iter().map(|&(d, g)| (d, s * g)).collect()
        }
    }

    /// E(u) = Σ cosh(u_i) − s u_i: strictly convex, non-quadratic.
    struct Cosh(usize);

    impl NewtonProblem for Cosh {
        fn num_dofs(&self) -> usize {
            self.0
        }
        fn energy(&self, u: &[f64], s: f64) -> Result<f64> {
            Ok(u.iter().map(|x| x.cosh() - 3.0 * s * x).sum())
        }
        fn residual(&self, u: &[f64], s: f64) -> Result<Vec<f64>> {
            Ok(u.iter().map(|x| x.sinh() - 3.0 * s).collect())
        }
        fn hessian(&self, u: &[f64], _: f64) -> Result<CsrMatrix> {
            let t: Vec<_> = u.iter().enumerate().map(|(i, x)| (i, i, x.cosh())).collect();
            CsrMatrix::from_triplets(u.len(), u.len(), &t)
        }
        fn dirichlet(&self, _: f64) -> Vec<(usize, f64)> {
            Vec::new()
        }
    }

    #[test]
    fn quadratic_energy_needs_one_iteration() {
        let p = Quadratic::new(10, 1.0, vec![(0, 0.5), (9, -1.0)]);
        let (u, trace) = newton_solve(&p, &vec![0.0; 10], &SolverConfig::default()).unwrap();
        assert_eq!(trace.total_iterations(), 1);
        assert_eq!(u[0], 0.5);
        assert_eq!(u[9], -1.0);
        let r = p.residual(&u, 1.0).unwrap();
        assert!(r[1..9].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn zero_load_returns_immediately() {
        let p = Quadratic::new(5, 0.0, vec![(0, 0.0)]);
        let (u, trace) = newton_solve(&p, &[0.0; 5], &SolverConfig::default()).unwrap();
        assert_eq!(u, vec![0.0; 5]);
        assert_eq!(trace.total_iterations(), 0);
    }

    #[test]
    fn nonlinear_converges_with_energy_decrease_and_load_steps() {
        let config = SolverConfig {
            load_steps: 3,
            ..SolverConfig::default()
        };
        let (u, trace) = newton_solve(&Cosh(4), &[0.0; 4], &config).unwrap();
        assert!(u.iter().all(|x| (x.sinh() - 3.0).abs() < 1e-8));
        assert_eq!(trace.iterations_per_step.len(), 3);
        for w in trace.entries.windows(2) {
            if w[0].load_step == w[1].load_step {
                assert!(w[1].energy <= w[0].energy + 1e-14);
            }
        }
        let again = newton_solve(&Cosh(4), &[0.0; 4], &config).unwrap();
        assert_eq!(again.1, trace);
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let config = SolverConfig {
            newton_max_iter: 1,
            ..SolverConfig::default()
        };
        assert!(matches!(
            newton_solve(&Cosh(2), &[0.0; 2], &config),
            Err(FemError::NotConverged { .. })
        ));
    }
}
