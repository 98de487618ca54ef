use serde::{Deserialize, Serialize};

use super::{norm_inf, Factorization, SolverConfig};
use crate::error::{FemError, Result};
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub t: f64,
}

impl DynamicState {
    pub fn new(u: Vec<f64>, v: Vec<f64>, a: Vec<f64>, t: f64) -> Result<Self> {
        if u.len() != v.len() || u.len() != a.len() {
            return Err(FemError::InvalidArgument("state vectors differ in length".into()));
        }
        Ok(DynamicState { u, v, a, t })
    }
}

/// Semi-discrete system `M a + f_int(u) = f_ext(t)`; constrained DOFs keep
/// zero acceleration.
pub trait NewmarkSystem {
    fn mass(&self) -> &CsrMatrix;
    fn internal_force(&self, u: &[f64]) -> Result<Vec<f64>>;
    fn stiffness(&self, u: &[f64]) -> Result<CsrMatrix>;
    fn external_force(&self, t: f64) -> Vec<f64>;
    fn constrained(&self) -> &[usize];
    /// Linear systems take exactly one solve per step.
    fn is_linear(&self) -> bool {
        false
    }
}

fn fixed_pairs(sys: &impl NewmarkSystem) -> Vec<(usize, f64)> {
    sys.constrained().iter().map(|&d| (d, 0.0)).collect()
}

/// `a₀ = M⁻¹ (f(t₀) − f_int(u₀))` on the free DOFs.
pub fn newmark_initial_acceleration<S: NewmarkSystem>(sys: &S, u0: &[f64], t0: f64, config: &SolverConfig) -> Result<Vec<f64>> {
    let fint = sys.internal_force(u0)?;
    let mut rhs: Vec<f64> = sys.external_force(t0).iter().zip(&fint).map(|(f, g)| f - g).collect();
    let mut m = sys.mass().clone();
    m.eliminate(&mut rhs, &fixed_pairs(sys))?;
    Factorization::new(&m, config)?.solve(&rhs)
}

/// One Newmark-β step of size `dt`, solving for the new acceleration.
pub fn newmark_step<S: NewmarkSystem>(sys: &S, state: &DynamicState, dt: f64, config: &SolverConfig) -> Result<DynamicState> {
    config.validate()?;
    if dt <= 0.0 {
        return Err(FemError::InvalidArgument("time step must be positive".into()));
    }
    let (beta, gamma) = (config.newmark_beta, config.newmark_gamma);
    let n = state.u.len();
    let t1 = state.t + dt;
    let f_ext = sys.external_force(t1);
    let u_pred: Vec<f64> = (0..n)
        .map(|i| state.u[i] + dt * state.v[i] + dt * dt * (0.5 - beta) * state.a[i])
        .collect();
    let displacement = |a: &[f64]| -> Vec<f64> { (0..n).map(|i| u_pred[i] + beta * dt * dt * a[i]).collect() };
    let fixed = fixed_pairs(sys);
    let mut a = state.a.clone();
    for &(d, _) in &fixed {
        a[d] = 0.0;
    }
    let mut iterations = 0;
    loop {
        let u = displacement(&a);
        let ma = sys.mass().matvec(&a);
        let fint = sys.internal_force(&u)?;
        let mut rhs: Vec<f64> = (0..n).map(|i| f_ext[i] - ma[i] - fint[i]).collect();
        for &(d, _) in &fixed {
            rhs[d] = 0.0;
        }
        let res = norm_inf(&rhs);
        if iterations > 0 && (sys.is_linear() || res <= config.newton_tol) {
            break;
        }
        if iterations == config.newton_max_iter {
            return Err(FemError::NotConverged {
                method: "newmark inner newton",
                iterations,
                residual: res,
            });
        }
        let k = sys.stiffness(&u)?;
        let mut jac = sys.mass().linear_combination(1.0, &k, beta * dt * dt);
        jac.eliminate(&mut rhs, &fixed)?;
        let da = Factorization::new(&jac, config)?.solve(&rhs)?;
        a.iter_mut().zip(&da).for_each(|(x, d)| *x += d);
        iterations += 1;
    }
    let u = displacement(&a);
    let v = (0..n)
        .map(|i| state.v[i] + dt * ((1.0 - gamma) * state.a[i] + gamma * a[i]))
        .collect();
    Ok(DynamicState { u, v, a, t: t1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator {
        m: CsrMatrix,
        k: f64,
        f: f64,
    }

    impl Oscillator {
        fn new(m: f64, k: f64, f: f64) -> Self {
            Oscillator {
                m: CsrMatrix::from_triplets(1, 1, &[(0, 0, m)]).unwrap(),
                k,
                f,
            }
        }
    }

    impl NewmarkSystem for Oscillator {
        fn mass(&self) -> &CsrMatrix {
            &self.m
        }
        fn internal_force(&self, u: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![self.k * u[0]])
        }
        fn stiffness(&self, _: &[f64]) -> Result<CsrMatrix> {
            CsrMatrix::from_triplets(1, 1, &[(0, 0, self.k)])
        }
        fn external_force(&self, _: f64) -> Vec<f64> {
            vec![self.f]
        }
        fn constrained(&self) -> &[usize] {
            &[]
        }
        fn is_linear(&self) -> bool {
            true
        }
    }

    fn start(sys: &Oscillator, u0: f64, v0: f64) -> DynamicState {
        let a0 = newmark_initial_acceleration(sys, &[u0], 0.0, &SolverConfig::default()).unwrap();
        DynamicState::new(vec![u0], vec![v0], a0, 0.0).unwrap()
    }

    #[test]
    fn constant_force_free_particle_is_exact() {
        let sys = Oscillator::new(2.0, 0.0, 3.0);
        let mut s = start(&sys, 0.0, 0.0);
        let dt = 0.1;
        for _ in 0..25 {
            s = newmark_step(&sys, &s, dt, &SolverConfig::default()).unwrap();
        }
        let t = 25.0 * dt;
        assert!((s.u[0] - 0.5 * 1.5 * t * t).abs() < 1e-12);
        assert!((s.t - t).abs() < 1e-12);
    }

    #[test]
    fn single_step_matches_closed_form() {
        // average acceleration: u1 = ((1 - dt²/4) u0 + dt v0) / (1 + dt²/4) for m = k = 1
        let sys = Oscillator::new(1.0, 1.0, 0.0);
        let s = start(&sys, 1.0, 0.0);
        let dt = 0.1;
        let s1 = newmark_step(&sys, &s, dt, &SolverConfig::default()).unwrap();
        let want = (1.0 - dt * dt / 4.0) / (1.0 + dt * dt / 4.0);
        assert!((s1.u[0] - want).abs() < 1e-15);
        let v_want = -dt / (1.0 + dt * dt / 4.0);
        assert!((s1.v[0] - v_want).abs() < 1e-15);
    }

    #[test]
    fn energy_is_conserved() {
        let sys = Oscillator::new(1.0, 1.0, 0.0);
        let mut s = start(&sys, 1.0, 0.0);
        let energy = |s: &DynamicState| 0.5 * s.v[0] * s.v[0] + 0.5 * s.u[0] * s.u[0];
        let e0 = energy(&s);
        for _ in 0..100 {
            s = newmark_step(&sys, &s, 0.1, &SolverConfig::default()).unwrap();
        }
        assert!((energy(&s) - e0).abs() <= 1e-10 * e0);
    }

    #[test]
    fn amplitude_never_grows() {
        for dt in [0.01, 0.1, 1.0] {
            let sys = Oscillator::new(1.0, 1.0, 0.0);
            let mut s = start(&sys, 1.0, 0.0);
            for _ in 0..1000 {
                s = newmark_step(&sys, &s, dt, &SolverConfig::default()).unwrap();
                assert!(s.u[0].abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_time_step() {
        let sys = Oscillator::new(1.0, 1.0, 0.0);
        let s = start(&sys, 1.0, 0.0);
        assert!(newmark_step(&sys, &s, 0.0, &SolverConfig::default()).is_err());
        assert!(DynamicState::new(vec![0.0], vec![], vec![0.0], 0.0).is_err());
    }
}
