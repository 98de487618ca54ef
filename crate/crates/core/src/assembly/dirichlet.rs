use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::LinearSystem;
use crate::basis::FESpace;
use crate::error::{FemError, Result};
use crate::mesh::Point;

type Schedule = Arc<dyn Fn(Point, f64) -> Vec<f64> + Send + Sync>;

/// Prescribed values on the facets tagged `tag`. `components` masks which
/// components are constrained (all when empty).
#[derive(Clone)]
pub struct DirichletSpec {
    pub tag: i32,
    pub components: Vec<usize>,
    value: Schedule,
}

impl DirichletSpec {
    /// Data `g(x)` scaled linearly by the load fraction.
    pub fn new<F>(tag: i32, g: F) -> Self
    where
        F: Fn(Point) -> Vec<f64> + Send + Sync + 'static,
    {
        DirichletSpec {
            tag,
            components: Vec::new(),
            value: Arc::new(move |x, s| g(x).into_iter().map(|v| v * s).collect()),
        }
    }

    /// Data `g(x, s)` with an explicit dependence on the load fraction `s`.
    pub fn scheduled<F>(tag: i32, g: F) -> Self
    where
        F: Fn(Point, f64) -> Vec<f64> + Send + Sync + 'static,
    {
        DirichletSpec {
            tag,
            components: Vec::new(),
            value: Arc::new(g),
        }
    }

    /// Homogeneous data.
    pub fn zero(tag: i32) -> Self {
        DirichletSpec::new(tag, |_| vec![0.0; 3])
    }

    pub fn only(mut self, components: &[usize]) -> Self {
        self.components = components.to_vec();
        self
    }

    pub fn eval(&self, x: Point, s: f64) -> Vec<f64> {
        (self.value)(x, s)
    }
}

impl fmt::Debug for DirichletSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletSpec")
            .field("tag", &self.tag)
            .field("components", &self.components)
            .finish()
    }
}

/// Constrained DOFs and values at load fraction `s`, sorted by DOF. Values
/// are coefficients of the interpolant (collocation at Greville points for
/// splines).
pub fn dirichlet_values(space: &FESpace, specs: &[DirichletSpec], s: f64) -> Result<Vec<(usize, f64)>> {
    let m = space.components();
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for spec in specs {
        let nodes = space.boundary_nodes(spec.tag)?;
        let comps: Vec<usize> = if spec.components.is_empty() {
            (0..m).collect()
        } else {
            spec.components.clone()
        };
        if let Some(&k) = comps.iter().find(|&&k| k >= m) {
            return Err(FemError::InvalidArgument(format!("component {k} of a {m}-component space")));
        }
        let coeffs: Vec<f64> = if space.is_spline() {
            space.interpolate(|x| pad(spec.eval(x, s), m))
        } else {
            Vec::new()
        };
        for &n in nodes {
            let v = if space.is_spline() {
                coeffs[n * m..(n + 1) * m].to_vec()
            } else {
                pad(spec.eval(space.node_positions()[n], s), m)
            };
            for &k in &comps {
                let dof = n * m + k;
                match out.get(&dof) {
                    Some(&prev) if (prev - v[k]).abs() > 1e-10 => {
                        return Err(FemError::ConflictingDirichlet {
                            dof,
                            first: prev,
                            second: v[k],
                        })
                    }
                    Some(_) => {}
                    None => {
                        out.insert(dof, v[k]);
                    }
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn pad(mut v: Vec<f64>, m: usize) -> Vec<f64> {
    v.resize(m.max(v.len()), 0.0);
    v
}

/// Symmetric elimination of `constraints` from the system.
pub fn apply_dirichlet(system: &mut LinearSystem, constraints: &[(usize, f64)]) -> Result<()> {
    system.matrix.eliminate(&mut system.rhs, constraints)
}
