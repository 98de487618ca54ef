//! Manufactured solutions with hand-derived gradients and Hessians, each
//! checked against central differences when constructed.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::assembly::{elasticity_tensor, voigt_index, voigt_size, MaterialParams, VectorFn};
use crate::error::{FemError, Result};
use crate::mesh::Point;

use super::Pde;

pub type Hessian = [[f64; 3]; 3];

type ValueFn = Arc<dyn Fn(Point) -> Vec<f64> + Send + Sync>;
type GradFn = Arc<dyn Fn(Point) -> Vec<[f64; 3]> + Send + Sync>;
type HessFn = Arc<dyn Fn(Point) -> Vec<Hessian> + Send + Sync>;

/// Analytic field with first and second derivatives, one entry per component.
#[derive(Clone)]
pub struct ManufacturedSolution {
    pub name: String,
    pub components: usize,
    /// Spatial dimension the derivatives are taken in.
    pub dim: usize,
    value: ValueFn,
    gradient: GradFn,
    hessian: HessFn,
}

impl fmt::Debug for ManufacturedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ManufacturedSolution({}, {} components)", self.name, self.components)
    }
}

/// Low-discrepancy points in `[0, 1]^dim` (Halton bases 2, 3, 5).
pub fn halton_points(count: usize, dim: usize) -> Vec<Point> {
    let radical = |mut i: usize, b: usize| {
        let (mut f, mut r) = (1.0, 0.0);
        while i > 0 {
            f /= b as f64;
            r += f * (i % b) as f64;
            i /= b;
        }
        r
    };
    (1..=count)
        .map(|i| {
            let mut p = [0.0; 3];
            for (k, b) in [2, 3, 5].into_iter().enumerate().take(dim) {
                p[k] = radical(i, b);
            }
            p
        })
        .collect()
}

fn max_abs<'a, I: IntoIterator<Item = &'a f64>>(v: I) -> f64 {
    v.into_iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl ManufacturedSolution {
    /// Builds the solution and verifies gradient and Hessian against central
    /// differences (step 1e-6, 1e-5 relative) at 100 points of `[0,1]^dim`.
    pub fn new(name: &str, components: usize, dim: usize, value: ValueFn, gradient: GradFn, hessian: HessFn) -> Result<Self> {
        let s = ManufacturedSolution {
            name: name.to_string(),
            components,
            dim,
            value,
            gradient,
            hessian,
        };
        s.self_check()?;
        Ok(s)
    }

    fn self_check(&self) -> Result<()> {
        let h = 1e-6;
        for p in halton_points(100, self.dim) {
            let g = self.gradient(p);
            let hs = self.hessian(p);
            let v = self.value(p);
            if v.len() != self.components || g.len() != self.components || hs.len() != self.components {
                return Err(FemError::InvalidArgument(format!("{}: component count mismatch", self.name)));
            }
            for j in 0..self.dim {
                let (mut a, mut b) = (p, p);
                a[j] += h;
                b[j] -= h;
                let (va, vb) = (self.value(a), self.value(b));
                let (ga, gb) = (self.gradient(a), self.gradient(b));
                for c in 0..self.components {
                    let fd = (va[c] - vb[c]) / (2.0 * h);
                    let scale = max_abs(&g[c]).max(v[c].abs());
                    if (fd - g[c][j]).abs() > 1e-5 * scale {
                        return Err(FemError::InvalidArgument(format!(
                            "{}: gradient component {c}/{j} disagrees with finite differences ({} vs {fd})",
                            self.name, g[c][j]
                        )));
                    }
                    let hscale = hs[c].iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(max_abs(&g[c]));
                    for i in 0..self.dim {
                        let fd = (ga[c][i] - gb[c][i]) / (2.0 * h);
                        if (fd - hs[c][i][j]).abs() > 1e-5 * hscale {
                            return Err(FemError::InvalidArgument(format!(
                                "{}: Hessian component {c}/{i}{j} disagrees with finite differences",
                                self.name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, p: Point) -> Vec<f64> {
        (self.value)(p)
    }

    pub fn gradient(&self, p: Point) -> Vec<[f64; 3]> {
        (self.gradient)(p)
    }

    pub fn hessian(&self, p: Point) -> Vec<Hessian> {
        (self.hessian)(p)
    }

    pub fn value_fn(&self) -> VectorFn {
        self.value.clone()
    }

    /// Affine field `u_c(x) = a_c + b_c · x`.
    pub fn affine(dim: usize, offset: Vec<f64>, slopes: Vec<[f64; 3]>) -> Result<Self> {
        let m = offset.len();
        let (o, s) = (offset.clone(), slopes.clone());
        ManufacturedSolution::new(
            "affine",
            m,
            dim,
            Arc::new(move |p| (0..m).map(|c| o[c] + s[c][0] * p[0] + s[c][1] * p[1] + s[c][2] * p[2]).collect()),
            Arc::new(move |_| slopes.clone()),
            Arc::new(move |_| vec![[[0.0; 3]; 3]; m]),
        )
    }
}

/// Franke's function in 3D as used for the Poisson benchmark, including the
/// linear (not squared) x₂, x₃ terms of its second exponential. Returns the
/// value, gradient and Laplacian.
pub fn franke3d(p: Point) -> (f64, [f64; 3], f64) {
    let (v, g, h) = franke_all(p);
    (v, g, h[0][0] + h[1][1] + h[2][2])
}

fn franke_all(p: Point) -> (f64, [f64; 3], Hessian) {
    let [x, y, z] = [9.0 * p[0], 9.0 * p[1], 9.0 * p[2]];
    // each term c·exp(φ): value, ∇φ (w.r.t. p) and the constant/diagonal ∂²φ
    let mut terms: Vec<(f64, f64, [f64; 3], [f64; 3])> = Vec::with_capacity(4);
    let gauss = |c: f64, a: [f64; 3], scale: f64| {
        let d = [x - a[0], y - a[1], z - a[2]];
        let phi = -(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / scale;
        let g = [-18.0 * d[0] / scale, -18.0 * d[1] / scale, -18.0 * d[2] / scale];
        let h = [-162.0 / scale; 3];
        (c, phi, g, h)
    };
    terms.push(gauss(0.75, [2.0, 2.0, 2.0], 4.0));
    terms.push((
        0.75,
        -(x + 1.0) * (x + 1.0) / 49.0 - (y + 1.0) / 10.0 - (z + 1.0) / 10.0,
        [-18.0 * (x + 1.0) / 49.0, -0.9, -0.9],
        [-162.0 / 49.0, 0.0, 0.0],
    ));
    terms.push(gauss(0.5, [7.0, 3.0, 5.0], 4.0));
    terms.push(gauss(-0.2, [4.0, 7.0, 5.0], 1.0));
    let mut v = 0.0;
    let mut g = [0.0; 3];
    let mut h = [[0.0; 3]; 3];
    for (c, phi, dphi, d2phi) in terms {
        let e = c * phi.exp();
        v += e;
        for i in 0..3 {
            g[i] += e * dphi[i];
            for j in 0..3 {
                h[i][j] += e * (dphi[i] * dphi[j] + if i == j { d2phi[i] } else { 0.0 });
            }
        }
    }
    (v, g, h)
}

pub fn franke_solution() -> Result<ManufacturedSolution> {
    ManufacturedSolution::new(
        "franke3d",
        1,
        3,
        Arc::new(|p| vec![franke_all(p).0]),
        Arc::new(|p| vec![franke_all(p).1]),
        Arc::new(|p| vec![franke_all(p).2]),
    )
}

/// Polynomial displacement `u = (1/80)(x₁x₂ + x₁² + x₂³ + 6x₃,
/// x₁x₃ − x₃³ + x₁x₂² + 3x₁⁴, x₁x₂x₃ + x₂²x₃² − 2x₁)`.
pub fn elasticity_polynomial() -> Result<ManufacturedSolution> {
    const S: f64 = 1.0 / 80.0;
    let value = |p: Point| {
        let [x, y, z] = p;
        vec![
            S * (x * y + x * x + y * y * y + 6.0 * z),
            S * (x * z - z * z * z + x * y * y + 3.0 * x.powi(4)),
            S * (x * y * z + y * y * z * z - 2.0 * x),
        ]
    };
    let gradient = |p: Point| {
        let [x, y, z] = p;
        vec![
            [S * (y + 2.0 * x), S * (x + 3.0 * y * y), S * 6.0],
            [S * (z + y * y + 12.0 * x.powi(3)), S * 2.0 * x * y, S * (x - 3.0 * z * z)],
            [S * (y * z - 2.0), S * (x * z + 2.0 * y * z * z), S * (x * y + 2.0 * y * y * z)],
        ]
    };
    let hessian = |p: Point| {
        let [x, y, z] = p;
        vec![
            [[2.0 * S, S, 0.0], [S, 6.0 * y * S, 0.0], [0.0; 3]],
            [
                [36.0 * x * x * S, 2.0 * y * S, S],
                [2.0 * y * S, 2.0 * x * S, 0.0],
                [S, 0.0, -6.0 * z * S],
            ],
            [
                [0.0, z * S, y * S],
                [z * S, 2.0 * z * z * S, (x + 4.0 * y * z) * S],
                [y * S, (x + 4.0 * y * z) * S, 2.0 * y * y * S],
            ],
        ]
    };
    ManufacturedSolution::new(
        "elasticity_polynomial",
        3,
        3,
        Arc::new(value),
        Arc::new(gradient),
        Arc::new(hessian),
    )
}

/// The elasticity solution with its material (`E = 200`, `ν = 0.35`) and the
/// body force `b = −div σ[u]`.
pub fn elasticity_manufactured() -> Result<(ManufacturedSolution, MaterialParams, VectorFn)> {
    let sol = elasticity_polynomial()?;
    let mat = MaterialParams::hooke(200.0, 0.35);
    let rhs = manufactured_rhs(Pde::LinearElasticity, &sol, &mat)?;
    Ok((sol, mat, rhs))
}

/// Body force that makes `solution` exact: `−Δu` for Poisson and
/// `−div (C : ε[u])` for linear elasticity.
pub fn manufactured_rhs(pde: Pde, solution: &ManufacturedSolution, material: &MaterialParams) -> Result<VectorFn> {
    let sol = solution.clone();
    match pde {
        Pde::Poisson if sol.components == 1 => Ok(Arc::new(move |p| {
            let h = sol.hessian(p)[0];
            vec![-(0..sol.dim).map(|i| h[i][i]).sum::<f64>()]
        })),
        Pde::LinearElasticity if sol.components == sol.dim => {
            let dim = sol.dim;
            let c: DMatrix<f64> = elasticity_tensor(material, dim)?;
            let nv = voigt_size(dim);
            Ok(Arc::new(move |p| {
                let h = sol.hessian(p);
                let mut b = vec![0.0; dim];
                for j in 0..dim {
                    // ∂_j of the Voigt strain (engineering shears)
                    let mut de = vec![0.0; nv];
                    for k in 0..dim {
                        for l in k..dim {
                            let v = if k == l { h[k][k][j] } else { h[k][l][j] + h[l][k][j] };
                            de[voigt_index(dim, k, l)] += v;
                        }
                    }
                    let ds = &c * nalgebra::DVector::from_vec(de);
                    for (i, bi) in b.iter_mut().enumerate() {
                        *bi -= ds[voigt_index(dim, i, j)];
                    }
                }
                b
            }))
        }
        _ => Err(FemError::InvalidArgument(format!(
            "no manufactured right-hand side for {pde:?} with a {}-component solution",
            sol.components
        ))),
    }
}
