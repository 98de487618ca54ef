//! Gauss quadrature on reference cells.
//!
//! Segment/quad/hex rules are tensor Gauss–Legendre products on `[0,1]^d`.
//! Triangle and tetrahedron rules are collapsed (Stroud conical) products of
//! Gauss–Jacobi and Gauss–Legendre rules; every weight is positive and every
//! point lies strictly inside the reference simplex.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{FemError, Result};
use crate::mesh::{CellKind, Point};

pub const MAX_DEGREE: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Segment,
    Tri,
    Quad,
    Tet,
    Hex,
}

impl From<CellKind> for Domain {
    fn from(k: CellKind) -> Self {
        match k {
            CellKind::Tri => Domain::Tri,
            CellKind::Quad => Domain::Quad,
            CellKind::Tet => Domain::Tet,
            CellKind::Hex => Domain::Hex,
        }
    }
}

impl Domain {
    pub fn measure(self) -> f64 {
        match self {
            Domain::Tri => 0.5,
            Domain::Tet => 1.0 / 6.0,
            _ => 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
    pub domain: Domain,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate<F: FnMut(Point) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

/// Rule degree used for a basis of polynomial degree `basis_degree` on a
/// (multi)linear geometry: `2 p g + 1` with `g = 1`.
pub fn default_degree(basis_degree: usize) -> usize {
    (2 * basis_degree + 1).min(MAX_DEGREE)
}

/// Gauss–Jacobi nodes/weights on `[-1, 1]` for weight `(1-x)^alpha (1+x)^beta`
/// via Golub–Welsch.
fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        t[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / denom
        };
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let b = (4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            t[(k, k + 1)] = b;
            t[(k + 1, k)] = b;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gamma function at small non-negative integers and half-integers used here.
fn gamma(x: f64) -> f64 {
    // only integer arguments occur (alpha, beta in {0, 1, 2})
    let n = x.round() as u32;
    debug_assert!((x - n as f64).abs() < 1e-14 && n >= 1);
    (1..n).map(f64::from).product()
}

/// Legendre polynomial and derivative at x by recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre on `[0, 1]` with `n` points (exact to degree 2n-1).
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (mut x, _) = gauss_jacobi(n, 0.0, 0.0);
    let mut w = vec![0.0; n];
    for i in 0..n {
        // polish the eigenvalue estimate and recompute the weight
        for _ in 0..3 {
            let (p, dp) = legendre(n, x[i]);
            x[i] -= p / dp;
        }
        let (_, dp) = legendre(n, x[i]);
        w[i] = 2.0 / ((1.0 - x[i] * x[i]) * dp * dp);
    }
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|t| 0.5 * t).collect(),
    )
}

/// Collapsed-coordinate Gauss–Jacobi on `[0, 1]` for weight `(1-u)^alpha`.
fn gauss_jacobi_01(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, alpha, 0.0);
    let scale = 2f64.powf(-alpha - 1.0);
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|t| t * scale).collect(),
    )
}

pub fn gauss_rule(domain: Domain, degree: usize) -> Result<QuadratureRule> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(FemError::UnsupportedDegree {
            degree,
            max: MAX_DEGREE,
        });
    }
    let n = degree / 2 + 1;
    let (gx, gw) = gauss_legendre_01(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match domain {
        Domain::Segment => {
            for i in 0..n {
                points.push([gx[i], 0.0, 0.0]);
                weights.push(gw[i]);
            }
        }
        Domain::Quad => {
            for j in 0..n {
                for i in 0..n {
                    points.push([gx[i], gx[j], 0.0]);
                    weights.push(gw[i] * gw[j]);
                }
            }
        }
        Domain::Hex => {
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        points.push([gx[i], gx[j], gx[k]]);
                        weights.push(gw[i] * gw[j] * gw[k]);
                    }
                }
            }
        }
        Domain::Tri => {
            let (ux, uw) = gauss_jacobi_01(n, 1.0);
            for i in 0..n {
                for j in 0..n {
                    let (u, v) = (ux[i], gx[j]);
                    points.push([u, v * (1.0 - u), 0.0]);
                    weights.push(uw[i] * gw[j]);
                }
            }
        }
        Domain::Tet => {
            let (ux, uw) = gauss_jacobi_01(n, 2.0);
            let (vx, vw) = gauss_jacobi_01(n, 1.0);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let (u, v, w) = (ux[i], vx[j], gx[k]);
                        points.push([u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)]);
                        weights.push(uw[i] * vw[j] * gw[k]);
                    }
                }
            }
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        exact_degree: 2 * n - 1,
        domain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Exact integral of x^a y^b z^c over the reference domain.
    fn monomial_integral(domain: Domain, a: u32, b: u32, c: u32) -> f64 {
        match domain {
            Domain::Segment => 1.0 / (a + 1) as f64,
            Domain::Quad => 1.0 / ((a + 1) * (b + 1)) as f64,
            Domain::Hex => 1.0 / ((a + 1) * (b + 1) * (c + 1)) as f64,
            Domain::Tri => factorial(a) * factorial(b) / factorial(a + b + 2),
            Domain::Tet => factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3),
        }
    }

    fn exponents(domain: Domain, p: u32) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        for a in 0..=p {
            for b in 0..=p {
                for c in 0..=p {
                    let ok = match domain {
                        Domain::Segment => b == 0 && c == 0,
                        Domain::Quad => c == 0,
                        Domain::Hex => true,
                        Domain::Tri => c == 0 && a + b <= p,
                        Domain::Tet => a + b + c <= p,
                    };
                    if ok {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn exactness_sweep() {
        for domain in [Domain::Segment, Domain::Tri, Domain::Quad, Domain::Tet, Domain::Hex] {
            for degree in 1..=MAX_DEGREE {
                let rule = gauss_rule(domain, degree).unwrap();
                assert!(rule.exact_degree >= degree);
                for (a, b, c) in exponents(domain, degree as u32) {
                    let q = rule.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32));
                    let exact = monomial_integral(domain, a, b, c);
                    assert!(
                        (q - exact).abs() <= 1e-13 * exact,
                        "{domain:?} degree {degree} x^{a} y^{b} z^{c}: {q} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn weights_positive_and_points_inside() {
        for domain in [Domain::Tri, Domain::Tet] {
            for degree in 1..=MAX_DEGREE {
                let rule = gauss_rule(domain, degree).unwrap();
                let sum: f64 = rule.weights.iter().sum();
                assert!((sum - domain.measure()).abs() < 1e-15);
                assert!(rule.weights.iter().all(|&w| w > 0.0));
                assert!(rule.points.iter().all(|p| p.iter().all(|&c| c >= 0.0) && p.iter().sum::<f64>() <= 1.0));
            }
        }
    }

    #[test]
    fn spot_values() {
        let tet = gauss_rule(Domain::Tet, 4).unwrap();
        assert!((tet.integrate(|_| 1.0) - 1.0 / 6.0).abs() < 1e-16);
        assert!((tet.integrate(|p| p[0] * p[0] * p[1] * p[1]) - 1.0 / 1260.0).abs() < 1e-17);
        let hex = gauss_rule(Domain::Hex, 2).unwrap();
        assert!((hex.integrate(|p| p[0] * p[0]) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unsupported_degree() {
        assert!(gauss_rule(Domain::Hex, 0).is_err());
        assert!(gauss_rule(Domain::Tet, 11).is_err());
    }
}
