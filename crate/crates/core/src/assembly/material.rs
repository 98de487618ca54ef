//! Material constants and Voigt elasticity matrices.
//!
//! Voigt order is (xx, yy, zz, yz, xz, xy) in 3D and (xx, yy, xy) in 2D with
//! engineering shear strains. 2D problems use plane stress.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialModel {
    Hooke,
    NeoHookean,
    Orthotropic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthotropicConstants {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub nu12: f64,
    pub nu23: f64,
    pub nu13: f64,
    pub g12: f64,
    pub g23: f64,
    pub g31: f64,
}

impl OrthotropicConstants {
    /// Carbon fiber: E = (167, 33, 33), ν = (0.18, 0.25, 0.18), G = (13, 21, 21).
    pub fn carbon_fiber() -> Self {
        OrthotropicConstants {
            e1: 167.0,
            e2: 33.0,
            e3: 33.0,
            nu12: 0.18,
            nu23: 0.25,
            nu13: 0.18,
            g12: 13.0,
            g23: 21.0,
            g31: 21.0,
        }
    }

    /// 6x6 compliance matrix in Voigt order.
    pub fn compliance(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(6, 6);
        s[(0, 0)] = 1.0 / self.e1;
        s[(1, 1)] = 1.0 / self.e2;
        s[(2, 2)] = 1.0 / self.e3;
        s[(0, 1)] = -self.nu12 / self.e1;
        s[(0, 2)] = -self.nu13 / self.e1;
        s[(1, 2)] = -self.nu23 / self.e2;
        s[(1, 0)] = s[(0, 1)];
        s[(2, 0)] = s[(0, 2)];
        s[(2, 1)] = s[(1, 2)];
        s[(3, 3)] = 1.0 / self.g23;
        s[(4, 4)] = 1.0 / self.g31;
        s[(5, 5)] = 1.0 / self.g12;
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub model: MaterialModel,
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
    #[serde(default)]
    pub orthotropic: Option<OrthotropicConstants>,
}

impl MaterialParams {
    pub fn hooke(e: f64, nu: f64) -> Self {
        MaterialParams {
            model: MaterialModel::Hooke,
            e,
            nu,
            orthotropic: None,
        }
    }

    pub fn neo_hookean(e: f64, nu: f64) -> Self {
        MaterialParams {
            model: MaterialModel::NeoHookean,
            ..Self::hooke(e, nu)
        }
    }

    pub fn orthotropic(c: OrthotropicConstants) -> Self {
        MaterialParams {
            model: MaterialModel::Orthotropic,
            e: c.e1,
            nu: c.nu12,
            orthotropic: Some(c),
        }
    }

    /// Checks the constants for a `dim`-dimensional problem. Plane stress
    /// only needs ν in (−1, 1).
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.model == MaterialModel::Orthotropic {
            let c = self
                .orthotropic
                .ok_or_else(|| FemError::InvalidMaterial("orthotropic model without constants".into()))?;
            let eig = SymmetricEigen::new(c.compliance());
            if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
                return Err(FemError::InvalidMaterial("orthotropic compliance is not positive definite".into()));
            }
            return Ok(());
        }
        if !(self.e > 0.0) {
            return Err(FemError::InvalidMaterial(format!("Young's modulus {} must be positive", self.e)));
        }
        let upper = if dim == 2 { 1.0 } else { 0.5 };
        if !(self.nu > -1.0 && self.nu < upper) {
            return Err(FemError::InvalidMaterial(format!("Poisson ratio {} outside (-1, {upper})", self.nu)));
        }
        Ok(())
    }

    /// Shear modulus E / (2 (1 + ν)).
    pub fn mu(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    /// First Lamé parameter: Eν/((1+ν)(1−2ν)) in 3D, νE/(1−ν²) in 2D.
    pub fn lambda(&self, dim: usize) -> f64 {
        let (e, nu) = (self.e, self.nu);
        if dim == 2 {
            nu * e / (1.0 - nu * nu)
        } else {
            e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
        }
    }
}

pub fn voigt_size(dim: usize) -> usize {
    if dim == 2 {
        3
    } else {
        6
    }
}

/// Voigt row of the strain pair (i, j), i <= j.
pub fn voigt_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    if i == j {
        return i;
    }
    match (dim, i, j) {
        (2, 0, 1) => 2,
        (_, 1, 2) => 3,
        (_, 0, 2) => 4,
        _ => 5,
    }
}

/// Elasticity matrix in Voigt form. Neo-Hookean materials return their
/// small-strain (Hooke) tangent.
pub fn elasticity_tensor(material: &MaterialParams, dim: usize) -> Result<DMatrix<f64>> {
    material.validate(dim)?;
    if material.model == MaterialModel::Orthotropic {
        let s = material.orthotropic.expect("validated").compliance();
        let c = if dim == 3 {
            s.try_inverse()
        } else {
            // plane stress: invert the in-plane block of the compliance
            let idx = [0, 1, 5];
            DMatrix::from_fn(3, 3, |r, q| s[(idx[r], idx[q])]).try_inverse()
        };
        return c.ok_or_else(|| FemError::InvalidMaterial("singular compliance".into()));
    }
    let mu = material.mu();
    let lambda = material.lambda(dim);
    let n = voigt_size(dim);
    let mut c = DMatrix::zeros(n, n);
    for i in 0..dim {
        for j in 0..dim {
            c[(i, j)] = lambda;
        }
        c[(i, i)] += 2.0 * mu;
    }
    for k in dim..n {
        c[(k, k)] = mu;
    }
    Ok(c)
}
