//! Finite-element kernel for tet/hex meshes: Lagrange, serendipity and
//! quadratic spline bases, elliptic and hyperelastic assembly, linear and
//! nonlinear solvers, and verification tooling.

pub mod assembly;
pub mod basis;
pub mod driver;
pub mod error;
pub mod mesh;
pub mod postprocess;
pub mod problems;
pub mod quadrature;
pub mod solve;
pub mod sparse;

pub use error::{FemError, Result};
