//! Error norms, stress recovery, point evaluation and run records.

mod norms;
mod record;
mod stress;

pub use norms::{error_norms, l2_difference, ErrorReport};
pub use record::{peak_memory_bytes, Phase, PhaseGuard, RunRecord, Stopwatch, Timings};
pub use stress::{stress_from_gradient, vertex_averaged_stress, von_mises};

use crate::basis::FESpace;
use crate::error::Result;
use crate::mesh::Point;

/// Value of the discrete field at a physical point.
pub fn interpolate(space: &FESpace, coeffs: &[f64], x: Point) -> Result<Vec<f64>> {
    space.evaluate_at(coeffs, x)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_rate(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
