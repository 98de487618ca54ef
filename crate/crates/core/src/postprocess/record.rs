use std::cell::Cell;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::ErrorReport;
use crate::error::{FemError, Result};
use crate::mesh::MeshStats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Basis,
    Assembly,
    Solve,
}

/// Wall-clock totals of one run, in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub t_b: f64,
    pub t_a: f64,
    pub t_s: f64,
    pub t_total: f64,
}

/// Accumulates phase durations. Phases may not nest.
#[derive(Debug)]
pub struct Stopwatch {
    start: Instant,
    active: Cell<Option<Phase>>,
    totals: Cell<[f64; 3]>,
}

impl Default for Stopwatch {
    fn default() -> Self {
        Stopwatch::new()
    }
}

pub struct PhaseGuard<'a> {
    watch: &'a Stopwatch,
    phase: Phase,
    start: Instant,
}

impl Drop for PhaseGuard<'_> {
    fn drop(&mut self) {
        let mut t = self.watch.totals.get();
        t[self.phase as usize] += self.start.elapsed().as_secs_f64();
        self.watch.totals.set(t);
        self.watch.active.set(None);
    }
}

impl Stopwatch {
    pub fn new() -> Self {
        Stopwatch {
            start: Instant::now(),
            active: Cell::new(None),
            totals: Cell::new([0.0; 3]),
        }
    }

    /// Starts timing `phase` until the guard is dropped.
    pub fn scope(&self, phase: Phase) -> Result<PhaseGuard<'_>> {
        if let Some(outer) = self.active.get() {
            return Err(FemError::Timing(format!("{phase:?} started inside {outer:?}")));
        }
        self.active.set(Some(phase));
        Ok(PhaseGuard {
            watch: self,
            phase,
            start: Instant::now(),
        })
    }

    /// Runs `f` inside a `phase` scope.
    pub fn time<T>(&self, phase: Phase, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let _g = self.scope(phase)?;
        f()
    }

    pub fn timings(&self) -> Timings {
        let t = self.totals.get();
        Timings {
            t_b: t[0],
            t_a: t[1],
            t_s: t[2],
            t_total: self.start.elapsed().as_secs_f64(),
        }
    }
}

/// Peak resident set size of this process in bytes (Linux), 0 elsewhere.
pub fn peak_memory_bytes() -> u64 {
    std::fs::read_to_string("/proc/self/status")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("VmHWM:"))
                .and_then(|l| l.split_whitespace().nth(1))
                .and_then(|kb| kb.parse::<u64>().ok())
        })
        .map_or(0, |kb| kb * 1024)
}

/// Results of one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub family: String,
    pub num_dofs: usize,
    pub matrix_nnz: usize,
    pub mesh_stats: MeshStats,
    pub errors: Option<ErrorReport>,
    pub timings: Timings,
    pub peak_memory: u64,
}
