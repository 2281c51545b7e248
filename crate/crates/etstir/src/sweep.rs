//! Independent cases spread over a worker pool.

use std::time::Instant;

use etstir_core::driver::{run_case_detailed, CaseOutcome, CaseResult, SweepAxis};
use etstir_core::CaseConfig;
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    /// Solver failures are kept as text so the rest of the sweep survives.
    pub outcome: Result<CaseResult, String>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Runs one case per value on `workers` threads. Rows come back in input
/// order. `on_case` sees each finished case with its fields, from whichever
/// worker ran it.
pub fn run_sweep_with<F>(base: &CaseConfig, axis: SweepAxis, values: &[f64], workers: usize, on_case: F) -> AppResult<SweepTable>
where
    F: Fn(usize, &CaseOutcome) + Sync,
{
    if values.is_empty() {
        return Err(AppError::Config("sweep needs at least one value".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AppError::Config(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(index, &value)| {
                let start = Instant::now();
                let config = axis.apply(base, value);
                let outcome = run_case_detailed(&config).map(|o| {
                    on_case(index, &o);
                    o.result
                });
                SweepRow {
                    value,
                    outcome: outcome.map_err(|e| e.to_string()),
                    wall_seconds: start.elapsed().as_secs_f64(),
                }
            })
            .collect()
    });
    Ok(SweepTable { axis, rows })
}

pub fn run_sweep(base: &CaseConfig, axis: SweepAxis, values: &[f64], workers: usize) -> AppResult<SweepTable> {
    run_sweep_with(base, axis, values, workers, |_, _| {})
}
