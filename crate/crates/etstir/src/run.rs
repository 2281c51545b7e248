//! Runs a config end to end and writes its artifacts.
//!
//! Layout of the output directory:
//!
//! ```text
//! metadata.toml          resolved config; feed it back with --config
//! table.csv              one row per case: temperature rise, speeds, t_steady
//! series/case_NN.csv     coverage time series per case
//! fields/case_NN/*.txt   with --dump-fields
//! coverage.svg           with --plot
//! manifest.json          artifact list and per-case wall time
//! ```

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use etstir_core::driver::{run_case_detailed, SweepAxis};

use crate::config::{echo, load_config, Mode, RunConfig};
use crate::error::{AppError, AppResult};
use crate::output::{dump_fields, series_csv, sweep_csv, write_file, ArtifactKind, CaseTiming, RunManifest};
use crate::plot::{emit_plot, sweep_curves};
use crate::sweep::{run_sweep_with, SweepRow, SweepTable};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub workers: usize,
    pub dump_fields: bool,
    pub plot: bool,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            workers: 1,
            dump_fields: false,
            plot: false,
        }
    }
}

/// What a run produced. Solver failures inside a sweep do not abort it;
/// they are listed here and make the command exit nonzero afterwards.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest: RunManifest,
    pub table: SweepTable,
}

impl RunReport {
    pub fn failures(&self) -> Vec<(f64, &str)> {
        self.table
            .rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().err().map(|e| (r.value, e.as_str())))
            .collect()
    }
}

fn prepare_dir(dir: &Path) -> AppResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    let probe = dir.join(".write_test");
    std::fs::write(&probe, b"").map_err(|e| AppError::io(dir, e))?;
    std::fs::remove_file(&probe).map_err(|e| AppError::io(&probe, e))
}

pub fn run_from_config(path: &Path, overrides: &[String], opts: &RunOptions) -> AppResult<RunReport> {
    let cfg = load_config(path, overrides)?;
    run_resolved(&cfg, opts)
}

pub fn run_resolved(cfg: &RunConfig, opts: &RunOptions) -> AppResult<RunReport> {
    cfg.case.validate()?;
    prepare_dir(&opts.out)?;
    let mut manifest = RunManifest {
        output_dir: opts.out.clone(),
        ..RunManifest::default()
    };

    let meta = opts.out.join("metadata.toml");
    write_file(&meta, &echo(cfg))?;
    manifest.add(meta, ArtifactKind::Metadata);

    let dumped = Mutex::new(Vec::new());
    let dump_dir = |index: usize| opts.out.join("fields").join(format!("case_{index:02}"));

    let table = match cfg.mode {
        Mode::Case => {
            let start = Instant::now();
            let outcome = run_case_detailed(&cfg.case)?;
            if opts.dump_fields {
                dumped.lock().expect("dump list").extend(dump_fields(&dump_dir(0), &outcome)?);
            }
            SweepTable {
                axis: SweepAxis::Voltage,
                rows: vec![SweepRow {
                    value: cfg.case.drive.v_rms,
                    outcome: Ok(outcome.result),
                    wall_seconds: start.elapsed().as_secs_f64(),
                }],
            }
        }
        Mode::Sweep => {
            let axis = cfg.axis.ok_or_else(|| AppError::Config("sweep mode needs an axis".into()))?;
            for &v in &cfg.values {
                axis.apply(&cfg.case, v).validate()?;
            }
            let dump_errors = Mutex::new(Vec::new());
            let table = run_sweep_with(&cfg.case, axis, &cfg.values, opts.workers, |index, outcome| {
                if opts.dump_fields {
                    match dump_fields(&dump_dir(index), outcome) {
                        Ok(paths) => dumped.lock().expect("dump list").extend(paths),
                        Err(e) => dump_errors.lock().expect("dump errors").push(e),
                    }
                }
            })?;
            if let Some(e) = dump_errors.into_inner().expect("dump errors").into_iter().next() {
                return Err(e);
            }
            table
        }
    };

    let mut dumped = dumped.into_inner().expect("dump list");
    dumped.sort();
    for p in dumped {
        manifest.add(p, ArtifactKind::FieldDump);
    }

    let table_path = opts.out.join("table.csv");
    write_file(&table_path, &sweep_csv(&table, cfg.case.drive.v_rms))?;
    manifest.add(table_path, ArtifactKind::SweepCsv);

    for (index, row) in table.rows.iter().enumerate() {
        manifest.cases.push(CaseTiming {
            label: format!("{}={:e}", table.axis.name(), row.value),
            wall_seconds: row.wall_seconds,
        });
        if let Ok(r) = &row.outcome {
            let p = opts.out.join("series").join(format!("case_{index:02}.csv"));
            write_file(&p, &series_csv(&r.series))?;
            manifest.add(p, ArtifactKind::SeriesCsv);
        }
    }

    if opts.plot {
        let curves = sweep_curves(&table);
        if !curves.is_empty() {
            let p = opts.out.join("coverage.svg");
            let title = match cfg.mode {
                Mode::Case => "Mean bound complex".to_owned(),
                Mode::Sweep => format!("Mean bound complex, {} sweep", table.axis.name().replace('_', " ")),
            };
            emit_plot(&curves, &title, &p)?;
            manifest.add(p, ArtifactKind::PlotSvg);
        }
    }

    let mpath = opts.out.join("manifest.json");
    write_file(&mpath, &manifest.to_json())?;
    Ok(RunReport { manifest, table })
}
