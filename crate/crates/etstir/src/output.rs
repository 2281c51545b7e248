//! Plain-text artifacts: CSV tables, structured-grid field dumps and the
//! run manifest. Numbers are written in Rust's shortest round-trip
//! scientific notation, which is locale independent.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use etstir_core::driver::{CaseOutcome, SeriesPoint, SteadyState, SweepAxis};
use etstir_core::mesh::Grid;
use etstir_core::ScalarField;
use serde::Serialize;

use crate::error::{AppError, AppResult};
use crate::sweep::SweepTable;

pub const SERIES_HEADER: &str = "t_seconds,mean_coverage_mol_per_m2,min_a,max_a";
pub const TABLE_COLUMNS: &str = "dT_max_K,v_down_max_m_per_s,u_max_m_per_s,t_steady_s,status";

pub fn write_file(path: &Path, contents: &str) -> AppResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| AppError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| AppError::io(path, e))
}

pub fn series_csv(series: &[SeriesPoint]) -> String {
    let mut s = String::with_capacity(64 * (series.len() + 1));
    s.push_str(SERIES_HEADER);
    s.push('\n');
    for p in series {
        let _ = writeln!(s, "{:e},{:e},{:e},{:e}", p.t, p.mean_coverage, p.min_a, p.max_a);
    }
    s
}

fn steady_cell(t: SteadyState) -> String {
    match t {
        SteadyState::Reached(t) => format!("{t:e}"),
        SteadyState::NotReached => "not_reached".into(),
    }
}

/// Header of the sweep table. Voltage sweeps lead with the voltage column
/// alone; other axes add their own column in front of it.
pub fn table_header(axis: SweepAxis) -> String {
    match axis {
        SweepAxis::Voltage => format!("voltage_V,{TABLE_COLUMNS}"),
        other => format!("{},voltage_V,{TABLE_COLUMNS}", other.column()),
    }
}

pub fn sweep_csv(table: &SweepTable, base_voltage: f64) -> String {
    let mut s = table_header(table.axis);
    s.push('\n');
    for row in &table.rows {
        if table.axis != SweepAxis::Voltage {
            let _ = write!(s, "{:e},", row.value);
        }
        let voltage = if table.axis == SweepAxis::Voltage { row.value } else { base_voltage };
        match &row.outcome {
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "{:e},{:e},{:e},{:e},{},ok",
                    voltage,
                    r.dt_max,
                    r.v_down_max,
                    r.u_max,
                    steady_cell(r.t_steady)
                );
            }
            Err(e) => {
                let msg: String = e.chars().map(|c| if c == ',' || c == '\n' { ';' } else { c }).collect();
                let _ = writeln!(s, "{voltage:e},,,,,error: {msg}");
            }
        }
    }
    s
}

/// Structured-grid text dump: `nx ny dx dy`, then one line per grid row
/// from the bottom wall up.
pub fn field_dump(grid: &Grid, values: impl Fn(usize, usize) -> f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {:e} {:e}", grid.nx, grid.ny, grid.dx, grid.dy);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:e}", values(i, j));
        }
        s.push('\n');
    }
    s
}

pub fn grid_dump(grid: &Grid) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {:e} {:e}", grid.nx, grid.ny, grid.dx, grid.dy);
    for j in 0..grid.ny {
        let row: Vec<String> = (0..grid.nx).map(|i| grid.cells[grid.idx(i, j)].code().to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn scalar(grid: &Grid, f: &ScalarField) -> String {
    field_dump(grid, |i, j| f.at(i, j))
}

/// Writes every field of a finished case into `dir`, returning the paths.
pub fn dump_fields(dir: &Path, o: &CaseOutcome) -> AppResult<Vec<PathBuf>> {
    let g = &o.grid;
    let f = &o.fields;
    let files: Vec<(&str, String)> = vec![
        ("grid.txt", grid_dump(g)),
        ("phi.txt", scalar(g, &f.potential.phi)),
        ("e2.txt", scalar(g, &f.efield.e2)),
        ("temperature.txt", scalar(g, &f.temperature.t)),
        ("u.txt", field_dump(g, |i, j| f.flow.vel.cell_components(i, j).0)),
        ("v.txt", field_dump(g, |i, j| f.flow.vel.cell_components(i, j).1)),
        ("speed.txt", scalar(g, &f.flow.speed_field(g))),
        ("pressure.txt", scalar(g, &f.flow.p)),
        ("concentration.txt", scalar(g, &o.concentration.a)),
        ("coverage_faces.csv", {
            let mut s = String::from("x_m,y_m,length_m,coverage_mol_per_m2\n");
            for (face, ab) in g.reactive.iter().zip(&o.surface.ab) {
                let _ = writeln!(s, "{:e},{:e},{:e},{:e}", face.x, face.y, face.length, ab);
            }
            s
        }),
    ];
    let mut out = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        write_file(&path, &body)?;
        out.push(path);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    SeriesCsv,
    SweepCsv,
    FieldDump,
    PlotSvg,
    Metadata,
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub kind: ArtifactKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseTiming {
    pub label: String,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunManifest {
    pub output_dir: PathBuf,
    pub artifacts: Vec<Artifact>,
    pub cases: Vec<CaseTiming>,
}

impl RunManifest {
    pub fn add(&mut self, path: PathBuf, kind: ArtifactKind) {
        self.artifacts.push(Artifact { path, kind });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
