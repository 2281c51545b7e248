//! rms electrostatic potential over the channel and the field derived from it.
//!
//! Electrode A is held at `+V/2` and electrode B at `-V/2`, so `V` is the rms
//! potential difference between them. Every other boundary, including the
//! cantilever, is a perfect insulator.

use crate::error::{Error, Result};
use crate::field::{FaceField, ScalarField};
use crate::linalg::{cg, Preconditioner, SolveStats, SolverOptions, Stencil5};
use crate::mesh::{BoundaryKind, FaceKind, Grid};
use alloc::format;

pub const MAX_ITERATIONS: usize = 50_000;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct PotentialField {
    /// rms potential, V. Zero inside solid cells.
    pub phi: ScalarField,
    pub v_rms: f64,
    pub stats: SolveStats,
}

impl PotentialField {
    pub fn electrode_potential(&self, kind: BoundaryKind) -> Option<f64> {
        match kind {
            BoundaryKind::ElectrodeA => Some(0.5 * self.v_rms),
            BoundaryKind::ElectrodeB => Some(-0.5 * self.v_rms),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EField {
    /// Face-normal field components, V/m.
    pub e: FaceField,
    /// Cell-centred |E|^2 from face-averaged components, V^2/m^2.
    pub e2: ScalarField,
}

fn electrode_value(kind: FaceKind, v_rms: f64) -> Option<f64> {
    match kind {
        FaceKind::Boundary(BoundaryKind::ElectrodeA) => Some(0.5 * v_rms),
        FaceKind::Boundary(BoundaryKind::ElectrodeB) => Some(-0.5 * v_rms),
        _ => None,
    }
}

/// Solves the discrete Laplace equation with Dirichlet electrodes and
/// insulating walls by Jacobi-preconditioned conjugate gradients.
pub fn solve_potential(grid: &Grid, v_rms: f64, tol: f64) -> Result<PotentialField> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::Input(format!("potential tolerance must be in (0, 1e-4], got {tol:e}")));
    }
    if !v_rms.is_finite() {
        return Err(Error::Input(format!("v_rms must be finite, got {v_rms}")));
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let (dx, dy) = (grid.dx, grid.dy);
    let gx = dy / dx;
    let gy = dx / dy;
    let mut a = Stencil5::new(nx, ny);
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.idx(i, j);
            if !grid.is_fluid(i, j) {
                a.fix(k, 0.0);
                continue;
            }
            let mut ap = 0.0;
            if grid.xface(i + 1, j) == FaceKind::Interior {
                a.ae[k] = gx;
                ap += gx;
            }
            if grid.xface(i, j) == FaceKind::Interior {
                a.aw[k] = gx;
                ap += gx;
            }
            let north = grid.yface(i, j + 1);
            let south = grid.yface(i, j);
            if north == FaceKind::Interior {
                a.an[k] = gy;
                ap += gy;
            } else if let Some(v) = electrode_value(north, v_rms) {
                ap += 2.0 * gy;
                a.b[k] += 2.0 * gy * v;
            }
            if south == FaceKind::Interior {
                a.as_[k] = gy;
                ap += gy;
            } else if let Some(v) = electrode_value(south, v_rms) {
                ap += 2.0 * gy;
                a.b[k] += 2.0 * gy * v;
            }
            a.ap[k] = ap;
        }
    }
    let mut x = alloc::vec![0.0; nx * ny];
    let opts = SolverOptions::new("potential", tol, MAX_ITERATIONS).with_preconditioner(Preconditioner::Jacobi);
    let stats = cg(&a, &mut x, opts)?;
    Ok(PotentialField {
        phi: ScalarField { nx, ny, values: x },
        v_rms,
        stats,
    })
}

/// Face field `E = -grad(phi)` and the cell-centred `|E|^2`.
pub fn electric_field(phi: &PotentialField, grid: &Grid) -> Result<EField> {
    let (nx, ny) = (grid.nx, grid.ny);
    phi.phi.check_shape(nx, ny)?;
    let p = &phi.phi;
    let mut e = FaceField::zeros(nx, ny);
    for j in 0..ny {
        for i in 1..nx {
            if grid.xface(i, j) == FaceKind::Interior {
                let k = e.xi(i, j);
                e.x[k] = -(p.at(i, j) - p.at(i - 1, j)) / grid.dx;
            }
        }
    }
    let half = 0.5 * grid.dy;
    for j in 0..=ny {
        for i in 0..nx {
            let kind = grid.yface(i, j);
            let value = if kind == FaceKind::Interior {
                -(p.at(i, j) - p.at(i, j - 1)) / grid.dy
            } else if let Some(vb) = electrode_value(kind, phi.v_rms) {
                if j == 0 {
                    -(p.at(i, 0) - vb) / half
                } else {
                    -(vb - p.at(i, j - 1)) / half
                }
            } else {
                0.0
            };
            let k = e.yi(i, j);
            e.y[k] = value;
        }
    }
    let mut e2 = ScalarField::zeros(nx, ny);
    for j in 0..ny {
        for i in 0..nx {
            if grid.is_fluid(i, j) {
                let (ex, ey) = e.cell_components(i, j);
                e2.set(i, j, ex * ex + ey * ey);
            }
        }
    }
    Ok(EField { e, e2 })
}
