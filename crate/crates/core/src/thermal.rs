//! Steady energy balance with Joule heating, advected by the flow.
//!
//! The unknown is the temperature rise `T - T_ref`. Electrodes and the inlet
//! are held at `T_ref`, the outlet is zero-gradient, and the remaining walls
//! and the cantilever are adiabatic unless isothermal walls are requested.

use alloc::format;
use alloc::vec;

use crate::electrostatics::EField;
use crate::error::{Error, Result};
use crate::field::{FaceField, ScalarField};
use crate::flow::FlowField;
use crate::linalg::{bicgstab, SolveStats, SolverOptions, Stencil5};
use crate::mesh::{BoundaryKind, FaceKind, Grid};
use crate::VACUUM_PERMITTIVITY;

/// Material constants of the buffer, SI units.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FluidProps {
    /// Density, kg/m^3.
    pub rho: f64,
    /// Specific heat, J/(kg K). Water at 300 K.
    pub cp: f64,
    /// Thermal conductivity, W/(m K). Water at 300 K.
    pub k_thermal: f64,
    /// Electrical conductivity, S/m.
    pub sigma: f64,
    pub eps_rel: f64,
    /// Dynamic viscosity, Pa s.
    pub eta: f64,
    /// (1/sigma) dsigma/dT, 1/K.
    pub alpha_sigma: f64,
    /// (1/eps) deps/dT, 1/K.
    pub alpha_eps: f64,
    /// Analyte diffusivity, m^2/s.
    pub diffusivity: f64,
    /// Electrode, inlet and initial temperature, K.
    pub t_ref: f64,
}

impl Default for FluidProps {
    fn default() -> Self {
        Self {
            rho: 1e3,
            cp: 4184.0,
            k_thermal: 0.6,
            sigma: 5.75e-2,
            eps_rel: 80.2,
            eta: 1e-3,
            alpha_sigma: 0.02,
            alpha_eps: -0.004,
            diffusivity: 1e-10,
            t_ref: 300.0,
        }
    }
}

impl FluidProps {
    /// Absolute permittivity, F/m.
    pub fn eps(&self) -> f64 {
        self.eps_rel * VACUUM_PERMITTIVITY
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("cp", self.cp),
            ("k_thermal", self.k_thermal),
            ("sigma", self.sigma),
            ("eps_rel", self.eps_rel),
            ("eta", self.eta),
            ("diffusivity", self.diffusivity),
            ("t_ref", self.t_ref),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("fluid property {name} must be positive, got {v:e}")));
            }
        }
        if !self.alpha_sigma.is_finite() || !self.alpha_eps.is_finite() {
            return Err(Error::Input("temperature coefficients must be finite".into()));
        }
        Ok(())
    }
}

/// Thermal condition on channel walls that are not electrodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WallThermal {
    #[default]
    Adiabatic,
    /// Top and bottom walls held at `T_ref`.
    Isothermal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalOptions {
    pub walls: WallThermal,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ThermalOptions {
    fn default() -> Self {
        Self {
            walls: WallThermal::Adiabatic,
            tol: 1e-10,
            max_iter: 5_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TemperatureField {
    /// Temperature, K. Solid cells hold `t_ref`.
    pub t: ScalarField,
    /// Face-normal temperature gradient, K/m, consistent with the boundary
    /// conditions used in the solve (zero on adiabatic faces).
    pub grad: FaceField,
    pub t_ref: f64,
    pub stats: SolveStats,
}

impl TemperatureField {
    /// Uniform field at `t_ref`.
    pub fn uniform(nx: usize, ny: usize, t_ref: f64) -> Self {
        Self {
            t: ScalarField::filled(nx, ny, t_ref),
            grad: FaceField::zeros(nx, ny),
            t_ref,
            stats: SolveStats { iterations: 0, residual: 0.0 },
        }
    }

    /// Largest temperature rise over fluid cells, K.
    pub fn dt_max(&self, grid: &Grid) -> f64 {
        let mut m = 0.0_f64;
        for (k, c) in grid.cells.iter().enumerate() {
            if *c == crate::mesh::CellKind::Fluid {
                m = m.max(self.t.values[k] - self.t_ref);
            }
        }
        m
    }

    pub fn min_fluid(&self, grid: &Grid) -> f64 {
        let mut m = f64::INFINITY;
        for (k, c) in grid.cells.iter().enumerate() {
            if *c == crate::mesh::CellKind::Fluid {
                m = m.min(self.t.values[k]);
            }
        }
        m
    }
}

/// Volumetric Joule heating `sigma |E|^2`, W/m^3.
pub fn joule_heating(e: &EField, props: &FluidProps) -> ScalarField {
    e.e2.map(|v| props.sigma * v)
}

/// Boundary treatment of a face for the heat equation.
#[derive(Clone, Copy)]
enum ThermalFace {
    Interior,
    /// Held at `T_ref` at half a cell from the centre.
    Fixed,
    /// Zero-gradient outflow.
    Outflow,
    Insulated,
}

fn classify(kind: FaceKind, walls: WallThermal, outer: bool) -> ThermalFace {
    match kind {
        FaceKind::Interior => ThermalFace::Interior,
        FaceKind::Inactive => ThermalFace::Insulated,
        FaceKind::Boundary(b) => match b {
            BoundaryKind::ElectrodeA | BoundaryKind::ElectrodeB | BoundaryKind::Inlet => ThermalFace::Fixed,
            BoundaryKind::Outlet => ThermalFace::Outflow,
            BoundaryKind::Wall | BoundaryKind::Reactive => {
                if outer && walls == WallThermal::Isothermal {
                    ThermalFace::Fixed
                } else {
                    ThermalFace::Insulated
                }
            }
        },
    }
}

/// Heat budget of a solved temperature field, W per metre depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    pub source: f64,
    /// Conduction out through fixed-temperature faces.
    pub conducted: f64,
    /// Enthalpy carried out relative to `T_ref`.
    pub advected: f64,
}

impl EnergyBalance {
    pub fn relative_error(&self) -> f64 {
        let out = self.conducted + self.advected;
        let scale = self.source.abs().max(out.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.source - out).abs() / scale
        }
    }
}

struct Assembly {
    system: Stencil5,
}

fn face_flux_x(flow: Option<&FlowField>, i: usize, j: usize, rc_dy: f64) -> f64 {
    flow.map_or(0.0, |f| rc_dy * f.vel.x_at(i, j))
}

fn face_flux_y(flow: Option<&FlowField>, i: usize, j: usize, rc_dx: f64) -> f64 {
    flow.map_or(0.0, |f| rc_dx * f.vel.y_at(i, j))
}

fn assemble(grid: &Grid, q: &ScalarField, flow: Option<&FlowField>, props: &FluidProps, walls: WallThermal) -> Assembly {
    let (nx, ny, dx, dy) = (grid.nx, grid.ny, grid.dx, grid.dy);
    let k = props.k_thermal;
    let rc = props.rho * props.cp;
    let (dxe, dyn_) = (k * dy / dx, k * dx / dy);
    let mut a = Stencil5::new(nx, ny);
    for j in 0..ny {
        for i in 0..nx {
            let p = grid.idx(i, j);
            if !grid.is_fluid(i, j) {
                a.fix(p, 0.0);
                continue;
            }
            let fe = face_flux_x(flow, i + 1, j, rc * dy);
            let fw = face_flux_x(flow, i, j, rc * dy);
            let fnn = face_flux_y(flow, i, j + 1, rc * dx);
            let fs = face_flux_y(flow, i, j, rc * dx);
            let mut ap = fe - fw + fnn - fs;
            // east
            match classify(grid.xface(i + 1, j), walls, false) {
                ThermalFace::Interior => {
                    a.ae[p] = dxe + (-fe).max(0.0);
                    ap += a.ae[p];
                }
                ThermalFace::Fixed => ap += 2.0 * dxe + (-fe).max(0.0),
                ThermalFace::Outflow | ThermalFace::Insulated => {}
            }
            // west
            match classify(grid.xface(i, j), walls, false) {
                ThermalFace::Interior => {
                    a.aw[p] = dxe + fw.max(0.0);
                    ap += a.aw[p];
                }
                ThermalFace::Fixed => ap += 2.0 * dxe + fw.max(0.0),
                ThermalFace::Outflow | ThermalFace::Insulated => {}
            }
            // north
            match classify(grid.yface(i, j + 1), walls, j + 1 == ny) {
                ThermalFace::Interior => {
                    a.an[p] = dyn_ + (-fnn).max(0.0);
                    ap += a.an[p];
                }
                ThermalFace::Fixed => ap += 2.0 * dyn_ + (-fnn).max(0.0),
                ThermalFace::Outflow | ThermalFace::Insulated => {}
            }
            // south
            match classify(grid.yface(i, j), walls, j == 0) {
                ThermalFace::Interior => {
                    a.as_[p] = dyn_ + fs.max(0.0);
                    ap += a.as_[p];
                }
                ThermalFace::Fixed => ap += 2.0 * dyn_ + fs.max(0.0),
                ThermalFace::Outflow | ThermalFace::Insulated => {}
            }
            a.ap[p] = ap;
            a.b[p] = q.values[p] * dx * dy;
        }
    }
    Assembly { system: a }
}

/// Steady `rho cp (u . grad T) = k lap T + q` with first-order upwind
/// advection and central diffusion.
pub fn solve_temperature(
    grid: &Grid,
    q: &ScalarField,
    flow: Option<&FlowField>,
    props: &FluidProps,
    opts: &ThermalOptions,
) -> Result<TemperatureField> {
    q.check_shape(grid.nx, grid.ny)?;
    if let Some(f) = flow {
        f.vel.check_shape(grid.nx, grid.ny)?;
    }
    if q.values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Input("heat source must be finite and nonnegative".into()));
    }
    let asm = assemble(grid, q, flow, props, opts.walls);
    let mut rise = vec![0.0; grid.nx * grid.ny];
    let stats = bicgstab(&asm.system, &mut rise, SolverOptions::new("temperature", opts.tol, opts.max_iter))?;
    let t = ScalarField {
        nx: grid.nx,
        ny: grid.ny,
        values: rise.iter().map(|r| props.t_ref + r).collect(),
    };
    let grad = face_gradient(grid, &t, props.t_ref, opts.walls);
    Ok(TemperatureField {
        t,
        grad,
        t_ref: props.t_ref,
        stats,
    })
}

/// Face-normal gradient of `t` honouring the thermal boundary conditions.
pub fn face_gradient(grid: &Grid, t: &ScalarField, t_ref: f64, walls: WallThermal) -> FaceField {
    let (nx, ny, dx, dy) = (grid.nx, grid.ny, grid.dx, grid.dy);
    let mut g = FaceField::zeros(nx, ny);
    for j in 0..ny {
        for i in 0..=nx {
            let value = match classify(grid.xface(i, j), walls, false) {
                ThermalFace::Interior => (t.at(i, j) - t.at(i - 1, j)) / dx,
                ThermalFace::Fixed => {
                    if i == 0 || !grid.is_fluid(i - 1, j) {
                        (t.at(i, j) - t_ref) / (0.5 * dx)
                    } else {
                        (t_ref - t.at(i - 1, j)) / (0.5 * dx)
                    }
                }
                ThermalFace::Outflow | ThermalFace::Insulated => 0.0,
            };
            let k = g.xi(i, j);
            g.x[k] = value;
        }
    }
    for j in 0..=ny {
        for i in 0..nx {
            let outer = j == 0 || j == ny;
            let value = match classify(grid.yface(i, j), walls, outer) {
                ThermalFace::Interior => (t.at(i, j) - t.at(i, j - 1)) / dy,
                ThermalFace::Fixed => {
                    if j == 0 || !grid.is_fluid(i, j - 1) {
                        (t.at(i, j) - t_ref) / (0.5 * dy)
                    } else {
                        (t_ref - t.at(i, j - 1)) / (0.5 * dy)
                    }
                }
                ThermalFace::Outflow | ThermalFace::Insulated => 0.0,
            };
            let k = g.yi(i, j);
            g.y[k] = value;
        }
    }
    g
}

/// Global heat budget of a solved field: source versus what leaves through
/// the boundary by conduction and advection.
pub fn energy_balance(
    grid: &Grid,
    temp: &TemperatureField,
    q: &ScalarField,
    flow: Option<&FlowField>,
    props: &FluidProps,
    walls: WallThermal,
) -> EnergyBalance {
    let (nx, ny, dx, dy) = (grid.nx, grid.ny, grid.dx, grid.dy);
    let k = props.k_thermal;
    let rc = props.rho * props.cp;
    let rise = |i: usize, j: usize| temp.t.at(i, j) - temp.t_ref;
    let mut source = 0.0;
    for (idx, c) in grid.cells.iter().enumerate() {
        if *c == crate::mesh::CellKind::Fluid {
            source += q.values[idx] * dx * dy;
        }
    }
    let mut conducted = 0.0;
    let mut advected = 0.0;
    for j in 0..ny {
        for i in [0, nx] {
            let kind = grid.xface(i, j);
            let cell = if i == 0 { 0 } else { nx - 1 };
            let outward = if i == 0 { -1.0 } else { 1.0 };
            let f = outward * face_flux_x(flow, i, j, rc * dy);
            match classify(kind, walls, false) {
                ThermalFace::Fixed => {
                    conducted += 2.0 * k * dy / dx * rise(cell, j);
                    // Inflow carries T_ref, outflow the upwind cell value.
                    if f > 0.0 {
                        advected += f * rise(cell, j);
                    }
                }
                ThermalFace::Outflow => advected += f * rise(cell, j),
                _ => {}
            }
        }
        // x-faces on the cantilever ends are adiabatic with zero velocity.
    }
    for i in 0..nx {
        for j in 0..=ny {
            let outer = j == 0 || j == ny;
            if let ThermalFace::Fixed = classify(grid.yface(i, j), walls, outer) {
                let cell = if j == 0 || !grid.is_fluid(i, j - 1) { j } else { j - 1 };
                conducted += 2.0 * k * dx / dy * rise(i, cell);
            }
        }
    }
    EnergyBalance {
        source,
        conducted,
        advected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_grid, Geometry};

    #[test]
    fn joule_heating_of_uniform_field() {
        let mut e2 = ScalarField::zeros(4, 4);
        e2.values.iter_mut().for_each(|v| *v = 1e10);
        let e = EField { e: FaceField::zeros(4, 4), e2 };
        let q = joule_heating(&e, &FluidProps::default());
        for v in &q.values {
            assert!((v - 5.75e8).abs() < 1e-6 * 5.75e8);
        }
        let zero = EField { e: FaceField::zeros(4, 4), e2: ScalarField::zeros(4, 4) };
        assert!(joule_heating(&zero, &FluidProps::default()).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn no_source_is_isothermal() {
        let g = build_grid(&Geometry::default(), 128, 64).unwrap();
        let q = ScalarField::zeros(g.nx, g.ny);
        let t = solve_temperature(&g, &q, None, &FluidProps::default(), &ThermalOptions::default()).unwrap();
        assert!(t.t.values.iter().all(|&v| v == 300.0));
    }

    #[test]
    fn slab_with_isothermal_walls_matches_parabola() {
        // Uniform q between two walls at T_ref: dT_max = q H^2 / (8 k).
        let h = 100e-6;
        let g = build_grid(&Geometry::empty_channel(500e-6, h), 100, 64).unwrap();
        let props = FluidProps::default();
        let qv = 5.75e8;
        let q = ScalarField::filled(g.nx, g.ny, qv);
        let opts = ThermalOptions { walls: WallThermal::Isothermal, ..Default::default() };
        let t = solve_temperature(&g, &q, None, &props, &opts).unwrap();
        let expected = qv * h * h / (8.0 * props.k_thermal);
        let mid = g.nx / 2;
        let peak = (0..g.ny).map(|j| t.t.at(mid, j) - 300.0).fold(0.0, f64::max);
        assert!((peak - expected).abs() / expected < 0.01, "{peak} vs {expected}");
        let bal = energy_balance(&g, &t, &q, None, &props, opts.walls);
        assert!(bal.relative_error() < 1e-6, "{bal:?}");
    }

    #[test]
    fn rejects_negative_source() {
        let g = build_grid(&Geometry::empty_channel(100e-6, 100e-6), 8, 8).unwrap();
        let q = ScalarField::filled(8, 8, -1.0);
        let r = solve_temperature(&g, &q, None, &FluidProps::default(), &ThermalOptions::default());
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn permittivity_from_relative_value() {
        let p = FluidProps::default();
        assert!((p.eps() - 7.101e-10).abs() < 1e-3 * 7.101e-10);
    }
}
