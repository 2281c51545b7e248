//! One case end to end: coupled steady fields, then binding kinetics on the
//! frozen flow, plus the knobs a parameter sweep turns.

use alloc::format;
use alloc::vec::Vec;

use crate::electrostatics::{electric_field, solve_potential, EField, PotentialField};
use crate::error::{Error, Result};
use crate::etforce::{compute_et_force, BodyForceField, DriveSpec};
use crate::field::ScalarField;
use crate::flow::{divergence, solve_flow_from, FlowField, FlowOptions};
use crate::math::abs;
use crate::mesh::{build_grid, Geometry, Grid};
use crate::thermal::{energy_balance, joule_heating, solve_temperature, FluidProps, TemperatureField, ThermalOptions, WallThermal};
use crate::transport::{mean_coverage, step, ConcentrationField, ReactionParams, SurfaceState, TransportOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GridSize {
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSize {
    fn default() -> Self {
        Self { nx: 256, ny: 96 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RunSettings {
    /// Mean inlet velocity, m/s.
    pub inlet_mean: f64,
    /// Fraction of the equilibrium coverage that counts as steady.
    pub steady_fraction: f64,
    /// s.
    pub t_max: f64,
    /// s.
    pub dt: f64,
    /// Spacing of the recorded coverage series, s.
    pub sample_interval: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            inlet_mean: 1e-4,
            steady_fraction: 0.99,
            t_max: 2000.0,
            dt: 0.5,
            sample_interval: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ThermalSettings {
    pub walls: WallThermal,
    /// Include advection of heat by the computed flow. When false the
    /// temperature is purely conductive and the coupling is one-way.
    pub convection: bool,
}

impl Default for ThermalSettings {
    fn default() -> Self {
        Self {
            walls: WallThermal::Adiabatic,
            convection: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverSettings {
    pub potential_tol: f64,
    pub thermal_tol: f64,
    pub transport_tol: f64,
    /// Relative change of `u_max` and `dT_max` between fixed-point passes.
    pub coupling_tol: f64,
    pub coupling_max_iter: usize,
    /// Under-relaxation of the body force between fixed-point passes.
    pub coupling_relaxation: f64,
    pub flow: FlowOptions,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            potential_tol: 1e-8,
            thermal_tol: 1e-10,
            transport_tol: 1e-12,
            coupling_tol: 1e-4,
            coupling_max_iter: 50,
            coupling_relaxation: 1.0,
            flow: FlowOptions::default(),
        }
    }
}

/// Everything needed to run one case.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CaseConfig {
    pub grid: GridSize,
    pub geometry: Geometry,
    pub fluid: FluidProps,
    pub reaction: ReactionParams,
    pub drive: DriveSpec,
    pub run: RunSettings,
    pub thermal: ThermalSettings,
    pub solver: SolverSettings,
}

impl CaseConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.fluid.validate()?;
        self.reaction.validate()?;
        self.drive.validate()?;
        self.solver.flow.validate()?;
        let r = &self.run;
        if !(r.inlet_mean >= 0.0 && r.inlet_mean.is_finite()) {
            return Err(Error::Input(format!("inlet mean velocity must be >= 0, got {:e}", r.inlet_mean)));
        }
        if !(r.steady_fraction > 0.0 && r.steady_fraction <= 1.0) {
            return Err(Error::Input(format!("steady fraction must lie in (0, 1], got {}", r.steady_fraction)));
        }
        if !(r.dt > 0.0 && r.sample_interval > 0.0 && r.t_max > 0.0) {
            return Err(Error::Input("dt, sample interval and t_max must be positive".into()));
        }
        let s = &self.solver;
        if !(s.coupling_tol > 0.0) || s.coupling_max_iter == 0 {
            return Err(Error::Input("coupling tolerance and iteration cap must be positive".into()));
        }
        if !(s.coupling_relaxation > 0.0 && s.coupling_relaxation <= 1.0) {
            return Err(Error::Input("coupling relaxation must lie in (0, 1]".into()));
        }
        if !(s.thermal_tol > 0.0 && s.transport_tol > 0.0) {
            return Err(Error::Input("solver tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn thermal_options(&self) -> ThermalOptions {
        ThermalOptions {
            walls: self.thermal.walls,
            tol: self.solver.thermal_tol,
            ..ThermalOptions::default()
        }
    }

    pub fn transport_options(&self) -> TransportOptions {
        TransportOptions {
            dt: self.run.dt,
            tol: self.solver.transport_tol,
            ..TransportOptions::default()
        }
    }
}

/// Converged steady fields of one case.
#[derive(Debug, Clone)]
pub struct CoupledFields {
    pub potential: PotentialField,
    pub efield: EField,
    /// Joule heating, W/m^3.
    pub heat: ScalarField,
    pub temperature: TemperatureField,
    pub force: BodyForceField,
    pub flow: FlowField,
    pub iterations: usize,
    /// `(u_max, dT_max)` after each pass.
    pub history: Vec<(f64, f64)>,
}

fn relative_change(new: f64, old: f64) -> f64 {
    let scale = abs(new).max(abs(old));
    if scale == 0.0 {
        0.0
    } else {
        abs(new - old) / scale
    }
}

fn blend(new: &mut BodyForceField, old: &BodyForceField, w: f64) {
    for (n, o) in new.f.x.iter_mut().zip(&old.f.x) {
        *n = w * *n + (1.0 - w) * o;
    }
    for (n, o) in new.f.y.iter_mut().zip(&old.f.y) {
        *n = w * *n + (1.0 - w) * o;
    }
}

/// Potential, temperature, force and flow iterated to a fixed point.
pub fn couple_steady_fields(grid: &Grid, config: &CaseConfig) -> Result<CoupledFields> {
    let potential = solve_potential(grid, config.drive.v_rms, config.solver.potential_tol)?;
    let efield = electric_field(&potential, grid)?;
    let heat = joule_heating(&efield, &config.fluid);
    let thermal = config.thermal_options();
    let flow_opts = config.solver.flow;
    let inlet = config.run.inlet_mean;

    let mut force = BodyForceField::zeros(grid.nx, grid.ny);
    let mut flow = solve_flow_from(grid, &force, inlet, &config.fluid, &flow_opts, None)?;
    let mut prev = (flow.max_speed(grid), 0.0);
    let mut history = Vec::new();
    for it in 1..=config.solver.coupling_max_iter {
        let advecting = if config.thermal.convection { Some(&flow) } else { None };
        let temperature = solve_temperature(grid, &heat, advecting, &config.fluid, &thermal)?;
        let mut next = compute_et_force(grid, &efield, &temperature, &config.fluid, &config.drive)?;
        if it > 1 {
            blend(&mut next, &force, config.solver.coupling_relaxation);
        }
        force = next;
        flow = solve_flow_from(grid, &force, inlet, &config.fluid, &flow_opts, Some(&flow))?;
        let now = (flow.max_speed(grid), temperature.dt_max(grid));
        history.push(now);
        let converged = relative_change(now.0, prev.0) < config.solver.coupling_tol
            && relative_change(now.1, prev.1) < config.solver.coupling_tol;
        prev = now;
        if converged {
            return Ok(CoupledFields {
                potential,
                efield,
                heat,
                temperature,
                force,
                flow,
                iterations: it,
                history,
            });
        }
    }
    Err(Error::CouplingDivergence {
        iterations: config.solver.coupling_max_iter,
        history,
    })
}

/// When the mean coverage first reached the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteadyState {
    Reached(f64),
    NotReached,
}

impl SteadyState {
    pub fn time(self) -> Option<f64> {
        match self {
            SteadyState::Reached(t) => Some(t),
            SteadyState::NotReached => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    /// s.
    pub t: f64,
    /// mol/m^2.
    pub mean_coverage: f64,
    /// Bulk concentration range over the fluid, mol/m^3.
    pub min_a: f64,
    pub max_a: f64,
}

/// First time the series reaches `fraction * ab_eq`, interpolated linearly
/// between the bracketing samples. A zero threshold never counts as reached.
pub fn detect_steady_state(series: &[SeriesPoint], ab_eq: f64, fraction: f64) -> Result<SteadyState> {
    if series.is_empty() {
        return Err(Error::Input("coverage series is empty".into()));
    }
    let target = fraction * ab_eq;
    if !(target > 0.0) {
        return Ok(SteadyState::NotReached);
    }
    if series[0].mean_coverage >= target {
        return Ok(SteadyState::Reached(series[0].t));
    }
    for w in series.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b.mean_coverage >= target {
            let s = (target - a.mean_coverage) / (b.mean_coverage - a.mean_coverage);
            return Ok(SteadyState::Reached(a.t + s * (b.t - a.t)));
        }
    }
    Ok(SteadyState::NotReached)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub coupling_iterations: usize,
    pub flow_iterations: usize,
    pub flow_residual: f64,
    /// Largest cell divergence times cell size over the inlet mean speed
    /// (over the peak speed when nothing flows in).
    pub max_divergence: f64,
    pub energy_balance_error: f64,
    pub species_balance_error: f64,
    pub clamped_updates: usize,
    /// Largest number of substeps a transport step was split into.
    pub max_substeps: usize,
    pub min_temperature: f64,
    pub min_concentration: f64,
    pub fluid_cells: usize,
    pub reactive_faces: usize,
}

/// Scalar outcomes of one case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub series: Vec<SeriesPoint>,
    /// Peak temperature rise, K.
    pub dt_max: f64,
    /// Peak speed, m/s.
    pub u_max: f64,
    /// Peak downward velocity, m/s.
    pub v_down_max: f64,
    pub t_steady: SteadyState,
    /// Equilibrium coverage at the inlet concentration, mol/m^2.
    pub ab_eq: f64,
    pub diagnostics: Diagnostics,
}

/// A finished case together with the fields behind it.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub result: CaseResult,
    pub grid: Grid,
    pub fields: CoupledFields,
    pub concentration: ConcentrationField,
    pub surface: SurfaceState,
}

fn relative_divergence(grid: &Grid, flow: &FlowField, inlet_mean: f64) -> f64 {
    let u_ref = if inlet_mean > 0.0 { inlet_mean } else { flow.max_speed(grid) };
    if u_ref == 0.0 {
        return 0.0;
    }
    let h = grid.dx.min(grid.dy);
    divergence(grid, &flow.vel).values.iter().fold(0.0_f64, |m, d| m.max(abs(*d))) * h / u_ref
}

/// Runs one case and keeps the fields.
pub fn run_case_detailed(config: &CaseConfig) -> Result<CaseOutcome> {
    config.validate()?;
    let grid = build_grid(&config.geometry, config.grid.nx, config.grid.ny)?;
    if grid.reactive.is_empty() {
        return Err(Error::Geometry("no reactive faces: the binding surface is missing".into()));
    }
    let fields = couple_steady_fields(&grid, config)?;
    let params = config.reaction;
    let ab_eq = params.ab_eq();
    let opts = config.transport_options();
    let run = config.run;

    let advecting = if config.thermal.convection { Some(&fields.flow) } else { None };
    let energy = energy_balance(&grid, &fields.temperature, &fields.heat, advecting, &config.fluid, config.thermal.walls);

    let mut a = ConcentrationField::filled(&grid, params.a_inlet);
    let mut surface = SurfaceState::empty(&grid);
    let mut diag = Diagnostics {
        coupling_iterations: fields.iterations,
        flow_iterations: fields.flow.stats.iterations,
        flow_residual: fields.flow.stats.momentum_residual,
        max_divergence: relative_divergence(&grid, &fields.flow, run.inlet_mean),
        energy_balance_error: energy.relative_error(),
        min_temperature: fields.temperature.min_fluid(&grid),
        fluid_cells: grid.fluid_cell_count(),
        reactive_faces: grid.reactive.len(),
        ..Diagnostics::default()
    };
    let sample = |a: &ConcentrationField, s: &SurfaceState, t: f64| -> Result<SeriesPoint> {
        let (lo, hi) = a.range(&grid);
        Ok(SeriesPoint {
            t,
            mean_coverage: mean_coverage(s)?,
            min_a: lo,
            max_a: hi,
        })
    };
    let mut series = Vec::new();
    series.push(sample(&a, &surface, 0.0)?);
    let target = run.steady_fraction * ab_eq;
    let mut min_a = series[0].min_a;

    // Sample times are multiples of the interval, so steps are clipped to
    // land on them exactly.
    let mut t = 0.0;
    let mut n_sample = 1usize;
    let eps = 1e-9 * run.dt;
    'time: while t < run.t_max - eps {
        let next_sample = (n_sample as f64 * run.sample_interval).min(run.t_max);
        while t < next_sample - eps {
            let h = run.dt.min(next_sample - t);
            let r = step(&grid, Some(&fields.flow), &a, &surface, &params, &config.fluid, h, &opts)?;
            a = r.a;
            surface = r.surface;
            diag.species_balance_error = diag.species_balance_error.max(r.balance_error);
            diag.max_substeps = diag.max_substeps.max(r.substeps);
            t += h;
        }
        t = next_sample;
        let p = sample(&a, &surface, t)?;
        min_a = min_a.min(p.min_a);
        series.push(p);
        n_sample += 1;
        if target > 0.0 && p.mean_coverage >= target {
            break 'time;
        }
    }
    diag.clamped_updates = surface.clamped;
    diag.min_concentration = min_a;

    let t_steady = detect_steady_state(&series, ab_eq, run.steady_fraction)?;
    let result = CaseResult {
        series,
        dt_max: fields.temperature.dt_max(&grid),
        u_max: fields.flow.max_speed(&grid),
        v_down_max: fields.flow.max_downward(),
        t_steady,
        ab_eq,
        diagnostics: diag,
    };
    Ok(CaseOutcome {
        result,
        grid,
        fields,
        concentration: a,
        surface,
    })
}

pub fn run_case(config: &CaseConfig) -> Result<CaseResult> {
    run_case_detailed(config).map(|o| o.result)
}

/// A scalar a sweep can vary. Lengths are in metres, frequency in Hz and
/// voltage in V rms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SweepAxis {
    ElectrodeWidth,
    Gap,
    Frequency,
    Voltage,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::ElectrodeWidth => "electrode_width",
            SweepAxis::Gap => "gap",
            SweepAxis::Frequency => "frequency",
            SweepAxis::Voltage => "voltage",
        }
    }

    /// Column header used for this axis in tables.
    pub fn column(self) -> &'static str {
        match self {
            SweepAxis::ElectrodeWidth => "electrode_width_m",
            SweepAxis::Gap => "gap_m",
            SweepAxis::Frequency => "frequency_Hz",
            SweepAxis::Voltage => "voltage_V",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "electrode_width" | "width" => Some(SweepAxis::ElectrodeWidth),
            "gap" | "electrode_gap" => Some(SweepAxis::Gap),
            "frequency" => Some(SweepAxis::Frequency),
            "voltage" | "v_rms" => Some(SweepAxis::Voltage),
            _ => None,
        }
    }

    pub fn value(self, config: &CaseConfig) -> f64 {
        match self {
            SweepAxis::ElectrodeWidth => config.geometry.electrode_width,
            SweepAxis::Gap => config.geometry.electrode_gap,
            SweepAxis::Frequency => config.drive.frequency,
            SweepAxis::Voltage => config.drive.v_rms,
        }
    }

    /// Copy of `base` with this axis set to `value`. The electrode pair stays
    /// centred where it was.
    pub fn apply(self, base: &CaseConfig, value: f64) -> CaseConfig {
        let mut c = base.clone();
        match self {
            SweepAxis::ElectrodeWidth => c.geometry.electrode_width = value,
            SweepAxis::Gap => c.geometry.electrode_gap = value,
            SweepAxis::Frequency => c.drive.frequency = value,
            SweepAxis::Voltage => c.drive.v_rms = value,
        }
        c
    }
}

/// Builds the grid a configuration describes without solving anything.
pub fn grid_for(config: &CaseConfig) -> Result<Grid> {
    build_grid(&config.geometry, config.grid.nx, config.grid.ny)
}
