//! Steady incompressible 2-D flow on a staggered (MAC) grid.
//!
//! `u` lives on x-faces, `v` on y-faces and `p` at cell centres. The inlet
//! carries a fully developed parabolic profile with the requested mean; the
//! outlet is zero-gradient in velocity with the pressure held at zero on the
//! outlet plane; every wall, electrode and obstacle face is no-slip.
//! Convection is first-order upwind, diffusion central.
//!
//! Each outer pass freezes the convecting velocity and solves the resulting
//! linear saddle-point system for velocity and pressure together with
//! flexible GMRES. The preconditioner is one pressure-correction sweep: a
//! pressure update from the continuity residual (scaled by the viscous
//! Schur-complement estimate `dx dy / eta`) followed by a momentum solve
//! with that pressure. At the low Reynolds numbers of interest the outer
//! passes converge in a handful of iterations, and the Krylov method removes
//! the grid-dependent stall that plain SIMPLE suffers in viscous flow.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::etforce::BodyForceField;
use crate::field::{FaceField, ScalarField};
use crate::linalg::{bicgstab, cg, fgmres, norm, SolverOptions, Stencil5};
use crate::math::{abs, sqrt};
use crate::mesh::{BoundaryKind, CellKind, FaceKind, Grid};
use crate::thermal::FluidProps;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FlowOptions {
    /// Relative momentum and continuity residual at convergence.
    pub tol: f64,
    /// Cap on outer (convection-update) passes.
    pub max_iter: usize,
    /// Relative residual reduction asked of each linear solve.
    pub krylov_tol: f64,
    pub krylov_max_iter: usize,
    pub restart: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 50,
            krylov_tol: 1e-8,
            krylov_max_iter: 3_000,
            restart: 60,
        }
    }
}

impl FlowOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.krylov_tol > 0.0 && self.krylov_tol < 1.0) {
            return Err(Error::Input("flow tolerances must lie in (0, 1)".into()));
        }
        if self.max_iter == 0 || self.krylov_max_iter == 0 || self.restart == 0 {
            return Err(Error::Input("flow iteration caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowStats {
    /// Outer passes.
    pub iterations: usize,
    pub krylov_iterations: usize,
    pub momentum_residual: f64,
    pub continuity_residual: f64,
    /// Momentum residual at the start of every outer pass.
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FlowField {
    /// `u` on x-faces and `v` on y-faces, m/s.
    pub vel: FaceField,
    /// Pressure, Pa, relative to the outlet plane.
    pub p: ScalarField,
    pub stats: FlowStats,
}

impl FlowField {
    pub fn at_rest(nx: usize, ny: usize) -> Self {
        Self {
            vel: FaceField::zeros(nx, ny),
            p: ScalarField::zeros(nx, ny),
            stats: FlowStats::default(),
        }
    }

    /// Largest speed over fluid cells, from face-averaged components.
    pub fn max_speed(&self, grid: &Grid) -> f64 {
        let mut m = 0.0_f64;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                if grid.is_fluid(i, j) {
                    let (u, v) = self.vel.cell_components(i, j);
                    m = m.max(crate::math::sqrt(u * u + v * v));
                }
            }
        }
        m
    }

    /// Largest downward velocity, `max(-v)` over y-faces (zero if none).
    pub fn max_downward(&self) -> f64 {
        self.vel.y.iter().fold(0.0_f64, |m, &v| m.max(-v))
    }

    /// Cell-centred speed for dumps.
    pub fn speed_field(&self, grid: &Grid) -> ScalarField {
        let mut s = ScalarField::zeros(grid.nx, grid.ny);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (u, v) = self.vel.cell_components(i, j);
                s.set(i, j, crate::math::sqrt(u * u + v * v));
            }
        }
        s
    }
}

/// Net outflow of each cell divided by its area, 1/s.
pub fn divergence(grid: &Grid, vel: &FaceField) -> ScalarField {
    let mut d = ScalarField::zeros(grid.nx, grid.ny);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if grid.is_fluid(i, j) {
                let flux = (vel.x_at(i + 1, j) - vel.x_at(i, j)) / grid.dx + (vel.y_at(i, j + 1) - vel.y_at(i, j)) / grid.dy;
                d.set(i, j, flux);
            }
        }
    }
    d
}

/// Volumetric flux through the inlet and outlet, m^2/s.
pub fn boundary_fluxes(grid: &Grid, vel: &FaceField) -> (f64, f64) {
    let mut q_in = 0.0;
    let mut q_out = 0.0;
    for j in 0..grid.ny {
        if grid.xface(0, j) == FaceKind::Boundary(BoundaryKind::Inlet) {
            q_in += vel.x_at(0, j) * grid.dy;
        }
        if grid.xface(grid.nx, j) == FaceKind::Boundary(BoundaryKind::Outlet) {
            q_out += vel.x_at(grid.nx, j) * grid.dy;
        }
    }
    (q_in, q_out)
}

/// Cell average of the parabola `6 U (y/H)(1 - y/H)` over `[y0, y1]`.
pub fn inlet_profile(mean: f64, height: f64, y0: f64, y1: f64) -> f64 {
    let prim = |y: f64| height * y * y / 2.0 - y * y * y / 3.0;
    6.0 * mean / (height * height) * (prim(y1) - prim(y0)) / (y1 - y0)
}

/// Inner tolerance of the momentum solves inside the preconditioner.
const INNER_TOL: f64 = 1e-4;

/// Linear system of one outer pass. Unknowns are stacked `[u, v, p]`.
struct Saddle<'a> {
    grid: &'a Grid,
    au: Stencil5,
    av: Stencil5,
    nu: usize,
    nv: usize,
    /// Viscous Schur-complement estimate per fluid cell.
    schur: f64,
}

impl<'a> Saddle<'a> {
    fn len(&self) -> usize {
        self.nu + self.nv + self.grid.nx * self.grid.ny
    }

    fn rhs(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.len());
        b.extend_from_slice(&self.au.b);
        b.extend_from_slice(&self.av.b);
        b.resize(self.len(), 0.0);
        b
    }

    /// Adds the pressure-gradient force on momentum rows, `y += G p`.
    fn add_gradient(&self, p: &[f64], yu: &mut [f64], yv: &mut [f64]) {
        let g = self.grid;
        let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx, g.dy);
        let mx = nx + 1;
        for j in 0..ny {
            for i in 1..=nx {
                let k = j * mx + i;
                if self.au.is_fixed(k) {
                    continue;
                }
                let east = if i < nx { p[g.idx(i, j)] } else { 0.0 };
                yu[k] += (east - p[g.idx(i - 1, j)]) * dy;
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if !self.av.is_fixed(k) {
                    yv[k] += (p[g.idx(i, j)] - p[g.idx(i, j - 1)]) * dx;
                }
            }
        }
    }

    fn apply(&self, z: &[f64], y: &mut [f64]) {
        let (nu, nv) = (self.nu, self.nv);
        let (zu, rest) = z.split_at(nu);
        let (zv, zp) = rest.split_at(nv);
        let (yu, rest) = y.split_at_mut(nu);
        let (yv, yp) = rest.split_at_mut(nv);
        self.au.apply(zu, yu);
        self.av.apply(zv, yv);
        self.add_gradient(zp, yu, yv);
        let g = self.grid;
        let (nx, dx, dy) = (g.nx, g.dx, g.dy);
        for j in 0..g.ny {
            for i in 0..nx {
                let c = g.idx(i, j);
                yp[c] = if g.is_fluid(i, j) {
                    let ue = zu[j * (nx + 1) + i + 1];
                    let uw = zu[j * (nx + 1) + i];
                    let vn = zv[(j + 1) * nx + i];
                    let vs = zv[j * nx + i];
                    -((ue - uw) * dy + (vn - vs) * dx)
                } else {
                    zp[c]
                };
            }
        }
    }

    /// One pressure-correction sweep used as the preconditioner.
    fn precondition(&self, r: &[f64], z: &mut [f64], scratch: &mut (Stencil5, Stencil5)) -> Result<()> {
        let (nu, nv) = (self.nu, self.nv);
        let g = self.grid;
        let (zu, rest) = z.split_at_mut(nu);
        let (zv, zp) = rest.split_at_mut(nv);
        let rp = &r[nu + nv..];
        for (k, c) in g.cells.iter().enumerate() {
            zp[k] = if *c == CellKind::Fluid { -rp[k] / self.schur } else { rp[k] };
        }
        let (su, sv) = scratch;
        su.b.copy_from_slice(&r[..nu]);
        sv.b.copy_from_slice(&r[nu..nu + nv]);
        let mut gu = vec![0.0; nu];
        let mut gv = vec![0.0; nv];
        self.add_gradient(zp, &mut gu, &mut gv);
        for (b, gk) in su.b.iter_mut().zip(&gu) {
            *b -= gk;
        }
        for (b, gk) in sv.b.iter_mut().zip(&gv) {
            *b -= gk;
        }
        zu.iter_mut().for_each(|e| *e = 0.0);
        zv.iter_mut().for_each(|e| *e = 0.0);
        bicgstab(su, zu, SolverOptions::new("u-momentum", INNER_TOL, 2_000))?;
        bicgstab(sv, zv, SolverOptions::new("v-momentum", INNER_TOL, 2_000))?;
        Ok(())
    }
}

struct Builder<'a> {
    grid: &'a Grid,
    force: &'a BodyForceField,
    props: &'a FluidProps,
    inlet: Vec<f64>,
}

impl<'a> Builder<'a> {
    /// Momentum systems with convection frozen at `vel`. The pressure
    /// gradient is kept out of the stencils.
    fn assemble(&self, vel: &FaceField) -> Saddle<'a> {
        let g = self.grid;
        let (nx, ny, dx, dy) = (g.nx, g.ny, g.dx, g.dy);
        let rho = self.props.rho;
        let eta = self.props.eta;
        let (de, dn) = (eta * dy / dx, eta * dx / dy);

        let mx = nx + 1;
        let mut au = Stencil5::new(mx, ny);
        for j in 0..ny {
            for i in 0..mx {
                let k = j * mx + i;
                let outlet = match g.xface(i, j) {
                    FaceKind::Interior => false,
                    FaceKind::Boundary(BoundaryKind::Outlet) => true,
                    FaceKind::Boundary(BoundaryKind::Inlet) => {
                        au.fix(k, self.inlet[j]);
                        continue;
                    }
                    _ => {
                        au.fix(k, 0.0);
                        continue;
                    }
                };
                // The outlet face owns the half cell between the last
                // centre and the outlet plane; a ghost equal to itself
                // removes the east link.
                let w = if outlet { 0.5 } else { 1.0 };
                let fw = rho * dy * 0.5 * (vel.x_at(i - 1, j) + vel.x_at(i, j));
                let (fe, fnn, fs) = if outlet {
                    (rho * dy * vel.x_at(i, j), rho * w * dx * vel.y_at(i - 1, j + 1), rho * w * dx * vel.y_at(i - 1, j))
                } else {
                    (
                        rho * dy * 0.5 * (vel.x_at(i, j) + vel.x_at(i + 1, j)),
                        rho * dx * 0.5 * (vel.y_at(i - 1, j + 1) + vel.y_at(i, j + 1)),
                        rho * dx * 0.5 * (vel.y_at(i - 1, j) + vel.y_at(i, j)),
                    )
                };
                let mut ap = fe - fw + fnn - fs;
                if !outlet {
                    au.ae[k] = de + (-fe).max(0.0);
                    ap += au.ae[k];
                }
                au.aw[k] = de + fw.max(0.0);
                ap += au.aw[k];
                if j + 1 == ny || g.xface(i, j + 1) == FaceKind::Inactive {
                    ap += 2.0 * w * dn;
                } else {
                    au.an[k] = w * dn + (-fnn).max(0.0);
                    ap += au.an[k];
                }
                if j == 0 || g.xface(i, j - 1) == FaceKind::Inactive {
                    ap += 2.0 * w * dn;
                } else {
                    au.as_[k] = w * dn + fs.max(0.0);
                    ap += au.as_[k];
                }
                au.ap[k] = ap;
                au.b[k] = self.force.f.x_at(i, j) * w * dx * dy;
            }
        }

        let my = ny + 1;
        let mut av = Stencil5::new(nx, my);
        for j in 0..my {
            for i in 0..nx {
                let k = j * nx + i;
                if g.yface(i, j) != FaceKind::Interior {
                    av.fix(k, 0.0);
                    continue;
                }
                let fe = rho * dy * 0.5 * (vel.x_at(i + 1, j - 1) + vel.x_at(i + 1, j));
                let fw = rho * dy * 0.5 * (vel.x_at(i, j - 1) + vel.x_at(i, j));
                let fnn = rho * dx * 0.5 * (vel.y_at(i, j) + vel.y_at(i, j + 1));
                let fs = rho * dx * 0.5 * (vel.y_at(i, j - 1) + vel.y_at(i, j));
                let mut ap = fe - fw + fnn - fs;
                if i + 1 == nx {
                    // Zero-gradient outlet: no diffusive link, outflow via ap.
                } else if g.yface(i + 1, j) == FaceKind::Inactive {
                    ap += 2.0 * de;
                } else {
                    av.ae[k] = de + (-fe).max(0.0);
                    ap += av.ae[k];
                }
                if i == 0 {
                    // v = 0 on the inlet plane, half a cell away.
                    ap += 2.0 * de + fw.max(0.0);
                } else if g.yface(i - 1, j) == FaceKind::Inactive {
                    ap += 2.0 * de;
                } else {
                    av.aw[k] = de + fw.max(0.0);
                    ap += av.aw[k];
                }
                av.an[k] = dn + (-fnn).max(0.0);
                av.as_[k] = dn + fs.max(0.0);
                ap += av.an[k] + av.as_[k];
                av.ap[k] = ap;
                av.b[k] = self.force.f.y_at(i, j) * dx * dy;
            }
        }
        let nu = au.len();
        let nv = av.len();
        Saddle {
            grid: g,
            au,
            av,
            nu,
            nv,
            schur: dx * dy / eta,
        }
    }
}

fn pack(vel: &FaceField, p: &ScalarField) -> Vec<f64> {
    let mut z = Vec::with_capacity(vel.x.len() + vel.y.len() + p.values.len());
    z.extend_from_slice(&vel.x);
    z.extend_from_slice(&vel.y);
    z.extend_from_slice(&p.values);
    z
}

fn unpack(z: &[f64], vel: &mut FaceField, p: &mut ScalarField) {
    let (nu, nv) = (vel.x.len(), vel.y.len());
    vel.x.copy_from_slice(&z[..nu]);
    vel.y.copy_from_slice(&z[nu..nu + nv]);
    p.values.copy_from_slice(&z[nu + nv..]);
}

/// Relative momentum residual over unknown rows and the L1 mass imbalance.
fn residuals(sys: &Saddle, z: &[f64], r: &[f64]) -> (f64, f64) {
    let (nu, nv) = (sys.nu, sys.nv);
    let mut r2 = 0.0;
    let mut s2 = 0.0;
    for (k, (rk, zk)) in r[..nu].iter().zip(&z[..nu]).enumerate() {
        if !sys.au.is_fixed(k) {
            r2 += rk * rk;
            s2 += (sys.au.ap[k] * zk) * (sys.au.ap[k] * zk);
        }
    }
    for (k, (rk, zk)) in r[nu..nu + nv].iter().zip(&z[nu..nu + nv]).enumerate() {
        if !sys.av.is_fixed(k) {
            r2 += rk * rk;
            s2 += (sys.av.ap[k] * zk) * (sys.av.ap[k] * zk);
        }
    }
    let momentum = if r2 == 0.0 {
        0.0
    } else if s2 == 0.0 {
        1.0
    } else {
        sqrt(r2 / s2)
    };
    let mass = r[nu + nv..].iter().map(|e| abs(*e)).sum();
    (momentum, mass)
}

/// Steady flow from the developed inlet profile. See [`solve_flow_from`].
pub fn solve_flow(
    grid: &Grid,
    force: &BodyForceField,
    inlet_mean: f64,
    props: &FluidProps,
    opts: &FlowOptions,
) -> Result<FlowField> {
    solve_flow_from(grid, force, inlet_mean, props, opts, None)
}

/// Steady flow, optionally warm-started from `initial`.
pub fn solve_flow_from(
    grid: &Grid,
    force: &BodyForceField,
    inlet_mean: f64,
    props: &FluidProps,
    opts: &FlowOptions,
    initial: Option<&FlowField>,
) -> Result<FlowField> {
    let (nx, ny, dy) = (grid.nx, grid.ny, grid.dy);
    force.f.check_shape(nx, ny)?;
    opts.validate()?;
    if !(inlet_mean >= 0.0 && inlet_mean.is_finite()) {
        return Err(Error::Input(alloc::format!("inlet mean velocity must be >= 0, got {inlet_mean:e}")));
    }
    let height = grid.geometry.channel_height;
    let builder = Builder {
        grid,
        force,
        props,
        inlet: (0..ny)
            .map(|j| inlet_profile(inlet_mean, height, j as f64 * dy, (j + 1) as f64 * dy))
            .collect(),
    };

    let (mut vel, mut p) = match initial {
        Some(f) => {
            f.vel.check_shape(nx, ny)?;
            (f.vel.clone(), f.p.clone())
        }
        None => {
            // The inlet profile carried down the channel: exact for an
            // unforced empty channel apart from the pressure.
            let mut v = FaceField::zeros(nx, ny);
            for j in 0..ny {
                for i in 0..=nx {
                    if matches!(grid.xface(i, j), FaceKind::Interior | FaceKind::Boundary(BoundaryKind::Inlet | BoundaryKind::Outlet)) {
                        let k = v.xi(i, j);
                        v.x[k] = builder.inlet[j];
                    }
                }
            }
            (v, ScalarField::zeros(nx, ny))
        }
    };

    let u_ref = {
        let peak = vel.x.iter().chain(&vel.y).fold(0.0_f64, |m, v| m.max(abs(*v)));
        inlet_mean.max(peak)
    };
    let q_scale = if u_ref > 0.0 { u_ref * height } else { 1.0 };
    let mut history = Vec::new();
    let mut krylov = 0;
    let mut momentum = 0.0;
    let mut continuity = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut z = pack(&vel, &p);
    for it in 1..=opts.max_iter {
        iterations = it;
        let sys = builder.assemble(&vel);
        let b = sys.rhs();
        let mut r = vec![0.0; sys.len()];
        sys.apply(&z, &mut r);
        for (ri, bi) in r.iter_mut().zip(&b) {
            *ri = bi - *ri;
        }
        let (m, mass) = residuals(&sys, &z, &r);
        momentum = m;
        continuity = mass / q_scale;
        history.push(momentum);
        if momentum <= opts.tol && continuity <= opts.tol {
            converged = true;
            break;
        }
        let mut scratch = (sys.au.clone(), sys.av.clone());
        let mut dz = vec![0.0; sys.len()];
        let stats = fgmres(
            |x, y| sys.apply(x, y),
            |x, y| sys.precondition(x, y, &mut scratch),
            &r,
            &mut dz,
            opts.restart,
            SolverOptions::new("coupled flow", opts.krylov_tol, opts.krylov_max_iter),
        )
        .map_err(|_| Error::FlowDivergence {
            iterations: it,
            residual_history: history.clone(),
        })?;
        krylov += stats.iterations;
        for (zi, di) in z.iter_mut().zip(&dz) {
            *zi += di;
        }
        unpack(&z, &mut vel, &mut p);
        if !(norm(&z).is_finite()) {
            return Err(Error::FlowDivergence {
                iterations: it,
                residual_history: history,
            });
        }
    }
    if !converged {
        return Err(Error::FlowDivergence {
            iterations,
            residual_history: history,
        });
    }
    project(grid, &builder.assemble(&vel), &mut vel)?;
    Ok(FlowField {
        vel,
        p,
        stats: FlowStats {
            iterations,
            krylov_iterations: krylov,
            momentum_residual: momentum,
            continuity_residual: continuity,
            residual_history: history,
        },
    })
}

/// Removes the remaining divergence with one tight pressure-correction
/// projection, so that the returned field conserves mass to round-off
/// rather than to the outer tolerance.
fn project(grid: &Grid, sys: &Saddle, vel: &mut FaceField) -> Result<()> {
    let (nx, ny, dx, dy) = (grid.nx, grid.ny, grid.dx, grid.dy);
    let du = |k: usize| if sys.au.is_fixed(k) { 0.0 } else { dy / sys.au.ap[k] };
    let dv = |k: usize| if sys.av.is_fixed(k) { 0.0 } else { dx / sys.av.ap[k] };
    let mut a = Stencil5::new(nx, ny);
    for j in 0..ny {
        for i in 0..nx {
            let c = grid.idx(i, j);
            if !grid.is_fluid(i, j) {
                a.fix(c, 0.0);
                continue;
            }
            let (ue, uw) = (vel.xi(i + 1, j), vel.xi(i, j));
            let (vn, vs) = (vel.yi(i, j + 1), vel.yi(i, j));
            let outlet = grid.xface(i + 1, j) == FaceKind::Boundary(BoundaryKind::Outlet);
            a.ae[c] = if grid.xface(i + 1, j) == FaceKind::Interior { du(ue) * dy } else { 0.0 };
            a.aw[c] = if grid.xface(i, j) == FaceKind::Interior { du(uw) * dy } else { 0.0 };
            a.an[c] = if grid.yface(i, j + 1) == FaceKind::Interior { dv(vn) * dx } else { 0.0 };
            a.as_[c] = if grid.yface(i, j) == FaceKind::Interior { dv(vs) * dx } else { 0.0 };
            // The outlet plane holds p' = 0.
            let boundary = if outlet { du(ue) * dy } else { 0.0 };
            a.ap[c] = a.ae[c] + a.aw[c] + a.an[c] + a.as_[c] + boundary;
            a.b[c] = (vel.x[uw] - vel.x[ue]) * dy + (vel.y[vs] - vel.y[vn]) * dx;
        }
    }
    a.eliminate_fixed_links();
    let mut pc = vec![0.0; nx * ny];
    cg(&a, &mut pc, SolverOptions::new("projection", 1e-13, 20_000))
        .or_else(|_| cg(&a, &mut pc, SolverOptions::new("projection", 1e-10, 20_000)))?;
    for j in 0..ny {
        for i in 1..=nx {
            let k = vel.xi(i, j);
            if sys.au.is_fixed(k) {
                continue;
            }
            let east = if i < nx { pc[grid.idx(i, j)] } else { 0.0 };
            vel.x[k] += du(k) * (pc[grid.idx(i - 1, j)] - east);
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            let k = vel.yi(i, j);
            if !sys.av.is_fixed(k) {
                vel.y[k] += dv(k) * (pc[grid.idx(i, j - 1)] - pc[grid.idx(i, j)]);
            }
        }
    }
    Ok(())
}
