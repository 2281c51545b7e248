//! Time-averaged electrothermal body force.
//!
//! Joule heating makes conductivity and permittivity vary in space through
//! `grad(sigma)/sigma = alpha_sigma grad(T)` and
//! `grad(eps)/eps = alpha_eps grad(T)`. The resulting force density is
//!
//! ```text
//! F = -(eps/2) [ (alpha_sigma - alpha_eps) (grad T . E) E / (1 + (omega tau)^2)
//!               + (|E|^2 / 2) alpha_eps grad T ]
//! ```
//!
//! with `tau = eps / sigma`. The first (Coulomb) term dominates for
//! `omega tau << 1`, the second (dielectric) term for `omega tau >> 1`.

use alloc::format;

use crate::electrostatics::EField;
use crate::error::{Error, Result};
use crate::field::FaceField;
use crate::mesh::Grid;
use crate::thermal::{FluidProps, TemperatureField};

/// AC drive: rms potential difference between the electrodes and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DriveSpec {
    /// Hz.
    pub frequency: f64,
    /// V (rms difference).
    pub v_rms: f64,
}

impl Default for DriveSpec {
    fn default() -> Self {
        Self {
            frequency: 1e5,
            v_rms: 25.0,
        }
    }
}

impl DriveSpec {
    /// Angular frequency, rad/s.
    pub fn omega(&self) -> f64 {
        2.0 * core::f64::consts::PI * self.frequency
    }

    pub fn validate(&self) -> Result<()> {
        if !self.v_rms.is_finite() || self.v_rms < 0.0 {
            return Err(Error::Input(format!("v_rms must be finite and nonnegative, got {}", self.v_rms)));
        }
        if self.v_rms > 0.0 && !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::Input(format!(
                "frequency must be positive when driving, got {}",
                self.frequency
            )));
        }
        Ok(())
    }
}

/// Force density on the faces of the staggered grid, N/m^3.
#[derive(Debug, Clone)]
pub struct BodyForceField {
    pub f: FaceField,
}

impl BodyForceField {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self { f: FaceField::zeros(nx, ny) }
    }

    pub fn max_abs(&self) -> f64 {
        self.f.max_abs()
    }
}

/// `tau = eps / sigma`, s.
pub fn charge_relaxation_time(props: &FluidProps) -> f64 {
    props.eps() / props.sigma
}

/// Point evaluation of the force density for given `E` (V/m) and `grad T`
/// (K/m).
pub fn force_density(e: (f64, f64), grad_t: (f64, f64), props: &FluidProps, omega: f64) -> (f64, f64) {
    let eps = props.eps();
    let wt = omega * charge_relaxation_time(props);
    let coulomb = (props.alpha_sigma - props.alpha_eps) * (grad_t.0 * e.0 + grad_t.1 * e.1) / (1.0 + wt * wt);
    let e2 = e.0 * e.0 + e.1 * e.1;
    let dielectric = 0.5 * e2 * props.alpha_eps;
    (
        -0.5 * eps * (coulomb * e.0 + dielectric * grad_t.0),
        -0.5 * eps * (coulomb * e.1 + dielectric * grad_t.1),
    )
}

/// Cell-centred components of a face field, averaging the two faces.
fn cell_avg(f: &FaceField, i: usize, j: usize) -> (f64, f64) {
    f.cell_components(i, j)
}

/// Evaluates the force on every face adjacent to fluid. The face-normal
/// components of `E` and `grad T` are used directly; tangential components
/// come from averaging the cell-centred values on either side.
pub fn compute_et_force(
    grid: &Grid,
    e: &EField,
    t: &TemperatureField,
    props: &FluidProps,
    drive: &DriveSpec,
) -> Result<BodyForceField> {
    let (nx, ny) = (grid.nx, grid.ny);
    e.e.check_shape(nx, ny)?;
    t.grad.check_shape(nx, ny)?;
    let omega = drive.omega();
    let mut f = FaceField::zeros(nx, ny);
    for j in 0..ny {
        for i in 0..=nx {
            let left = i > 0 && grid.is_fluid(i - 1, j);
            let right = i < nx && grid.is_fluid(i, j);
            if !left && !right {
                continue;
            }
            let mut ey = 0.0;
            let mut gy = 0.0;
            let mut n = 0.0;
            for (ok, ci) in [(left, i.wrapping_sub(1)), (right, i)] {
                if ok {
                    ey += cell_avg(&e.e, ci, j).1;
                    gy += cell_avg(&t.grad, ci, j).1;
                    n += 1.0;
                }
            }
            let ex = e.e.x_at(i, j);
            let gx = t.grad.x_at(i, j);
            let (fx, _) = force_density((ex, ey / n), (gx, gy / n), props, omega);
            let k = f.xi(i, j);
            f.x[k] = fx;
        }
    }
    for j in 0..=ny {
        for i in 0..nx {
            let below = j > 0 && grid.is_fluid(i, j - 1);
            let above = j < ny && grid.is_fluid(i, j);
            if !below && !above {
                continue;
            }
            let mut ex = 0.0;
            let mut gx = 0.0;
            let mut n = 0.0;
            for (ok, cj) in [(below, j.wrapping_sub(1)), (above, j)] {
                if ok {
                    ex += cell_avg(&e.e, i, cj).0;
                    gx += cell_avg(&t.grad, i, cj).0;
                    n += 1.0;
                }
            }
            let ey = e.e.y_at(i, j);
            let gy = t.grad.y_at(i, j);
            let (_, fy) = force_density((ex / n, ey), (gx / n, gy), props, omega);
            let k = f.yi(i, j);
            f.y[k] = fy;
        }
    }
    Ok(BodyForceField { f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::linalg::SolveStats;
    use crate::mesh::{build_grid, Geometry};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn relaxation_time_from_table_constants() {
        let p = FluidProps::default();
        let tau = charge_relaxation_time(&p);
        assert!(rel(tau, 1.235e-8) < 1e-3, "{tau:e}");
        let mut p2 = p.clone();
        p2.sigma *= 2.0;
        assert!(rel(charge_relaxation_time(&p2), 0.5 * tau) < 1e-12);
        let crossover = 1.0 / (2.0 * core::f64::consts::PI * tau);
        assert!(rel(crossover, 12.9e6) < 5e-3, "{crossover:e}");
    }

    fn uniform(nx: usize, ny: usize, v: (f64, f64)) -> FaceField {
        let mut f = FaceField::zeros(nx, ny);
        f.x.iter_mut().for_each(|x| *x = v.0);
        f.y.iter_mut().for_each(|y| *y = v.1);
        f
    }

    fn synthetic(e: (f64, f64), g: (f64, f64), freq: f64) -> BodyForceField {
        let grid = build_grid(&Geometry::empty_channel(100e-6, 100e-6), 8, 8).unwrap();
        let ef = EField { e: uniform(8, 8, e), e2: ScalarField::zeros(8, 8) };
        let tf = TemperatureField {
            t: ScalarField::filled(8, 8, 300.0),
            grad: uniform(8, 8, g),
            t_ref: 300.0,
            stats: SolveStats { iterations: 0, residual: 0.0 },
        };
        compute_et_force(&grid, &ef, &tf, &FluidProps::default(), &DriveSpec { frequency: freq, v_rms: 1.0 }).unwrap()
    }

    #[test]
    fn low_frequency_coulomb_dominated() {
        let f = synthetic((1e5, 0.0), (1e4, 0.0), 1e5);
        for &fx in &f.f.x {
            assert!(rel(fx, -781.0) < 5e-3, "{fx}");
        }
        assert!(f.f.y.iter().all(|&v| v.abs() < 1e-9));
    }

    #[test]
    fn high_frequency_sign_flip() {
        let f = synthetic((1e5, 0.0), (1e4, 0.0), 1e9);
        for &fx in &f.f.x {
            assert!(rel(fx, 70.9) < 5e-3, "{fx}");
        }
    }

    #[test]
    fn vanishes_without_gradient_or_field() {
        let f = synthetic((1e5, 2e4), (0.0, 0.0), 1e5);
        assert_eq!(f.max_abs(), 0.0);
        let f = synthetic((0.0, 0.0), (1e4, 3e3), 1e5);
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn coulomb_term_falls_with_frequency() {
        let p = FluidProps::default();
        let mut prev = f64::INFINITY;
        for f in [1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9] {
            let omega = 2.0 * core::f64::consts::PI * f;
            // Remove the dielectric part by taking grad T perpendicular to E.
            let (fx, _) = force_density((1e5, 0.0), (1e4, 0.0), &p, omega);
            let (dx, _) = force_density((1e5, 0.0), (1e4, 0.0), &p, f64::INFINITY);
            let coulomb = (fx - dx).abs();
            assert!(coulomb <= prev);
            prev = coulomb;
        }
        let dc = force_density((1e5, 3e4), (1e4, -2e4), &p, 0.0);
        let mhz = force_density((1e5, 3e4), (1e4, -2e4), &p, 2.0 * core::f64::consts::PI * 1e5);
        assert!(rel(mhz.0, dc.0) < 1e-3 && rel(mhz.1, dc.1) < 1e-3);
    }

    #[test]
    fn shape_mismatch() {
        let grid = build_grid(&Geometry::empty_channel(100e-6, 100e-6), 8, 8).unwrap();
        let ef = EField { e: FaceField::zeros(4, 4), e2: ScalarField::zeros(4, 4) };
        let tf = TemperatureField::uniform(8, 8, 300.0);
        let r = compute_et_force(&grid, &ef, &tf, &FluidProps::default(), &DriveSpec::default());
        assert!(matches!(r, Err(Error::Shape { .. })));
    }
}
