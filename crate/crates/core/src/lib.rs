//! Coupled solvers for AC-electrothermal stirring over a coplanar electrode
//! pair and the surface binding it accelerates on a suspended cantilever.
//!
//! The pipeline for one case is:
//!
//! 1. [`mesh::build_grid`] rasterizes the channel, electrodes and cantilever.
//! 2. [`electrostatics`] solves the rms potential and face-centred field.
//! 3. [`thermal`] solves the steady Joule-heated temperature field.
//! 4. [`etforce`] evaluates the time-averaged electrothermal body force.
//! 5. [`flow`] solves steady incompressible flow on a staggered grid.
//! 6. [`transport`] integrates analyte transport and Langmuir surface kinetics.
//!
//! [`driver`] runs steps 2-5 to a fixed point and then time-steps 6.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, sweeps across
//! worker threads and the command line live in the `etstir` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::field_reassign_with_default))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod driver;
pub mod electrostatics;
pub mod error;
pub mod etforce;
pub mod field;
pub mod flow;
pub mod linalg;
pub(crate) mod math;
pub mod mesh;
pub mod thermal;
pub mod transport;

pub use driver::{CaseConfig, CaseResult, CoupledFields, SteadyState, SweepAxis};
pub use electrostatics::{EField, PotentialField};
pub use error::{Error, Result};
pub use etforce::{BodyForceField, DriveSpec};
pub use field::{FaceField, ScalarField};
pub use flow::FlowField;
pub use mesh::{Geometry, Grid};
pub use thermal::{FluidProps, TemperatureField};
pub use transport::{ConcentrationField, ReactionParams, SurfaceState};

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
