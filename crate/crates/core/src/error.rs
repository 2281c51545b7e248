use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building a grid or running a solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A geometric feature is thinner than two grid cells.
    Resolution {
        feature: &'static str,
        cells: f64,
    },
    /// The geometry is self-inconsistent (cantilever outside the fluid, ...).
    Geometry(String),
    /// An input value is outside its allowed range.
    Input(String),
    /// Two fields that must share a grid do not.
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A linear solve did not reach its tolerance.
    LinearSolver {
        system: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// The SIMPLE pressure-velocity iteration did not converge.
    FlowDivergence {
        iterations: usize,
        residual_history: Vec<f64>,
    },
    /// The Picard loop over thermal, force and flow hit its cap.
    CouplingDivergence {
        iterations: usize,
        /// (u_max, dT_max) after each Picard iteration.
        history: Vec<(f64, f64)>,
    },
    /// Concentration went negative beyond tolerance.
    Monotonicity {
        min_value: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Resolution { feature, cells } => write!(
                f,
                "{feature} is resolved by {cells:.2} cells, at least 2 are required"
            ),
            Error::Geometry(msg) => write!(f, "invalid geometry: {msg}"),
            Error::Input(msg) => write!(f, "invalid input: {msg}"),
            Error::Shape { expected, found } => write!(
                f,
                "grid shape mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::LinearSolver {
                system,
                iterations,
                residual,
            } => write!(
                f,
                "{system} solve did not converge after {iterations} iterations (relative residual {residual:e})"
            ),
            Error::FlowDivergence {
                iterations,
                residual_history,
            } => write!(
                f,
                "pressure-velocity iteration did not converge after {iterations} iterations (last residual {:e})",
                residual_history.last().copied().unwrap_or(f64::NAN)
            ),
            Error::CouplingDivergence { iterations, history } => {
                write!(f, "coupled field iteration did not converge after {iterations} iterations")?;
                if let Some((u, t)) = history.last() {
                    write!(f, " (last u_max {u:e} m/s, dT_max {t:e} K)")?;
                }
                Ok(())
            }
            Error::Monotonicity { min_value } => {
                write!(f, "concentration dropped to {min_value:e} mol/m^3")
            }
        }
    }
}

impl core::error::Error for Error {}
