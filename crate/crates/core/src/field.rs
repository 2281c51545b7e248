//! Cell-centred and face-centred storage on a uniform `nx` x `ny` grid.
//!
//! Cells are indexed row-major from the bottom-left corner, `k = j * nx + i`.
//! x-faces sit at `x = i * dx` for `i in 0..=nx`, y-faces at `y = j * dy` for
//! `j in 0..=ny`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A cell-centred scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn filled(nx: usize, ny: usize, value: f64) -> Self {
        Self {
            nx,
            ny,
            values: vec![value; nx * ny],
        }
    }

    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self::filled(nx, ny, 0.0)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.values[k] = v;
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    pub(crate) fn check_shape(&self, nx: usize, ny: usize) -> Result<()> {
        check_shape((nx, ny), self.shape())
    }
}

/// A vector quantity stored by its normal component on each face: x on
/// x-faces, y on y-faces. This is the natural layout for a staggered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    pub nx: usize,
    pub ny: usize,
    /// `(nx + 1) * ny` values, index `j * (nx + 1) + i`.
    pub x: Vec<f64>,
    /// `nx * (ny + 1)` values, index `j * nx + i`.
    pub y: Vec<f64>,
}

impl FaceField {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            x: vec![0.0; (nx + 1) * ny],
            y: vec![0.0; nx * (ny + 1)],
        }
    }

    #[inline]
    pub fn xi(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn yi(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x_at(&self, i: usize, j: usize) -> f64 {
        self.x[self.xi(i, j)]
    }

    #[inline]
    pub fn y_at(&self, i: usize, j: usize) -> f64 {
        self.y[self.yi(i, j)]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Cell-centred components by averaging the two bounding faces.
    pub fn cell_components(&self, i: usize, j: usize) -> (f64, f64) {
        let cx = 0.5 * (self.x_at(i, j) + self.x_at(i + 1, j));
        let cy = 0.5 * (self.y_at(i, j) + self.y_at(i, j + 1));
        (cx, cy)
    }

    /// Largest component magnitude over all faces.
    pub fn max_abs(&self) -> f64 {
        self.x
            .iter()
            .chain(self.y.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            x: self.x.iter().map(|v| v * factor).collect(),
            y: self.y.iter().map(|v| v * factor).collect(),
        }
    }

    pub(crate) fn check_shape(&self, nx: usize, ny: usize) -> Result<()> {
        check_shape((nx, ny), self.shape())
    }
}

pub(crate) fn check_shape(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape { expected, found })
    }
}
