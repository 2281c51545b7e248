//! Channel geometry and its stair-step rasterization onto a uniform grid.
//!
//! The channel runs along x from the inlet (x = 0) to the outlet
//! (x = `channel_length`). Two coplanar electrodes sit on the bottom wall,
//! symmetric about `electrode_pair_center_x`. The cantilever is a solid
//! rectangle suspended in the fluid above the electrode gap, and the
//! selected side(s) of it carry the immobilized ligand.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, floor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CantileverMode {
    /// Solid obstacle inside the fluid.
    Suspended,
    /// No obstacle; a segment of the top wall is reactive instead.
    TopWallSegment,
    /// Empty channel, no reaction surface.
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReactiveSide {
    Bottom,
    Top,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ElectrodeLayout {
    /// Two electrodes side by side on the bottom wall.
    Coplanar,
    /// Entire bottom wall is electrode A, entire top wall electrode B.
    ParallelPlate,
    /// Bare channel.
    None,
}

/// Channel, electrode and cantilever dimensions, all in metres.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Geometry {
    pub channel_length: f64,
    pub channel_height: f64,
    pub electrode_layout: ElectrodeLayout,
    pub electrode_width: f64,
    pub electrode_gap: f64,
    pub electrode_pair_center_x: f64,
    pub cantilever_mode: CantileverMode,
    pub cantilever_length: f64,
    pub cantilever_thickness: f64,
    pub cantilever_center: (f64, f64),
    pub reactive_faces: ReactiveSide,
}

impl Default for Geometry {
    /// 500 x 100 um channel, 60 um electrodes with a 15 um gap centred at
    /// x = 250 um, and a 40 x 4 um cantilever whose bottom (reactive) face
    /// is 20 um above the gap.
    fn default() -> Self {
        Self {
            channel_length: 500e-6,
            channel_height: 100e-6,
            electrode_layout: ElectrodeLayout::Coplanar,
            electrode_width: 60e-6,
            electrode_gap: 15e-6,
            electrode_pair_center_x: 250e-6,
            cantilever_mode: CantileverMode::Suspended,
            cantilever_length: 40e-6,
            cantilever_thickness: 4e-6,
            cantilever_center: (250e-6, 22e-6),
            reactive_faces: ReactiveSide::Bottom,
        }
    }
}

impl Geometry {
    /// Bare channel with no electrodes and no cantilever.
    pub fn empty_channel(length: f64, height: f64) -> Self {
        Self {
            channel_length: length,
            channel_height: height,
            electrode_layout: ElectrodeLayout::None,
            cantilever_mode: CantileverMode::Absent,
            ..Self::default()
        }
    }

    /// x-extent of electrode A (left, driven at +V/2).
    pub fn electrode_a_span(&self) -> (f64, f64) {
        let inner = self.electrode_pair_center_x - 0.5 * self.electrode_gap;
        (inner - self.electrode_width, inner)
    }

    /// x-extent of electrode B (right, driven at -V/2).
    pub fn electrode_b_span(&self) -> (f64, f64) {
        let inner = self.electrode_pair_center_x + 0.5 * self.electrode_gap;
        (inner, inner + self.electrode_width)
    }

    /// Cantilever bounding box `(x0, x1, y0, y1)`.
    pub fn cantilever_box(&self) -> (f64, f64, f64, f64) {
        let (cx, cy) = self.cantilever_center;
        let hl = 0.5 * self.cantilever_length;
        let ht = 0.5 * self.cantilever_thickness;
        (cx - hl, cx + hl, cy - ht, cy + ht)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("channel_length", self.channel_length),
            ("channel_height", self.channel_height),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v:e}")));
            }
        }
        if self.electrode_layout == ElectrodeLayout::Coplanar {
            if !(self.electrode_width > 0.0) || !(self.electrode_gap > 0.0) {
                return Err(Error::Geometry(format!(
                    "electrode width and gap must be positive, got {:e} and {:e}",
                    self.electrode_width, self.electrode_gap
                )));
            }
            let (a0, _) = self.electrode_a_span();
            let (_, b1) = self.electrode_b_span();
            if a0 < 0.0 || b1 > self.channel_length {
                return Err(Error::Geometry(format!(
                    "electrodes span [{a0:e}, {b1:e}] m, outside the channel [0, {:e}] m",
                    self.channel_length
                )));
            }
        }
        match self.cantilever_mode {
            CantileverMode::Absent => {}
            CantileverMode::Suspended => {
                if !(self.cantilever_length > 0.0) || !(self.cantilever_thickness > 0.0) {
                    return Err(Error::Geometry(format!(
                        "cantilever must have positive size, got {:e} x {:e}",
                        self.cantilever_length, self.cantilever_thickness
                    )));
                }
                let (x0, x1, y0, y1) = self.cantilever_box();
                if x0 <= 0.0 || x1 >= self.channel_length || y0 <= 0.0 || y1 >= self.channel_height {
                    return Err(Error::Geometry(format!(
                        "cantilever [{x0:e}, {x1:e}] x [{y0:e}, {y1:e}] m is not strictly inside the channel"
                    )));
                }
            }
            CantileverMode::TopWallSegment => {
                if !(self.cantilever_length > 0.0) {
                    return Err(Error::Geometry("reactive segment length must be positive".into()));
                }
                let (x0, x1, _, _) = self.cantilever_box();
                if x0 < 0.0 || x1 > self.channel_length {
                    return Err(Error::Geometry(format!(
                        "reactive segment [{x0:e}, {x1:e}] m is outside the channel"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Fluid,
    Solid,
}

impl CellKind {
    /// Code used by the plain-text grid dump.
    pub fn code(self) -> u8 {
        match self {
            CellKind::Fluid => 0,
            CellKind::Solid => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Inlet,
    Outlet,
    Wall,
    ElectrodeA,
    ElectrodeB,
    Reactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    /// Between two fluid cells.
    Interior,
    /// Between a fluid cell and the outside or a solid cell.
    Boundary(BoundaryKind),
    /// Not adjacent to any fluid cell.
    Inactive,
}

/// Outward normal of a boundary face, seen from its fluid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normal {
    East,
    West,
    North,
    South,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactiveFace {
    /// Fluid cell that owns the face.
    pub i: usize,
    pub j: usize,
    pub normal: Normal,
    /// Face length per unit depth, m.
    pub length: f64,
    /// Face centre, m.
    pub x: f64,
    pub y: f64,
}

/// Uniform structured grid with per-cell and per-face classification.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub geometry: Geometry,
    pub cells: Vec<CellKind>,
    /// `(nx + 1) * ny` x-faces, index `j * (nx + 1) + i`.
    pub xfaces: Vec<FaceKind>,
    /// `nx * (ny + 1)` y-faces, index `j * nx + i`.
    pub yfaces: Vec<FaceKind>,
    /// Reactive faces ordered by y-face row, then x.
    pub reactive: Vec<ReactiveFace>,
}

fn resolved(feature: &'static str, size: f64, spacing: f64) -> Result<()> {
    let cells = size / spacing;
    if cells < 2.0 - 1e-9 {
        Err(Error::Resolution { feature, cells })
    } else {
        Ok(())
    }
}

fn within(x: f64, span: (f64, f64)) -> bool {
    x >= span.0 && x <= span.1
}

/// Rasterizes `geometry` onto an `nx` x `ny` grid.
pub fn build_grid(geometry: &Geometry, nx: usize, ny: usize) -> Result<Grid> {
    geometry.validate()?;
    if nx < 2 || ny < 2 {
        return Err(Error::Input(format!("grid must be at least 2x2, got {nx}x{ny}")));
    }
    let dx = geometry.channel_length / nx as f64;
    let dy = geometry.channel_height / ny as f64;

    if geometry.electrode_layout == ElectrodeLayout::Coplanar {
        resolved("electrode gap", geometry.electrode_gap, dx)?;
        resolved("electrode width", geometry.electrode_width, dx)?;
    }
    match geometry.cantilever_mode {
        CantileverMode::Suspended => {
            resolved("cantilever thickness", geometry.cantilever_thickness, dy)?;
            resolved("cantilever length", geometry.cantilever_length, dx)?;
        }
        CantileverMode::TopWallSegment => {
            resolved("reactive segment", geometry.cantilever_length, dx)?;
        }
        CantileverMode::Absent => {}
    }

    let mut cells = vec![CellKind::Fluid; nx * ny];
    if geometry.cantilever_mode == CantileverMode::Suspended {
        let (x0, x1, y0, y1) = geometry.cantilever_box();
        for j in 0..ny {
            let yc = (j as f64 + 0.5) * dy;
            if yc < y0 || yc > y1 {
                continue;
            }
            for i in 0..nx {
                let xc = (i as f64 + 0.5) * dx;
                if xc >= x0 && xc <= x1 {
                    cells[j * nx + i] = CellKind::Solid;
                }
            }
        }
        if !cells.contains(&CellKind::Solid) {
            return Err(Error::Geometry("cantilever covers no cell centre".into()));
        }
    }
    let fluid = |i: usize, j: usize| cells[j * nx + i] == CellKind::Fluid;

    let mut xfaces = vec![FaceKind::Inactive; (nx + 1) * ny];
    for j in 0..ny {
        for i in 0..=nx {
            let left = i > 0 && fluid(i - 1, j);
            let right = i < nx && fluid(i, j);
            xfaces[j * (nx + 1) + i] = match (i, left, right) {
                (0, _, true) => FaceKind::Boundary(BoundaryKind::Inlet),
                (_, true, false) if i == nx => FaceKind::Boundary(BoundaryKind::Outlet),
                (_, true, true) => FaceKind::Interior,
                (_, true, false) | (_, false, true) => FaceKind::Boundary(BoundaryKind::Wall),
                _ => FaceKind::Inactive,
            };
        }
    }

    let a_span = geometry.electrode_a_span();
    let b_span = geometry.electrode_b_span();
    let (sx0, sx1, _, _) = geometry.cantilever_box();
    let mut yfaces = vec![FaceKind::Inactive; nx * (ny + 1)];
    let mut reactive = Vec::new();
    for j in 0..=ny {
        for i in 0..nx {
            let xc = (i as f64 + 0.5) * dx;
            let below = j > 0 && fluid(i, j - 1);
            let above = j < ny && fluid(i, j);
            let kind = if j == 0 {
                if !above {
                    FaceKind::Inactive
                } else {
                    FaceKind::Boundary(match geometry.electrode_layout {
                        ElectrodeLayout::Coplanar if within(xc, a_span) => BoundaryKind::ElectrodeA,
                        ElectrodeLayout::Coplanar if within(xc, b_span) => BoundaryKind::ElectrodeB,
                        ElectrodeLayout::ParallelPlate => BoundaryKind::ElectrodeA,
                        _ => BoundaryKind::Wall,
                    })
                }
            } else if j == ny {
                if !below {
                    FaceKind::Inactive
                } else if geometry.electrode_layout == ElectrodeLayout::ParallelPlate {
                    FaceKind::Boundary(BoundaryKind::ElectrodeB)
                } else if geometry.cantilever_mode == CantileverMode::TopWallSegment && within(xc, (sx0, sx1)) {
                    reactive.push(ReactiveFace {
                        i,
                        j: j - 1,
                        normal: Normal::North,
                        length: dx,
                        x: xc,
                        y: j as f64 * dy,
                    });
                    FaceKind::Boundary(BoundaryKind::Reactive)
                } else {
                    FaceKind::Boundary(BoundaryKind::Wall)
                }
            } else {
                match (below, above) {
                    (true, true) => FaceKind::Interior,
                    (false, false) => FaceKind::Inactive,
                    (true, false) => {
                        // Underside of the obstacle.
                        if matches!(geometry.reactive_faces, ReactiveSide::Bottom | ReactiveSide::Both) {
                            reactive.push(ReactiveFace {
                                i,
                                j: j - 1,
                                normal: Normal::North,
                                length: dx,
                                x: xc,
                                y: j as f64 * dy,
                            });
                            FaceKind::Boundary(BoundaryKind::Reactive)
                        } else {
                            FaceKind::Boundary(BoundaryKind::Wall)
                        }
                    }
                    (false, true) => {
                        if matches!(geometry.reactive_faces, ReactiveSide::Top | ReactiveSide::Both) {
                            reactive.push(ReactiveFace {
                                i,
                                j,
                                normal: Normal::South,
                                length: dx,
                                x: xc,
                                y: j as f64 * dy,
                            });
                            FaceKind::Boundary(BoundaryKind::Reactive)
                        } else {
                            FaceKind::Boundary(BoundaryKind::Wall)
                        }
                    }
                }
            };
            yfaces[j * nx + i] = kind;
        }
    }

    let grid = Grid {
        nx,
        ny,
        dx,
        dy,
        geometry: geometry.clone(),
        cells,
        xfaces,
        yfaces,
        reactive,
    };
    if !grid.fluid_connected() {
        return Err(Error::Geometry("fluid region is not connected from inlet to outlet".into()));
    }
    Ok(grid)
}

impl Grid {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn is_fluid(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.nx + i] == CellKind::Fluid
    }

    #[inline]
    pub fn xface(&self, i: usize, j: usize) -> FaceKind {
        self.xfaces[j * (self.nx + 1) + i]
    }

    #[inline]
    pub fn yface(&self, i: usize, j: usize) -> FaceKind {
        self.yfaces[j * self.nx + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.dx, (j as f64 + 0.5) * self.dy)
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn fluid_cell_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == CellKind::Fluid).count()
    }

    pub fn solid_cell_count(&self) -> usize {
        self.cells.len() - self.fluid_cell_count()
    }

    pub fn reactive_length(&self) -> f64 {
        self.reactive.iter().map(|f| f.length).sum()
    }

    /// Total length of bottom-wall faces of the given kind.
    pub fn boundary_length(&self, kind: BoundaryKind) -> f64 {
        let x = self
            .xfaces
            .iter()
            .filter(|f| **f == FaceKind::Boundary(kind))
            .count() as f64
            * self.dy;
        let y = self
            .yfaces
            .iter()
            .filter(|f| **f == FaceKind::Boundary(kind))
            .count() as f64
            * self.dx;
        x + y
    }

    /// Column index whose cell centre is closest to `x`.
    pub fn column_at(&self, x: f64) -> usize {
        let i = floor(x / self.dx) as isize;
        i.clamp(0, self.nx as isize - 1) as usize
    }

    /// Index of the column pair straddling `x` when `x` lies on a cell
    /// boundary, otherwise the containing column twice.
    pub fn columns_around(&self, x: f64) -> (usize, usize) {
        let s = x / self.dx;
        let nearest = crate::math::round(s);
        if abs(s - nearest) < 1e-9 && nearest >= 1.0 && (nearest as usize) < self.nx {
            (nearest as usize - 1, nearest as usize)
        } else {
            let i = self.column_at(x);
            (i, i)
        }
    }

    fn fluid_connected(&self) -> bool {
        let (nx, ny) = (self.nx, self.ny);
        let mut seen = vec![false; nx * ny];
        let mut queue = VecDeque::new();
        for j in 0..ny {
            if self.is_fluid(0, j) {
                seen[j * nx] = true;
                queue.push_back((0usize, j));
            }
        }
        while let Some((i, j)) = queue.pop_front() {
            let mut visit = |a: usize, b: usize| {
                let k = b * nx + a;
                if !seen[k] && self.cells[k] == CellKind::Fluid {
                    seen[k] = true;
                    queue.push_back((a, b));
                }
            };
            if i + 1 < nx {
                visit(i + 1, j);
            }
            if i > 0 {
                visit(i - 1, j);
            }
            if j + 1 < ny {
                visit(i, j + 1);
            }
            if j > 0 {
                visit(i, j - 1);
            }
        }
        let all_fluid_seen = self
            .cells
            .iter()
            .zip(&seen)
            .all(|(c, s)| *c == CellKind::Solid || *s);
        let reaches_outlet = (0..ny).any(|j| seen[j * nx + nx - 1]);
        all_fluid_seen && reaches_outlet
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_grid() -> Grid {
        build_grid(&Geometry::default(), 256, 96).unwrap()
    }

    #[test]
    fn empty_channel_4x4() {
        let g = build_grid(&Geometry::empty_channel(500e-6, 100e-6), 4, 4).unwrap();
        assert_eq!(g.fluid_cell_count(), 16);
        assert!(g.reactive.is_empty());
    }

    #[test]
    fn electrode_a_placement() {
        let g = default_grid();
        let cx = 250e-6;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..g.nx {
            if g.yface(i, 0) == FaceKind::Boundary(BoundaryKind::ElectrodeA) {
                lo = lo.min(i as f64 * g.dx);
                hi = hi.max((i + 1) as f64 * g.dx);
            }
        }
        assert!((lo - (cx - 67.5e-6)).abs() <= g.dx, "{lo:e}");
        assert!((hi - (cx - 7.5e-6)).abs() <= g.dx, "{hi:e}");
        let len_a = g.boundary_length(BoundaryKind::ElectrodeA);
        let len_b = g.boundary_length(BoundaryKind::ElectrodeB);
        assert!((len_a - 60e-6).abs() <= g.dx);
        assert!((len_b - 60e-6).abs() <= g.dx);
    }

    #[test]
    fn cantilever_cell_count() {
        let g = default_grid();
        // Independent count: cell centres inside the box.
        let (x0, x1, y0, y1) = g.geometry.cantilever_box();
        let cols = (0..g.nx)
            .filter(|&i| {
                let x = (i as f64 + 0.5) * g.dx;
                x >= x0 && x <= x1
            })
            .count();
        let rows = (0..g.ny)
            .filter(|&j| {
                let y = (j as f64 + 0.5) * g.dy;
                y >= y0 && y <= y1
            })
            .count();
        assert_eq!(g.solid_cell_count(), cols * rows);
        let nominal = libm::round(40e-6 / g.dx) * libm::round(4e-6 / g.dy);
        assert!((g.solid_cell_count() as f64 - nominal).abs() <= cols.max(rows) as f64);
    }

    #[test]
    fn areas_sum_to_channel() {
        let g = default_grid();
        let total = (g.fluid_cell_count() + g.solid_cell_count()) as f64 * g.cell_area();
        assert!((total - 500e-6 * 100e-6).abs() < 1e-20);
    }

    #[test]
    fn reactive_length_one_and_both_sides() {
        let g = default_grid();
        assert!((g.reactive_length() - 40e-6).abs() <= g.dx);
        let mut geo = Geometry::default();
        geo.reactive_faces = ReactiveSide::Both;
        let g2 = build_grid(&geo, 256, 96).unwrap();
        assert!((g2.reactive_length() - 80e-6).abs() <= 2.0 * g.dx);
    }

    #[test]
    fn reactive_faces_border_one_fluid_cell() {
        let mut geo = Geometry::default();
        geo.reactive_faces = ReactiveSide::Both;
        let g = build_grid(&geo, 128, 64).unwrap();
        for f in &g.reactive {
            assert!(g.is_fluid(f.i, f.j));
            let other = match f.normal {
                Normal::North => (f.j + 1 < g.ny).then(|| (f.i, f.j + 1)),
                Normal::South => (f.j > 0).then(|| (f.i, f.j - 1)),
                _ => unreachable!(),
            };
            if let Some((a, b)) = other {
                assert!(!g.is_fluid(a, b));
            }
        }
    }

    #[test]
    fn top_wall_segment_mode() {
        let mut geo = Geometry::default();
        geo.cantilever_mode = CantileverMode::TopWallSegment;
        let g = build_grid(&geo, 128, 32).unwrap();
        assert_eq!(g.solid_cell_count(), 0);
        assert!((g.reactive_length() - 40e-6).abs() <= g.dx);
        assert!(g.reactive.iter().all(|f| f.j == g.ny - 1));
    }

    #[test]
    fn boundary_classified_exactly_once() {
        let g = default_grid();
        // Every face of every fluid cell is either interior or boundary.
        for j in 0..g.ny {
            for i in 0..g.nx {
                let faces = [g.xface(i, j), g.xface(i + 1, j), g.yface(i, j), g.yface(i, j + 1)];
                for f in faces {
                    if g.is_fluid(i, j) {
                        assert_ne!(f, FaceKind::Inactive);
                    }
                }
            }
        }
        // Outer boundary: inlet/outlet columns and top/bottom rows.
        for j in 0..g.ny {
            assert_eq!(g.xface(0, j), FaceKind::Boundary(BoundaryKind::Inlet));
            assert_eq!(g.xface(g.nx, j), FaceKind::Boundary(BoundaryKind::Outlet));
        }
        for i in 0..g.nx {
            assert!(matches!(g.yface(i, 0), FaceKind::Boundary(_)));
            assert!(matches!(g.yface(i, g.ny), FaceKind::Boundary(_)));
        }
    }

    #[test]
    fn refinement_covers_coarse_electrodes() {
        let coarse = build_grid(&Geometry::default(), 128, 64).unwrap();
        let fine = build_grid(&Geometry::default(), 256, 128).unwrap();
        for i in 0..coarse.nx {
            let kind = coarse.yface(i, 0);
            if matches!(kind, FaceKind::Boundary(BoundaryKind::ElectrodeA | BoundaryKind::ElectrodeB)) {
                // At least one of the two fine faces underneath agrees.
                assert!(fine.yface(2 * i, 0) == kind || fine.yface(2 * i + 1, 0) == kind);
            }
        }
    }

    #[test]
    fn thin_gap_is_a_resolution_error() {
        let err = build_grid(&Geometry::default(), 40, 96).unwrap_err();
        assert!(matches!(err, Error::Resolution { feature: "electrode gap", .. }), "{err:?}");
        let err = build_grid(&Geometry::default(), 256, 40).unwrap_err();
        assert!(matches!(err, Error::Resolution { feature: "cantilever thickness", .. }));
    }

    #[test]
    fn cantilever_outside_domain() {
        let mut geo = Geometry::default();
        geo.cantilever_center = (250e-6, 1e-6);
        assert!(matches!(build_grid(&geo, 256, 96), Err(Error::Geometry(_))));
        geo.cantilever_center = (490e-6, 50e-6);
        assert!(matches!(build_grid(&geo, 256, 96), Err(Error::Geometry(_))));
    }

    #[test]
    fn electrodes_must_fit() {
        let mut geo = Geometry::default();
        geo.electrode_pair_center_x = 30e-6;
        assert!(matches!(build_grid(&geo, 256, 96), Err(Error::Geometry(_))));
    }
}
