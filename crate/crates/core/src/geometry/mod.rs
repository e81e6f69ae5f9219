//! Uniform space-time grids, sampled fields and parabolic cylinders.

mod csv;
mod cylinder;
mod field;

pub use csv::{format_g17, read_field_csv, write_field_csv};
pub use cylinder::{cylinder_nodes, sup_on_cylinder, ParabolicCylinder};
pub use field::{ConstantFunction, ScalarField, SpaceTimeFunction};

use crate::error::{Error, Result};

/// Relative slack used when deciding whether a coordinate lies inside a
/// closed interval. Keeps round-off in `origin + i * h` from excluding
/// nodes that sit exactly on a domain edge.
pub(crate) const COORD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitSystem {
    Physical,
    #[default]
    Normalized,
}

/// Uniform Cartesian grid in one or two space dimensions.
///
/// Axis data for the unused second axis of a 1D grid is kept at
/// `origin = 0, n_cells = 0` and never read.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    origin: [f64; 2],
    h: [f64; 2],
    n_cells: [usize; 2],
    unit_system: UnitSystem,
}

impl Grid {
    /// Builds a grid with spacing `extent / n_cells` on every axis.
    pub fn new(dim: usize, origin: &[f64], extent: &[f64], n_cells: &[usize]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if origin.len() != dim || extent.len() != dim || n_cells.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} entries for origin, extent and n_cells"
            )));
        }
        let mut grid = Grid {
            dim,
            origin: [0.0; 2],
            h: [0.0; 2],
            n_cells: [0; 2],
            unit_system: UnitSystem::Normalized,
        };
        for axis in 0..dim {
            if !(extent[axis] > 0.0) || !extent[axis].is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "extent on axis {axis} must be positive, got {}",
                    extent[axis]
                )));
            }
            if n_cells[axis] < 2 {
                return Err(Error::InvalidGrid(format!(
                    "need at least 2 cells on axis {axis}, got {}",
                    n_cells[axis]
                )));
            }
            if !origin[axis].is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "origin on axis {axis} is not finite"
                )));
            }
            grid.origin[axis] = origin[axis];
            grid.n_cells[axis] = n_cells[axis];
            grid.h[axis] = extent[axis] / n_cells[axis] as f64;
        }
        Ok(grid)
    }

    pub fn new_1d(origin: f64, extent: f64, n_cells: usize) -> Result<Self> {
        Self::new(1, &[origin], &[extent], &[n_cells])
    }

    pub fn new_2d(origin: [f64; 2], extent: [f64; 2], n_cells: [usize; 2]) -> Result<Self> {
        Self::new(2, &origin, &extent, &n_cells)
    }

    pub fn with_unit_system(mut self, unit_system: UnitSystem) -> Self {
        self.unit_system = unit_system;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit_system(&self) -> UnitSystem {
        self.unit_system
    }

    pub fn origin(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    pub fn h(&self, axis: usize) -> f64 {
        self.h[axis]
    }

    pub fn n_cells(&self, axis: usize) -> usize {
        self.n_cells[axis]
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.n_cells[axis] as f64 * self.h[axis]
    }

    /// Largest spacing over the active axes.
    pub fn h_max(&self) -> f64 {
        (0..self.dim).map(|a| self.h[a]).fold(0.0, f64::max)
    }

    pub fn nodes_on_axis(&self, axis: usize) -> usize {
        if axis < self.dim {
            self.n_cells[axis] + 1
        } else {
            1
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes_on_axis(0) * self.nodes_on_axis(1)
    }

    pub fn coord(&self, axis: usize, index: usize) -> f64 {
        self.origin[axis] + index as f64 * self.h[axis]
    }

    /// Flat node id from per-axis indices; the x index runs fastest.
    pub fn node_id(&self, ix: [usize; 2]) -> usize {
        ix[0] + ix[1] * self.nodes_on_axis(0)
    }

    pub fn node_multi_index(&self, node: usize) -> [usize; 2] {
        let nx = self.nodes_on_axis(0);
        [node % nx, node / nx]
    }

    pub fn node_position(&self, node: usize) -> [f64; 2] {
        let [i, j] = self.node_multi_index(node);
        let y = if self.dim == 2 { self.coord(1, j) } else { 0.0 };
        [self.coord(0, i), y]
    }

    /// Index of the node nearest to `x` on `axis`, or `None` if `x` lies
    /// outside the axis range.
    pub fn nearest_index(&self, axis: usize, x: f64) -> Option<usize> {
        let s = (x - self.origin[axis]) / self.h[axis];
        let n = self.n_cells[axis] as f64;
        if s < -COORD_SLACK || s > n + COORD_SLACK || !s.is_finite() {
            return None;
        }
        Some(s.round().clamp(0.0, n) as usize)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let ix = self.node_multi_index(node);
        (0..self.dim).any(|a| ix[a] == 0 || ix[a] == self.n_cells[a])
    }

    /// True when `x` lies in the closed domain, allowing for round-off.
    pub fn contains(&self, x: &[f64; 2]) -> bool {
        (0..self.dim).all(|a| {
            let lo = self.origin[a];
            let hi = lo + self.extent(a);
            let slack = COORD_SLACK * self.h[a];
            x[a] >= lo - slack && x[a] <= hi + slack
        })
    }

    /// Same node layout and coordinates up to round-off.
    pub fn matches(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && (0..self.dim).all(|a| {
                self.n_cells[a] == other.n_cells[a]
                    && (self.h[a] - other.h[a]).abs() <= 1e-12 * self.h[a]
                    && (self.origin[a] - other.origin[a]).abs() <= COORD_SLACK * self.h[a]
            })
    }
}

/// Uniform time axis `t0 + j·dt`, `j = 0..=n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if n_steps < 1 {
            return Err(Error::InvalidGrid("need at least one time step".into()));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidGrid("start time is not finite".into()));
        }
        Ok(TimeGrid { t0, dt, n_steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_times(&self) -> usize {
        self.n_steps + 1
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n_steps)
    }

    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        let s = (t - self.t0) / self.dt;
        let n = self.n_steps as f64;
        if s < -COORD_SLACK || s > n + COORD_SLACK || !s.is_finite() {
            return None;
        }
        Some(s.round().clamp(0.0, n) as usize)
    }

    pub fn matches(&self, other: &TimeGrid) -> bool {
        self.n_steps == other.n_steps
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt
            && (self.t0 - other.t0).abs() <= COORD_SLACK * self.dt
    }
}

/// A point `z = (x, t)`; for 1D data only `x[0]` is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub x: [f64; 2],
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new_1d(x: f64, t: f64) -> Self {
        SpaceTimePoint { x: [x, 0.0], t }
    }

    pub fn new_2d(x: f64, y: f64, t: f64) -> Self {
        SpaceTimePoint { x: [x, y], t }
    }

    pub(crate) fn coords(&self, dim: usize) -> Vec<f64> {
        self.x[..dim].to_vec()
    }
}

pub(crate) fn distance(a: &[f64; 2], b: &[f64; 2], dim: usize) -> f64 {
    (0..dim).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub(crate) fn sym_eigenvalues(m: [[f64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let d = (0.25 * (m[0][0] - m[1][1]).powi(2) + m[0][1] * m[1][0])
        .max(0.0)
        .sqrt();
    (mean - d, mean + d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn make_grid_spacing() {
        let g = Grid::new_1d(0.0, 1.0, 10).unwrap();
        assert_relative_eq!(g.h(0), 0.1);
        let g = Grid::new_2d([0.0, 0.0], [1.0, 2.0], [10, 20]).unwrap();
        assert_relative_eq!(g.h(0), 0.1);
        assert_relative_eq!(g.h(1), 0.1);
        assert_eq!(g.node_count(), 11 * 21);
    }

    #[test]
    fn make_grid_rejects_bad_input() {
        assert!(Grid::new(3, &[0.0; 3], &[1.0; 3], &[4; 3]).is_err());
        assert!(Grid::new_1d(0.0, 0.0, 10).is_err());
        assert!(Grid::new_1d(0.0, -1.0, 10).is_err());
        assert!(Grid::new_1d(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 0.0, 3).is_err());
        assert!(TimeGrid::new(0.0, 0.1, 0).is_err());
    }

    #[test]
    fn index_coordinate_round_trip() {
        let g = Grid::new_2d([-1.3, 0.7], [2.9, 1.1], [37, 23]).unwrap();
        for node in 0..g.node_count() {
            let p = g.node_position(node);
            let i = g.nearest_index(0, p[0]).unwrap();
            let j = g.nearest_index(1, p[1]).unwrap();
            assert_eq!(g.node_id([i, j]), node);
        }
    }

    #[test]
    fn boundary_nodes() {
        let g = Grid::new_1d(0.0, 1.0, 4).unwrap();
        let b: Vec<bool> = (0..5).map(|n| g.is_boundary(n)).collect();
        assert_eq!(b, vec![true, false, false, false, true]);
    }
}
