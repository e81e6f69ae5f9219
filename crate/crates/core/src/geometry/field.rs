use super::{Grid, TimeGrid, COORD_SLACK};
use crate::error::{Error, Result};

/// Something that can be evaluated at arbitrary space-time points.
///
/// Closed-form profiles implement it exactly; sampled fields implement it
/// by interpolation and return `None` outside their domain.
pub trait SpaceTimeFunction {
    fn dim(&self) -> usize;
    fn value(&self, x: [f64; 2], t: f64) -> Option<f64>;
    fn gradient(&self, x: [f64; 2], t: f64) -> Option<[f64; 2]>;
}

/// The same value everywhere, e.g. a constant datum `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFunction {
    pub dim: usize,
    pub value: f64,
}

impl SpaceTimeFunction for ConstantFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: [f64; 2], _t: f64) -> Option<f64> {
        Some(self.value)
    }

    fn gradient(&self, _x: [f64; 2], _t: f64) -> Option<[f64; 2]> {
        Some([0.0, 0.0])
    }
}

/// A real-valued quantity sampled on every node of a grid at every time
/// level. Storage is slice-major: all nodes of time level 0, then level 1...
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    time_grid: TimeGrid,
    values: Vec<f64>,
    name: String,
}

impl ScalarField {
    pub fn zeros(grid: Grid, time_grid: TimeGrid, name: impl Into<String>) -> Self {
        let n = grid.node_count() * time_grid.n_times();
        ScalarField {
            grid,
            time_grid,
            values: vec![0.0; n],
            name: name.into(),
        }
    }

    pub fn from_values(
        grid: Grid,
        time_grid: TimeGrid,
        values: Vec<f64>,
        name: impl Into<String>,
    ) -> Result<Self> {
        let expected = grid.node_count() * time_grid.n_times();
        if values.len() != expected {
            return Err(Error::GridMismatch(format!(
                "expected {expected} samples, got {}",
                values.len()
            )));
        }
        Ok(ScalarField {
            grid,
            time_grid,
            values,
            name: name.into(),
        })
    }

    /// Samples `f(x, t)` on every node and time level.
    pub fn from_fn(
        grid: Grid,
        time_grid: TimeGrid,
        name: impl Into<String>,
        f: impl Fn([f64; 2], f64) -> f64,
    ) -> Self {
        let nodes = grid.node_count();
        let mut values = Vec::with_capacity(nodes * time_grid.n_times());
        for j in 0..time_grid.n_times() {
            let t = time_grid.time(j);
            for node in 0..nodes {
                values.push(f(grid.node_position(node), t));
            }
        }
        ScalarField {
            grid,
            time_grid,
            values,
            name: name.into(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn nodes_per_slice(&self) -> usize {
        self.grid.node_count()
    }

    pub fn slice(&self, j: usize) -> &[f64] {
        let n = self.nodes_per_slice();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn slice_mut(&mut self, j: usize) -> &mut [f64] {
        let n = self.nodes_per_slice();
        &mut self.values[j * n..(j + 1) * n]
    }

    pub fn at(&self, node: usize, j: usize) -> f64 {
        self.values[j * self.nodes_per_slice() + node]
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Same space-time layout as `other`.
    pub fn same_layout(&self, other: &ScalarField) -> bool {
        self.grid.matches(&other.grid) && self.time_grid.matches(&other.time_grid)
    }

    pub fn map(&self, name: impl Into<String>, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            time_grid: self.time_grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            name: name.into(),
        }
    }

    /// Owned copy of time level `j`.
    pub fn slice_owned(&self, j: usize) -> Vec<f64> {
        self.slice(j).to_vec()
    }

    /// Cell index and fractional offset of `x` along `axis`.
    fn locate(&self, axis: usize, x: f64) -> Option<(usize, f64)> {
        let s = (x - self.grid.origin(axis)) / self.grid.h(axis);
        let n = self.grid.n_cells(axis);
        if !s.is_finite() || s < -COORD_SLACK || s > n as f64 + COORD_SLACK {
            return None;
        }
        let s = s.clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        Some((i, s - i as f64))
    }

    fn locate_time(&self, t: f64) -> Option<(usize, f64)> {
        let tg = &self.time_grid;
        let s = (t - tg.t0()) / tg.dt();
        let n = tg.n_steps();
        if !s.is_finite() || s < -COORD_SLACK || s > n as f64 + COORD_SLACK {
            return None;
        }
        let s = s.clamp(0.0, n as f64);
        let j = (s.floor() as usize).min(n - 1);
        Some((j, s - j as f64))
    }

    /// Multilinear interpolation in space and time of the per-node data
    /// returned by `sample(node, time_index)`.
    fn interpolate_with(
        &self,
        x: [f64; 2],
        t: f64,
        sample: impl Fn(usize, usize) -> f64,
    ) -> Option<f64> {
        let (j, wt) = self.locate_time(t)?;
        let (i0, wx) = self.locate(0, x[0])?;
        let (i1, wy) = if self.grid.dim() == 2 {
            self.locate(1, x[1])?
        } else {
            (0, 0.0)
        };
        let mut acc = 0.0;
        for (dj, ft) in [(0usize, 1.0 - wt), (1, wt)] {
            if ft == 0.0 {
                continue;
            }
            for (dy, fy) in [(0usize, 1.0 - wy), (1, wy)] {
                if fy == 0.0 {
                    continue;
                }
                for (dx, fx) in [(0usize, 1.0 - wx), (1, wx)] {
                    if fx == 0.0 {
                        continue;
                    }
                    let node = self.grid.node_id([i0 + dx, i1 + dy]);
                    acc += ft * fy * fx * sample(node, j + dj);
                }
            }
        }
        Some(acc)
    }

    /// Multilinear interpolation of the field value.
    pub fn interpolate(&self, x: [f64; 2], t: f64) -> Option<f64> {
        self.interpolate_with(x, t, |node, j| self.at(node, j))
    }

    /// Nodal gradient by central differences (one-sided on the boundary).
    pub fn nodal_gradient(&self, node: usize, j: usize) -> [f64; 2] {
        let mut g = [0.0; 2];
        let ix = self.grid.node_multi_index(node);
        for axis in 0..self.grid.dim() {
            let h = self.grid.h(axis);
            let n = self.grid.n_cells(axis);
            let neighbor = |k: usize| {
                let mut m = ix;
                m[axis] = k;
                self.at(self.grid.node_id(m), j)
            };
            let i = ix[axis];
            g[axis] = if i == 0 {
                (neighbor(1) - neighbor(0)) / h
            } else if i == n {
                (neighbor(n) - neighbor(n - 1)) / h
            } else {
                (neighbor(i + 1) - neighbor(i - 1)) / (2.0 * h)
            };
        }
        g
    }
}

impl SpaceTimeFunction for ScalarField {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn value(&self, x: [f64; 2], t: f64) -> Option<f64> {
        self.interpolate(x, t)
    }

    fn gradient(&self, x: [f64; 2], t: f64) -> Option<[f64; 2]> {
        let mut g = [0.0; 2];
        for (axis, slot) in g.iter_mut().enumerate().take(self.grid.dim()) {
            *slot = self.interpolate_with(x, t, |node, j| self.nodal_gradient(node, j)[axis])?;
        }
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_1d() -> (Grid, TimeGrid) {
        (
            Grid::new_1d(0.0, 1.0, 10).unwrap(),
            TimeGrid::new(0.0, 0.5, 2).unwrap(),
        )
    }

    #[test]
    fn value_count_matches_layout() {
        let (g, tg) = unit_1d();
        let f = ScalarField::zeros(g.clone(), tg.clone(), "u");
        assert_eq!(f.values().len(), 11 * 3);
        assert!(ScalarField::from_values(g, tg, vec![0.0; 5], "u").is_err());
    }

    #[test]
    fn interpolation_is_exact_for_bilinear_data() {
        let g = Grid::new_2d([0.0, 0.0], [1.0, 1.0], [4, 4]).unwrap();
        let tg = TimeGrid::new(0.0, 1.0, 2).unwrap();
        let f = ScalarField::from_fn(g, tg, "u", |x, t| {
            1.0 + 2.0 * x[0] - x[1] + 0.5 * t + x[0] * x[1]
        });
        let v = f.interpolate([0.3, 0.55], 1.25).unwrap();
        assert_relative_eq!(v, 1.0 + 0.6 - 0.55 + 0.625 + 0.165, epsilon = 1e-12);
        assert!(f.interpolate([1.2, 0.5], 0.0).is_none());
        assert!(f.interpolate([0.5, 0.5], 2.5).is_none());
    }

    #[test]
    fn gradient_of_quadratic() {
        let g = Grid::new_1d(-1.0, 2.0, 40).unwrap();
        let tg = TimeGrid::new(0.0, 1.0, 1).unwrap();
        let f = ScalarField::from_fn(g, tg, "u", |x, _| 0.5 * x[0] * x[0]);
        // Central differences are exact on quadratics; linear interpolation
        // of a linear gradient is exact too.
        let gr = f.gradient([0.337, 0.0], 0.4).unwrap();
        assert_relative_eq!(gr[0], 0.337, epsilon = 1e-12);
    }
}
