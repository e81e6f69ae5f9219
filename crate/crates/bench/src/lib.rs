//! Fixtures shared by the benchmarks.

use porosim_core::oracle::exact_half_space;
use porosim_core::solver::{
    Boundary, Forcing, ObstacleProblemSpec, PhysicalConstants, Relaxation, SolverSettings,
};
use porosim_core::{Grid, ScalarField, TimeGrid, UnitSystem};

pub fn settings() -> SolverSettings {
    SolverSettings {
        relaxation: Relaxation::Optimal,
        max_iters: 100_000,
        tol: 1e-10,
    }
}

/// `f ≡ 1` on `[-1, 1]` with the stationary half-space solution as
/// boundary data, starting from zero.
pub fn stationary_1d(cells: usize, steps: usize, t_end: f64) -> ObstacleProblemSpec {
    let grid = Grid::new_1d(-1.0, 2.0, cells)
        .expect("valid grid")
        .with_unit_system(UnitSystem::Normalized);
    let tg = TimeGrid::new(0.0, t_end / steps as f64, steps).expect("valid time grid");
    let exact = exact_half_space(1, [1.0, 0.0]).expect("unit normal");
    let f = ScalarField::from_fn(grid.clone(), tg.clone(), "f", |_, _| 1.0);
    let mut spec = ObstacleProblemSpec::new(
        grid.clone(),
        tg.clone(),
        PhysicalConstants::new(1.0, 1.0, 1.0).expect("positive constants"),
        Forcing::Obstacle(f),
    );
    spec.boundary =
        Boundary::Prescribed(ScalarField::from_fn(grid, tg, "b", |x, _| exact.u(x, 0.0)));
    spec
}

/// Square grid on `[-1, 1]²` with a radially growing previous level.
pub fn bowl_2d(cells: usize) -> (Grid, Vec<f64>) {
    let grid = Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [cells, cells]).expect("valid grid");
    let u = (0..grid.node_count())
        .map(|n| {
            let [x, y] = grid.node_position(n);
            0.5 * ((x * x + y * y).sqrt() - 0.5).max(0.0).powi(2)
        })
        .collect();
    (grid, u)
}
