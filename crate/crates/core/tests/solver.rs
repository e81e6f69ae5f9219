use porosim_core::oracle::{brute_force_lcp, dense_heat_lcp, exact_half_space};
use porosim_core::solver::{
    complementarity, solve_parabolic, step_parabolic, Boundary, Forcing, ObstacleProblemSpec,
    PhysicalConstants, Relaxation, SolverSettings,
};
use porosim_core::{Grid, ScalarField, TimeGrid, UnitSystem};
use proptest::prelude::*;

fn tight() -> SolverSettings {
    SolverSettings {
        relaxation: Relaxation::Optimal,
        max_iters: 100_000,
        tol: 1e-13,
    }
}

fn stationary_spec(cells: usize, steps: usize) -> ObstacleProblemSpec {
    let h = 2.0 / cells as f64;
    let grid = Grid::new_1d(-1.0 + h / 3.0, 2.0, cells)
        .unwrap()
        .with_unit_system(UnitSystem::Normalized);
    let tg = TimeGrid::new(0.0, 10.0 / steps as f64, steps).unwrap();
    let exact = exact_half_space(1, [1.0, 0.0]).unwrap();
    let f = ScalarField::from_fn(grid.clone(), tg.clone(), "f", |_, _| 1.0);
    let mut spec = ObstacleProblemSpec::new(
        grid.clone(),
        tg.clone(),
        PhysicalConstants::new(1.0, 1.0, 1.0).unwrap(),
        Forcing::Obstacle(f),
    );
    spec.boundary =
        Boundary::Prescribed(ScalarField::from_fn(grid, tg, "b", |x, _| exact.u(x, 0.0)));
    spec
}

fn final_error(cells: usize) -> f64 {
    let spec = stationary_spec(cells, 400);
    let sol = solve_parabolic(&spec, &tight()).unwrap();
    let exact = exact_half_space(1, [1.0, 0.0]).unwrap();
    let g = sol.u.grid();
    let j = sol.u.time_grid().n_steps();
    (0..g.node_count())
        .map(|n| (sol.u.at(n, j) - exact.u(g.node_position(n), 0.0)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn stationary_error_is_second_order() {
    let errs: Vec<f64> = [40, 80, 160].iter().map(|&n| final_error(n)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 1.8, "errors {errs:?}");
    }
}

#[test]
fn trajectory_satisfies_complementarity() {
    let spec = stationary_spec(60, 100);
    let sol = solve_parabolic(&spec, &tight()).unwrap();
    let report = complementarity(&sol.u, &sol.f).unwrap();
    assert_eq!(report.negativity, 0.0);
    assert!(report.slack_negativity < 1e-9, "{report:?}");
    assert!(report.complementarity < 1e-9, "{report:?}");
}

fn grids() -> Vec<Grid> {
    vec![
        Grid::new_1d(-1.0, 2.0, 9).unwrap(),
        Grid::new_1d(0.0, 1.0, 13).unwrap(),
        Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [4, 4]).unwrap(),
        Grid::new_2d([0.0, 0.0], [1.0, 2.0], [3, 5]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn step_matches_enumeration(
        case in 0usize..4,
        amp in 0.1f64..3.0,
        freq in 0.5f64..5.0,
        lift in 0.0f64..0.5,
        dt in 0.01f64..0.5,
    ) {
        let grid = &grids()[case];
        let n = grid.node_count();
        let f: Vec<f64> = (0..n)
            .map(|k| amp * (freq * grid.node_position(k)[0]).sin())
            .collect();
        let boundary: Vec<f64> = (0..n)
            .map(|k| if grid.is_boundary(k) { lift } else { 0.0 })
            .collect();
        let u_prev: Vec<f64> = (0..n).map(|k| lift * grid.node_position(k)[1].abs()).collect();
        let (next, _) = step_parabolic(grid, &u_prev, &f, dt, &boundary, &tight()).unwrap();
        let (sys, nodes) = dense_heat_lcp(grid, dt, &u_prev, &f, &boundary).unwrap();
        let exact = brute_force_lcp(&sys).unwrap();
        for (k, &node) in nodes.iter().enumerate() {
            prop_assert!((next[node] - exact[k]).abs() < 1e-10);
        }
    }

    /// A larger datum `f` pushes harder toward the obstacle; larger
    /// boundary values lift the solution.
    #[test]
    fn comparison_principle(
        base in 0.2f64..2.0,
        extra in 0.0f64..1.0,
        lift in 0.0f64..0.3,
        dt in 0.02f64..0.3,
    ) {
        let grid = Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [8, 8]).unwrap();
        let n = grid.node_count();
        let bump = |k: usize| {
            let [x, y] = grid.node_position(k);
            0.2 * (1.0 - x * x) * (1.0 - y * y)
        };
        let u0: Vec<f64> = (0..n).map(bump).collect();
        let wall = |l: f64| -> Vec<f64> {
            (0..n).map(|k| if grid.is_boundary(k) { l } else { 0.0 }).collect()
        };
        let f_lo = vec![base; n];
        let f_hi = vec![base + extra; n];
        let s = tight();
        let (a, _) = step_parabolic(&grid, &u0, &f_lo, dt, &wall(lift), &s).unwrap();
        let (b, _) = step_parabolic(&grid, &u0, &f_hi, dt, &wall(lift), &s).unwrap();
        let (c, _) = step_parabolic(&grid, &u0, &f_lo, dt, &wall(lift + 0.1), &s).unwrap();
        for k in 0..n {
            prop_assert!(b[k] <= a[k] + 1e-11);
            prop_assert!(c[k] >= a[k] - 1e-11);
            prop_assert!(a[k] >= 0.0);
        }
    }
}
