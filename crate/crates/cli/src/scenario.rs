//! Problem data of the bundled scenarios.

use std::fs::File;
use std::io::BufReader;

use nalgebra::Vector3;
use porosim_core::analysis::{AnalysisSettings, FitSettings, WeissQuadrature};
use porosim_core::forcing::{ForcingSpec, WaveForcing, WaveForcingParams};
use porosim_core::geometry::read_field_csv;
use porosim_core::oracle::{exact_half_space, exact_radial_2d, ExactSolution};
use porosim_core::solver::{
    Boundary, Forcing, ObstacleProblemSpec, PhysicalConstants, Relaxation, SolverSettings,
};
use porosim_core::{Grid, ScalarField, TimeGrid, UnitSystem};

use crate::config::{ConfigError, ConfigResult, ForcingKind, Omega, RunConfig};

/// Contact radius of `radial-2d`.
pub const RADIAL_R0: f64 = 0.5;
/// Half-width of the initial gap in `two-bump-collision-1d`.
pub const GAP_HALF_WIDTH: f64 = 0.5;
/// Time at which the driven gap would close quasi-statically.
pub const GAP_CLOSING_TIME: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ObstacleProblemSpec,
    pub solver: SolverSettings,
    pub analysis: AnalysisSettings,
    /// Stationary solution the final level should approach, if known.
    pub exact: Option<ExactSolution>,
}

fn core(e: porosim_core::Error) -> ConfigError {
    ConfigError(e.to_string())
}

fn v3(a: [f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0], a[1], a[2])
}

pub fn build(c: &RunConfig) -> ConfigResult<Scenario> {
    let dim = c.dim();
    let normalized = matches!(c.forcing, ForcingKind::Unit);
    let grid = if dim == 1 {
        Grid::new_1d(c.origin[0], c.extent[0], c.cells)
    } else {
        Grid::new_2d(c.origin, c.extent, [c.cells, c.cells])
    }
    .map_err(core)?;
    let grid = grid.with_unit_system(if normalized {
        UnitSystem::Normalized
    } else {
        UnitSystem::Physical
    });
    let tg = TimeGrid::new(0.0, c.t_end / c.steps as f64, c.steps).map_err(core)?;
    let constants = PhysicalConstants::new(c.rho, c.tension, c.t1).map_err(core)?;

    let forcing = match &c.forcing {
        ForcingKind::Unit => {
            let value = c.forcing_value;
            Forcing::Obstacle(ScalarField::from_fn(
                grid.clone(),
                tg.clone(),
                "f",
                |_, _| value,
            ))
        }
        ForcingKind::Wave => {
            let w = &c.wave;
            let params = WaveForcingParams {
                b_hat: v3(w.b_hat),
                k_vec: v3(w.k),
                v: w.v,
                b_dc: v3(w.b_dc),
                e0: v3(w.e0),
                q: w.q,
                gamma: w.gamma,
                f_osc: w.f_osc,
            };
            let mut wave = WaveForcing::new(params);
            wave.normal_dir = v3(w.normal);
            wave.reference_area = w.reference_area;
            wave.switch_off_at = w.switch_off_at;
            Forcing::Physical(ForcingSpec::Wave(wave))
        }
        ForcingKind::Table(path) => {
            let file =
                File::open(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            let table = read_field_csv(BufReader::new(file), "f").map_err(core)?;
            Forcing::Physical(ForcingSpec::Tabulated(table))
        }
    };

    let mut spec = ObstacleProblemSpec::new(grid.clone(), tg.clone(), constants, forcing);
    let mut exact = None;
    match c.scenario.as_str() {
        "stationary-1d" => {
            let sol = exact_half_space(1, [1.0, 0.0]).map_err(core)?;
            spec.boundary = Boundary::Prescribed(field_of(&grid, &tg, |x, _| sol.u(x, 0.0)));
            exact = Some(sol);
        }
        "radial-2d" => {
            let sol = exact_radial_2d([0.0, 0.0], RADIAL_R0).map_err(core)?;
            spec.boundary = Boundary::Prescribed(field_of(&grid, &tg, |x, _| sol.u(x, 0.0)));
            spec.initial_u = (0..grid.node_count())
                .map(|n| sol.u(grid.node_position(n), 0.0))
                .collect();
            exact = Some(sol);
        }
        "two-bump-collision-1d" => {
            // the boundary lifts as if the zero set [−a(t), a(t)] shrank
            // linearly to a point, pushing the two positive phases together
            let profile = |x: [f64; 2], t: f64| {
                let a = GAP_HALF_WIDTH * (1.0 - t / GAP_CLOSING_TIME);
                0.5 * (x[0].abs() - a).max(0.0).powi(2)
            };
            spec.boundary = Boundary::Prescribed(field_of(&grid, &tg, profile));
            spec.initial_u = (0..grid.node_count())
                .map(|n| profile(grid.node_position(n), 0.0))
                .collect();
        }
        _ => {}
    }
    spec.validate().map_err(core)?;

    let solver = SolverSettings {
        relaxation: match c.omega {
            Omega::Fixed(w) => Relaxation::Fixed(w),
            Omega::Optimal => Relaxation::Optimal,
        },
        max_iters: c.max_iters,
        tol: c.tol,
    };
    let analysis = AnalysisSettings {
        rho_values: c.rho_list.clone(),
        tau_values: c.tau_list.clone(),
        theta: c.theta,
        quadrature: WeissQuadrature {
            n_radial: 24,
            n_angular: 24,
            n_time: 24,
        },
        fit: FitSettings {
            threshold: c.fit_threshold,
        },
        kernel_tol: c.kernel_tol,
        blowup_lambda: c.blowup_lambda,
        slice: c.slice,
        max_points: c.max_points,
        ..AnalysisSettings::default()
    };
    Ok(Scenario {
        spec,
        solver,
        analysis,
        exact,
    })
}

fn field_of(grid: &Grid, tg: &TimeGrid, f: impl Fn([f64; 2], f64) -> f64) -> ScalarField {
    ScalarField::from_fn(grid.clone(), tg.clone(), "boundary", f)
}
