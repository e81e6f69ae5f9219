use super::lcp::{psor, CsrMatrix, LcpSystem, PsorSettings, Relaxation};
use super::problem::{
    boundary_values, normalize, obstacle_datum, NormalizationRecord, ObstacleProblemSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub relaxation: Relaxation,
    pub max_iters: usize,
    /// Bound on the natural complementarity residual per step.
    pub tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            relaxation: Relaxation::default(),
            max_iters: 10_000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub iterations: usize,
    pub residual: f64,
}

/// `mass·I − diffusion·Δ_h` restricted to interior nodes of a grid, with
/// Dirichlet data on the boundary moved to the right-hand side.
#[derive(Debug, Clone)]
pub(crate) struct InteriorOperator {
    pub grid: Grid,
    pub interior: Vec<usize>,
    pub slot: Vec<Option<usize>>,
    pub matrix: CsrMatrix,
    pub diffusion: f64,
    /// Spectral radius of the Jacobi iteration matrix for this operator.
    pub jacobi_radius: f64,
}

impl InteriorOperator {
    pub fn new(grid: &Grid, mass: f64, diffusion: f64) -> Self {
        let interior: Vec<usize> = (0..grid.node_count())
            .filter(|&n| !grid.is_boundary(n))
            .collect();
        let mut slot = vec![None; grid.node_count()];
        for (k, &n) in interior.iter().enumerate() {
            slot[n] = Some(k);
        }
        let dim = grid.dim();
        let mut diag = mass;
        let mut off_radius = 0.0;
        for a in 0..dim {
            let w = diffusion / grid.h(a).powi(2);
            diag += 2.0 * w;
            off_radius += 2.0 * w * (std::f64::consts::PI / grid.n_cells(a) as f64).cos();
        }
        let mut triplets = Vec::with_capacity(interior.len() * (1 + 2 * dim));
        for (k, &n) in interior.iter().enumerate() {
            triplets.push((k, k, diag));
            let ix = grid.node_multi_index(n);
            for a in 0..dim {
                let w = diffusion / grid.h(a).powi(2);
                for step in [-1isize, 1] {
                    let mut m = ix;
                    m[a] = (ix[a] as isize + step) as usize;
                    if let Some(c) = slot[grid.node_id(m)] {
                        triplets.push((k, c, -w));
                    }
                }
            }
        }
        InteriorOperator {
            grid: grid.clone(),
            matrix: CsrMatrix::from_triplets(interior.len(), triplets),
            interior,
            slot,
            diffusion,
            jacobi_radius: off_radius / diag,
        }
    }

    /// `diffusion/h²` times the boundary neighbours of each interior node.
    pub fn boundary_load(&self, boundary: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        self.interior
            .iter()
            .map(|&n| {
                let ix = g.node_multi_index(n);
                let mut acc = 0.0;
                for a in 0..g.dim() {
                    let w = self.diffusion / g.h(a).powi(2);
                    for step in [-1isize, 1] {
                        let mut m = ix;
                        m[a] = (ix[a] as isize + step) as usize;
                        let nb = g.node_id(m);
                        if self.slot[nb].is_none() {
                            acc += w * boundary[nb];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn gather(&self, full: &[f64]) -> Vec<f64> {
        self.interior.iter().map(|&n| full[n]).collect()
    }

    pub fn scatter(&self, interior_values: &[f64], boundary: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.grid.node_count())
            .map(|n| {
                if self.slot[n].is_none() {
                    boundary[n]
                } else {
                    0.0
                }
            })
            .collect();
        for (k, &n) in self.interior.iter().enumerate() {
            out[n] = interior_values[k];
        }
        out
    }
}

/// One backward-Euler step of the obstacle problem on a fixed grid.
///
/// The interior unknowns solve the complementarity system
/// `u ≥ 0, (u − u_prev)/dt − Δ_h u + f ≥ 0, u·((u − u_prev)/dt − Δ_h u + f) = 0`.
#[derive(Debug, Clone)]
pub struct ParabolicStepper {
    op: InteriorOperator,
    dt: f64,
    psor: PsorSettings,
}

impl ParabolicStepper {
    pub fn new(grid: &Grid, dt: f64, settings: &SolverSettings) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let op = InteriorOperator::new(grid, 1.0 / dt, 1.0);
        let psor = PsorSettings {
            omega: settings.relaxation.omega(Some(op.jacobi_radius)),
            max_iters: settings.max_iters,
            tol: settings.tol,
        };
        Ok(ParabolicStepper { op, dt, psor })
    }

    pub fn grid(&self) -> &Grid {
        &self.op.grid
    }

    pub fn omega(&self) -> f64 {
        self.psor.omega
    }

    /// Node ids of the unknowns, in LCP order.
    pub fn interior_nodes(&self) -> &[usize] {
        &self.op.interior
    }

    /// The complementarity system for one step.
    pub fn system(&self, u_prev: &[f64], f_next: &[f64], boundary_next: &[f64]) -> LcpSystem {
        let load = self.op.boundary_load(boundary_next);
        let rhs = self
            .op
            .interior
            .iter()
            .zip(load)
            .map(|(&n, l)| u_prev[n] / self.dt - f_next[n] + l)
            .collect();
        LcpSystem {
            matrix: self.op.matrix.clone(),
            rhs,
        }
    }

    pub fn step(
        &self,
        u_prev: &[f64],
        f_next: &[f64],
        boundary_next: &[f64],
    ) -> Result<(Vec<f64>, StepStats)> {
        let n = self.op.grid.node_count();
        if u_prev.len() != n || f_next.len() != n || boundary_next.len() != n {
            return Err(Error::GridMismatch(
                "slice length differs from node count".into(),
            ));
        }
        let system = self.system(u_prev, f_next, boundary_next);
        let out = psor(&system, &self.op.gather(u_prev), &self.psor)?;
        Ok((
            self.op.scatter(&out.solution, boundary_next),
            StepStats {
                iterations: out.iterations,
                residual: out.residual,
            },
        ))
    }
}

/// Single step on `grid`; see [`ParabolicStepper`].
pub fn step_parabolic(
    grid: &Grid,
    u_prev: &[f64],
    f_slice: &[f64],
    dt: f64,
    boundary: &[f64],
    settings: &SolverSettings,
) -> Result<(Vec<f64>, StepStats)> {
    ParabolicStepper::new(grid, dt, settings)?.step(u_prev, f_slice, boundary)
}

/// Trajectory of the normalized obstacle problem.
#[derive(Debug, Clone)]
pub struct ParabolicSolution {
    /// Displacement in normalized units.
    pub u: ScalarField,
    /// Obstacle datum `f` on the same grid.
    pub f: ScalarField,
    pub steps: Vec<StepStats>,
    pub normalization: NormalizationRecord,
    pub omega: f64,
}

pub fn solve_parabolic(
    spec: &ObstacleProblemSpec,
    settings: &SolverSettings,
) -> Result<ParabolicSolution> {
    let ns = normalize(spec)?;
    let f = obstacle_datum(&ns)?;
    let boundary = boundary_values(&ns)?;
    let stepper = ParabolicStepper::new(&ns.grid, ns.time_grid.dt(), settings)?;

    let mut u = ScalarField::zeros(ns.grid.clone(), ns.time_grid.clone(), "u");
    {
        let b0 = boundary.slice(0);
        let first = u.slice_mut(0);
        for (node, v) in first.iter_mut().enumerate() {
            *v = if ns.grid.is_boundary(node) {
                b0[node]
            } else {
                ns.initial_u[node]
            };
        }
    }
    let mut steps = Vec::with_capacity(ns.time_grid.n_steps());
    for j in 1..ns.time_grid.n_times() {
        let (next, stats) = stepper
            .step(u.slice(j - 1), f.slice(j), boundary.slice(j))
            .map_err(|e| match e {
                Error::NotConverged {
                    iterations,
                    residual,
                    ..
                } => Error::NotConverged {
                    time_index: j,
                    iterations,
                    residual,
                },
                other => other,
            })?;
        u.slice_mut(j).copy_from_slice(&next);
        steps.push(stats);
    }
    Ok(ParabolicSolution {
        u,
        f,
        steps,
        normalization: ns.normalization,
        omega: stepper.omega(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TimeGrid;
    use crate::solver::problem::{Boundary, Forcing, PhysicalConstants};
    use approx::assert_abs_diff_eq;

    fn constant_datum(grid: &Grid, tg: &TimeGrid, value: f64) -> Forcing {
        Forcing::Obstacle(ScalarField::from_fn(
            grid.clone(),
            tg.clone(),
            "f",
            |_, _| value,
        ))
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let g = Grid::new_1d(-1.0, 2.0, 20).unwrap();
        let n = g.node_count();
        let (u, stats) = step_parabolic(
            &g,
            &vec![0.0; n],
            &vec![0.0; n],
            0.01,
            &vec![0.0; n],
            &SolverSettings::default(),
        )
        .unwrap();
        assert!(u.iter().all(|&v| v == 0.0));
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn solver_matches_unconstrained_solve_where_inactive() {
        // u_t − u_xx = −f with f = −1 (pushing up) never touches the
        // obstacle, so each step equals a plain tridiagonal solve.
        let g = Grid::new_1d(-1.0, 2.0, 40).unwrap();
        let tg = TimeGrid::new(0.0, 0.05, 40).unwrap();
        let spec = ObstacleProblemSpec::new(
            g.clone(),
            tg.clone(),
            PhysicalConstants::default(),
            constant_datum(&g, &tg, -1.0),
        );
        let sol = solve_parabolic(&spec, &SolverSettings::default()).unwrap();

        // Thomas algorithm on the same backward-Euler system
        let n = g.n_cells(0) - 1;
        let h2 = g.h(0).powi(2);
        let dt = tg.dt();
        let mut u = vec![0.0; n];
        for _ in 0..tg.n_steps() {
            let a = -1.0 / h2;
            let b = 1.0 / dt + 2.0 / h2;
            let d: Vec<f64> = u.iter().map(|v| v / dt + 1.0).collect();
            let mut c_star = vec![0.0; n];
            let mut d_star = vec![0.0; n];
            c_star[0] = a / b;
            d_star[0] = d[0] / b;
            for i in 1..n {
                let m = b - a * c_star[i - 1];
                c_star[i] = a / m;
                d_star[i] = (d[i] - a * d_star[i - 1]) / m;
            }
            u[n - 1] = d_star[n - 1];
            for i in (0..n - 1).rev() {
                u[i] = d_star[i] - c_star[i] * u[i + 1];
            }
        }
        let last = sol.u.slice(tg.n_steps());
        for i in 0..n {
            assert_abs_diff_eq!(last[i + 1], u[i], epsilon = 1e-9);
        }
        // stationary limit is (1 − x²)/2
        assert_abs_diff_eq!(last[20], 0.5, epsilon = 0.02);
    }

    #[test]
    fn trajectory_is_nonnegative_and_complementary() {
        let g = Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [16, 16]).unwrap();
        let tg = TimeGrid::new(0.0, 0.01, 10).unwrap();
        let bump = Forcing::Obstacle(ScalarField::from_fn(g.clone(), tg.clone(), "f", |x, _| {
            1.0 - 6.0 * (-(x[0] * x[0] + x[1] * x[1]) * 8.0).exp()
        }));
        let spec =
            ObstacleProblemSpec::new(g.clone(), tg.clone(), PhysicalConstants::default(), bump);
        let settings = SolverSettings::default();
        let sol = solve_parabolic(&spec, &settings).unwrap();
        assert!(sol.u.min() >= 0.0);
        assert!(sol.u.max() > 0.0);
        let stepper = ParabolicStepper::new(&g, tg.dt(), &settings).unwrap();
        let zero = vec![0.0; g.node_count()];
        for j in 1..tg.n_times() {
            let sys = stepper.system(sol.u.slice(j - 1), sol.f.slice(j), &zero);
            let uj: Vec<f64> = stepper
                .interior_nodes()
                .iter()
                .map(|&n| sol.u.at(n, j))
                .collect();
            let w = sys.slack(&uj);
            for (u, w) in uj.iter().zip(&w) {
                assert!(u.min(*w).abs() <= settings.tol);
            }
        }
    }

    #[test]
    fn non_convergence_carries_time_index() {
        let g = Grid::new_1d(-1.0, 2.0, 50).unwrap();
        let tg = TimeGrid::new(0.0, 1.0, 3).unwrap();
        let spec = ObstacleProblemSpec::new(
            g.clone(),
            tg.clone(),
            PhysicalConstants::default(),
            constant_datum(&g, &tg, -1.0),
        );
        let settings = SolverSettings {
            max_iters: 2,
            ..SolverSettings::default()
        };
        match solve_parabolic(&spec, &settings) {
            Err(Error::NotConverged {
                time_index,
                residual,
                ..
            }) => {
                assert_eq!(time_index, 1);
                assert!(residual > settings.tol);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn prescribed_boundary_is_carried() {
        let g = Grid::new_1d(0.0, 1.0, 10).unwrap();
        let tg = TimeGrid::new(0.0, 0.1, 3).unwrap();
        let mut spec = ObstacleProblemSpec::new(
            g.clone(),
            tg.clone(),
            PhysicalConstants::default(),
            constant_datum(&g, &tg, 0.0),
        );
        spec.boundary =
            Boundary::Prescribed(ScalarField::from_fn(g.clone(), tg.clone(), "b", |x, t| {
                x[0] * (1.0 + t)
            }));
        let sol = solve_parabolic(&spec, &SolverSettings::default()).unwrap();
        assert_abs_diff_eq!(sol.u.at(10, 3), 1.3, epsilon = 1e-12);
        assert_eq!(sol.u.at(0, 3), 0.0);
    }
}
