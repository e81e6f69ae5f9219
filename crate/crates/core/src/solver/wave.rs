use super::lcp::{sor, LcpSystem, PsorSettings};
use super::parabolic::{solve_parabolic, InteriorOperator, SolverSettings};
use super::problem::{
    boundary_values, denormalize_field, normalize, obstacle_datum, Forcing, ObstacleProblemSpec,
    PhysicalConstants,
};
use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::geometry::{Grid, ScalarField, TimeGrid, UnitSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveScheme {
    /// Leapfrog in time, stable for `dt ≤ h / (c_s √dim)`.
    Explicit,
    /// Backward differences for damping and tension; unconditionally stable.
    #[default]
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSettings {
    pub scheme: WaveScheme,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for WaveSettings {
    fn default() -> Self {
        WaveSettings {
            scheme: WaveScheme::Implicit,
            max_iters: 20_000,
            tol: 1e-12,
        }
    }
}

/// Largest stable explicit step, `h_min / (c_s √dim)` on a uniform grid and
/// `1 / (c_s √Σ h⁻²)` in general.
pub fn cfl_bound(grid: &Grid, constants: &PhysicalConstants) -> f64 {
    let s: f64 = (0..grid.dim()).map(|a| grid.h(a).powi(-2)).sum();
    1.0 / (constants.c_s() * s.sqrt())
}

/// Physical-unit copy of the data needed by the wave solvers.
struct PhysicalData {
    grid: Grid,
    time_grid: TimeGrid,
    force: ScalarField,
    boundary: ScalarField,
    initial: Vec<f64>,
}

fn physical_data(spec: &ObstacleProblemSpec) -> Result<PhysicalData> {
    let ns = normalize(spec)?;
    let rec = ns.normalization;
    let datum = obstacle_datum(&ns)?;
    let force = denormalize_field(&datum.map("F", |v| -v * rec.f_scale / rec.u_scale), &rec)?;
    let boundary = denormalize_field(&boundary_values(&ns)?, &rec)?;
    Ok(PhysicalData {
        grid: force.grid().clone(),
        time_grid: force.time_grid().clone(),
        initial: ns.initial_u.iter().map(|v| v * rec.u_scale).collect(),
        force,
        boundary,
    })
}

/// Solves `ρ u_tt + (2ρ/T₁) u_t − T₀ Δu = F` from rest, with Dirichlet data
/// and no obstacle, in physical units. The result lives on the physical
/// grid of `spec`.
pub fn solve_damped_wave(
    spec: &ObstacleProblemSpec,
    settings: &WaveSettings,
) -> Result<ScalarField> {
    let c = spec.constants;
    let data = physical_data(spec)?;
    let grid = &data.grid;
    let tg = &data.time_grid;
    let dt = tg.dt();
    let rho = c.rho;
    let beta = c.damping();
    let t0 = c.tension;

    let mut u = ScalarField::zeros(grid.clone(), tg.clone(), "u");
    {
        let b0 = data.boundary.slice(0);
        let first = u.slice_mut(0);
        for (node, v) in first.iter_mut().enumerate() {
            *v = if grid.is_boundary(node) {
                b0[node]
            } else {
                data.initial[node]
            };
        }
    }
    if tg.n_steps() == 0 {
        return Ok(u);
    }

    match settings.scheme {
        WaveScheme::Explicit => {
            let bound = cfl_bound(grid, &c);
            let span = tg.t_end() - tg.t0();
            let f_max = data
                .force
                .values()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            let u0_max = data.initial.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let b_max = data
                .boundary
                .values()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            // any bounded solution stays far below this
            let ceiling = 1e8 * (1.0 + u0_max + b_max + f_max * (span * span / rho + span / beta));

            let op = InteriorOperator::new(grid, 0.0, t0);
            let lap = |slice: &[f64], node_out: &mut Vec<f64>| {
                let load = op.boundary_load(slice);
                let inner = op.matrix.mul_vec(&op.gather(slice));
                node_out.clear();
                node_out.extend(inner.iter().zip(load).map(|(a, l)| l - a));
            };
            let a_plus = rho / (dt * dt) + beta / (2.0 * dt);
            let a_minus = rho / (dt * dt) - beta / (2.0 * dt);
            let mut tension = Vec::new();
            for j in 0..tg.n_steps() {
                let cur = u.slice(j).to_vec();
                lap(&cur, &mut tension);
                let force = data.force.slice(j);
                let next_inner: Vec<f64> = op
                    .interior
                    .iter()
                    .zip(&tension)
                    .map(|(&n, tl)| {
                        if j == 0 {
                            // starts from rest: u⁻¹ = u¹
                            cur[n] + dt * dt / (2.0 * rho) * (force[n] + tl)
                        } else {
                            let prev = u.at(n, j - 1);
                            (force[n] + tl + 2.0 * rho / (dt * dt) * cur[n] - a_minus * prev)
                                / a_plus
                        }
                    })
                    .collect();
                let next = op.scatter(&next_inner, data.boundary.slice(j + 1));
                if next.iter().any(|v| !v.is_finite() || v.abs() > ceiling) {
                    return Err(Error::Unstable {
                        time_index: j + 1,
                        cfl_bound: bound,
                    });
                }
                u.slice_mut(j + 1).copy_from_slice(&next);
            }
        }
        WaveScheme::Implicit => {
            let mass = rho / (dt * dt) + beta / dt;
            let op = InteriorOperator::new(grid, mass, t0);
            let relax = PsorSettings {
                omega: super::lcp::Relaxation::Optimal.omega(Some(op.jacobi_radius)),
                max_iters: settings.max_iters,
                tol: settings.tol,
            };
            for j in 0..tg.n_steps() {
                let cur = u.slice(j).to_vec();
                let prev = if j == 0 {
                    cur.clone()
                } else {
                    u.slice(j - 1).to_vec()
                };
                let load = op.boundary_load(data.boundary.slice(j + 1));
                let force = data.force.slice(j + 1);
                let rhs = op
                    .interior
                    .iter()
                    .zip(load)
                    .map(|(&n, l)| {
                        force[n]
                            + rho * (2.0 * cur[n] - prev[n]) / (dt * dt)
                            + beta * cur[n] / dt
                            + l
                    })
                    .collect();
                let system = LcpSystem {
                    matrix: op.matrix.clone(),
                    rhs,
                };
                let out = sor(&system, &op.gather(&cur), &relax).map_err(|e| match e {
                    Error::NotConverged {
                        iterations,
                        residual,
                        ..
                    } => Error::NotConverged {
                        time_index: j + 1,
                        iterations,
                        residual,
                    },
                    other => other,
                })?;
                let next = op.scatter(&out.solution, data.boundary.slice(j + 1));
                u.slice_mut(j + 1).copy_from_slice(&next);
            }
        }
    }
    Ok(u)
}

/// Physical displacement predicted by the obstacle problem for `spec`.
pub fn parabolic_physical(
    spec: &ObstacleProblemSpec,
    settings: &SolverSettings,
) -> Result<ScalarField> {
    let sol = solve_parabolic(spec, settings)?;
    let mut u = denormalize_field(&sol.u, &sol.normalization)?;
    u.set_name("u");
    Ok(u)
}

/// Rewrites any obstacle datum as a physical force table so that the
/// forcing no longer depends on the material constants.
fn freeze_forcing(spec: &ObstacleProblemSpec) -> Result<ObstacleProblemSpec> {
    let mut out = spec.clone();
    if let Forcing::Obstacle(_) = spec.forcing {
        let data = physical_data(spec)?;
        let mut table = data.force;
        table.set_name("F");
        out.forcing = Forcing::Physical(ForcingSpec::Tabulated(table));
        if spec.is_normalized() {
            out = super::problem::denormalize(&out)?;
        }
    } else if spec.is_normalized() {
        out = super::problem::denormalize(&out)?;
    }
    debug_assert_eq!(out.grid.unit_system(), UnitSystem::Physical);
    Ok(out)
}

/// One row of a quasi-static sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiStaticPoint {
    /// Factor applied to both `ρ` and `T₁`.
    pub inertia_factor: f64,
    /// `sup |u_wave − u_parabolic|` over the whole trajectory.
    pub gap: f64,
}

/// Shrinks the inertia while keeping the damping rate `2ρ/T₁` and the
/// tension fixed, and measures how far the damped wave stays from the
/// obstacle-problem trajectory with the same physical forcing.
pub fn quasi_static_sweep(
    spec: &ObstacleProblemSpec,
    inertia_factors: &[f64],
    solver: &SolverSettings,
    wave: &WaveSettings,
) -> Result<Vec<QuasiStaticPoint>> {
    let phys = freeze_forcing(spec)?;
    let reference = parabolic_physical(&phys, solver)?;
    inertia_factors
        .iter()
        .map(|&s| {
            if !(s > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "inertia factor must be positive, got {s}"
                )));
            }
            let mut scaled = phys.clone();
            scaled.constants = PhysicalConstants::new(
                phys.constants.rho * s,
                phys.constants.tension,
                phys.constants.t1 * s,
            )?;
            let w = solve_damped_wave(&scaled, wave)?;
            let gap = w
                .values()
                .iter()
                .zip(reference.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            Ok(QuasiStaticPoint {
                inertia_factor: s,
                gap,
            })
        })
        .collect()
}
