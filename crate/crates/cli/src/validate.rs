//! Self-checks of the solver and diagnostics against the oracles.

use std::io::Write;

use anyhow::Result;
use porosim_core::analysis::{
    classify_point, compute_a_n, rescale_blowup, sample_exact, ClassifySettings, ReferenceCylinder,
    WeissQuadrature,
};
use porosim_core::forcing::{scale_report, ChargeScaleParams};
use porosim_core::geometry::ConstantFunction;
use porosim_core::oracle::{
    brute_force_lcp, dense_heat_lcp, exact_half_space, exact_polynomial, exact_radial_2d,
    radial_stationary_profile, random_lcp,
};
use porosim_core::solver::{
    check_stefan, psor, quasi_static_sweep, solve_parabolic, step_parabolic, PsorSettings,
    Relaxation, SolverSettings, WaveSettings,
};
use porosim_core::{Grid, SpaceTimePoint};

use crate::commands::{final_error, EXIT_FAILURE, EXIT_OK};
use crate::config::RunConfig;
use crate::scenario::build;

/// One implicit step: `(grid, dt, u_prev, f_next, boundary_next) → u_next`.
pub type StepFn =
    dyn Fn(&Grid, f64, &[f64], &[f64], &[f64]) -> porosim_core::Result<Vec<f64>> + Sync;

/// The production step, solved to a tight tolerance.
pub fn default_step(
    grid: &Grid,
    dt: f64,
    u_prev: &[f64],
    f_next: &[f64],
    boundary: &[f64],
) -> porosim_core::Result<Vec<f64>> {
    let settings = SolverSettings {
        relaxation: Relaxation::Optimal,
        max_iters: 100_000,
        tol: 1e-13,
    };
    Ok(step_parabolic(grid, u_prev, f_next, dt, boundary, &settings)?.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const CHECK_NAMES: [&str; 10] = [
    "exact-stationary",
    "exact-radial-oracle",
    "lcp-random",
    "lcp-stencil",
    "a_n-stability",
    "weiss-dichotomy",
    "blowup-invariance",
    "quasi-static",
    "stefan",
    "scale-report",
];

/// Runs every check whose name contains `filter`.
pub fn run_checks(filter: Option<&str>, step: &StepFn) -> Vec<Check> {
    CHECK_NAMES
        .iter()
        .filter(|name| filter.is_none_or(|f| name.contains(f)))
        .map(|&name| {
            let outcome = match name {
                "exact-stationary" => exact_stationary(),
                "exact-radial-oracle" => exact_radial_oracle(),
                "lcp-random" => lcp_random(),
                "lcp-stencil" => lcp_stencil(step),
                "a_n-stability" => a_n_stability(),
                "weiss-dichotomy" => weiss_dichotomy(),
                "blowup-invariance" => blowup_invariance(),
                "quasi-static" => quasi_static(),
                "stefan" => stefan(),
                _ => scale(),
            };
            match outcome {
                Ok((passed, detail)) => Check {
                    name,
                    passed,
                    detail,
                },
                Err(e) => Check {
                    name,
                    passed: false,
                    detail: format!("error: {e:#}"),
                },
            }
        })
        .collect()
}

pub fn cmd_validate(filter: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    cmd_validate_with(filter, &default_step, out)
}

pub fn cmd_validate_with(filter: Option<&str>, step: &StepFn, out: &mut dyn Write) -> Result<i32> {
    let checks = run_checks(filter, step);
    if checks.is_empty() {
        writeln!(out, "no check matches the filter")?;
        return Ok(EXIT_FAILURE);
    }
    writeln!(out, "{:<22} {:<6} detail", "check", "status")?;
    for c in &checks {
        writeln!(
            out,
            "{:<22} {:<6} {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        )?;
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        writeln!(out, "all {} checks passed", checks.len())?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "failed: {}", failed.join(", "))?;
        Ok(EXIT_FAILURE)
    }
}

type Outcome = Result<(bool, String)>;

fn exact_stationary() -> Outcome {
    let c = RunConfig::bundled("stationary-1d")?.with_cells(100);
    let s = build(&c)?;
    let sol = solve_parabolic(&s.spec, &s.solver)?;
    let err = final_error(&sol, &s).unwrap_or(f64::INFINITY);
    let h = sol.u.grid().h(0);
    Ok((
        err <= 5.0 * h * h,
        format!("L-inf error {err:.3e} vs 5h^2 = {:.3e}", 5.0 * h * h),
    ))
}

fn exact_radial_oracle() -> Outcome {
    let exact = exact_radial_2d([0.0, 0.0], 0.5)?;
    let outer = 1.5;
    let profile = radial_stationary_profile(outer, exact.u([outer, 0.0], 0.0), 3000)?;
    let worst = (0..=300)
        .map(|k| {
            let r = outer * k as f64 / 300.0;
            (profile.value(r).unwrap_or(f64::NAN) - exact.u([r, 0.0], 0.0)).abs()
        })
        .fold(0.0, f64::max);
    let dr = (profile.contact_radius() - 0.5).abs();
    Ok((
        worst <= 1e-5 && dr <= 2e-3,
        format!("max gap {worst:.2e}, contact radius off by {dr:.2e}"),
    ))
}

fn lcp_random() -> Outcome {
    let settings = PsorSettings {
        omega: 1.2,
        max_iters: 100_000,
        tol: 1e-13,
    };
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let sys = random_lcp(seed, 1 + (seed as usize % 12));
        let exact = brute_force_lcp(&sys)?;
        let got = psor(&sys, &vec![0.0; sys.dim()], &settings)?.solution;
        for (a, b) in got.iter().zip(&exact) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok((
        worst <= 1e-10,
        format!("50 systems, max componentwise gap {worst:.2e}"),
    ))
}

fn lcp_stencil(step: &StepFn) -> Outcome {
    let mut worst = 0.0f64;
    let cases = [
        Grid::new_1d(-1.0, 2.0, 12)?,
        Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [4, 5])?,
    ];
    for grid in &cases {
        let dt = 0.05;
        let n = grid.node_count();
        // sign-changing datum so that both contact and free nodes occur
        let f: Vec<f64> = (0..n)
            .map(|k| (3.0 * grid.node_position(k)[0]).sin())
            .collect();
        let boundary: Vec<f64> = (0..n)
            .map(|k| if grid.is_boundary(k) { 0.2 } else { 0.0 })
            .collect();
        let mut u: Vec<f64> = (0..n)
            .map(|k| 0.1 * (1.0 + grid.node_position(k)[0]))
            .collect();
        for _ in 0..3 {
            let next = step(grid, dt, &u, &f, &boundary)?;
            let (sys, nodes) = dense_heat_lcp(grid, dt, &u, &f, &boundary)?;
            let exact = brute_force_lcp(&sys)?;
            for (k, &node) in nodes.iter().enumerate() {
                worst = worst.max((next[node] - exact[k]).abs());
            }
            u = next;
        }
    }
    Ok((
        worst <= 1e-10,
        format!("stepper vs enumeration on 1D and 2D grids, max gap {worst:.2e}"),
    ))
}

fn a_n_stability() -> Outcome {
    let quad = WeissQuadrature::default();
    let mut worst = 0.0f64;
    let mut values = Vec::new();
    for dim in [1, 2] {
        let a = compute_a_n(dim, &quad)?;
        let b = compute_a_n(dim, &quad.doubled())?;
        worst = worst.max(((a - b) / b).abs());
        values.push(b);
    }
    Ok((
        worst <= 1e-3,
        format!(
            "A_1 = {:.6}, A_2 = {:.6}, relative change {worst:.1e}",
            values[0], values[1]
        ),
    ))
}

fn weiss_dichotomy() -> Outcome {
    let settings = ClassifySettings::default();
    let z = SpaceTimePoint::new_2d(0.0, 0.0, 0.0);
    let mut lines = Vec::new();
    let mut ok = true;
    for dim in [1, 2] {
        let a_n = compute_a_n(dim, &settings.quadrature)?;
        let one = ConstantFunction { dim, value: 1.0 };
        let half = exact_half_space(dim, if dim == 1 { [1.0, 0.0] } else { [0.6, 0.8] })?;
        let poly = exact_polynomial(dim, 0.0, [[0.5, 0.0], [0.0, 0.0]])?;
        let r1 = classify_point(&half, &one, &z, a_n, &settings)?.ratio;
        let r2 = classify_point(&poly, &one, &z, a_n, &settings)?.ratio;
        ok &= (0.95..=1.05).contains(&r1) && (1.90..=2.10).contains(&r2);
        lines.push(format!("{dim}D ratios {r1:.4} / {r2:.4}"));
    }
    Ok((ok, lines.join(", ")))
}

fn blowup_invariance() -> Outcome {
    let window = ReferenceCylinder::default();
    let z = SpaceTimePoint::new_2d(0.0, 0.0, 0.0);
    let mut worst = 0.0f64;
    let profiles = [
        exact_half_space(2, [0.6, 0.8])?,
        exact_polynomial(2, -0.5, [[0.1, 0.05], [0.05, 0.15]])?,
        exact_polynomial(1, 0.0, [[0.5, 0.0], [0.0, 0.0]])?,
    ];
    for sol in &profiles {
        let reference = sample_exact(sol, &window)?;
        for lambda in [1.0, 0.5, 0.25] {
            let scaled = rescale_blowup(sol, &z, lambda, 1.0, &window)?;
            for (a, b) in scaled.values().iter().zip(reference.values()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((
        worst <= 1e-6,
        format!("max deviation over lambda in {{1, 1/2, 1/4}}: {worst:.2e}"),
    ))
}

fn quasi_static() -> Outcome {
    let c = RunConfig::bundled("traveling-wave-1d")?;
    let s = build(&c)?;
    let pts = quasi_static_sweep(&s.spec, &c.inertia, &s.solver, &WaveSettings::default())?;
    let gaps: Vec<f64> = pts.iter().map(|p| p.gap).collect();
    let ok = gaps.len() >= 2 && gaps.windows(2).all(|w| w[1] < w[0]);
    Ok((
        ok,
        format!(
            "gaps {}",
            gaps.iter()
                .map(|g| format!("{g:.3e}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ),
    ))
}

fn stefan() -> Outcome {
    let run = |name: &str| -> Result<f64> {
        let s = build(&RunConfig::bundled(name)?)?;
        let sol = solve_parabolic(&s.spec, &s.solver)?;
        Ok(check_stefan(&sol.u, 1e-8).violation)
    };
    let sustained = run("traveling-wave-1d")?;
    let flicker = run("flicker-1d")?;
    Ok((
        sustained >= -1e-8 && flicker < 0.0,
        format!("violation sustained {sustained:.2e}, flicker {flicker:.3e}"),
    ))
}

fn scale() -> Outcome {
    let r = scale_report(&ChargeScaleParams::default());
    let close = |a: f64, b: f64| ((a - b) / b).abs() <= 1e-12;
    let ok = close(r.per_molecule_force, 1e-11)
        && close(r.total_force, 1e-2)
        && (r.gravity_force / 1e-20 - 1.0).abs() < 0.05;
    Ok((
        ok,
        format!(
            "per molecule {:.3e} N, total {:.3e} N, gravity {:.3e} N",
            r.per_molecule_force, r.total_force, r.gravity_force
        ),
    ))
}
