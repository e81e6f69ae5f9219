use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use porosim_core::analysis::{
    analyze, extract_free_boundary, overlay_svg, profiles_svg, write_classification_csv,
    write_regularity_csv, write_weiss_csv, AnalysisReport, PointLabel,
};
use porosim_core::forcing::{
    check_admissible_with, resample, scale_report, AdmissibilityOptions, ScaleReport,
};
use porosim_core::geometry::{format_g17, read_field_csv, write_field_csv};
use porosim_core::solver::{
    check_stefan, obstacle_datum, positivity_threshold, quasi_static_sweep, solve_parabolic,
    ParabolicSolution, WaveSettings,
};
use porosim_core::{Error as CoreError, ScalarField};
use serde_json::json;

use crate::config::{ConfigError, ForcingKind, RunConfig};
use crate::scenario::{build, Scenario};

/// Stable process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Exit code for an error raised by a command.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match e.downcast_ref::<CoreError>() {
        Some(CoreError::Csv { .. })
        | Some(CoreError::InvalidParameter(_))
        | Some(CoreError::InvalidGrid(_)) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// One `key=value` line describing a failure, for scripts.
pub fn error_line(e: &anyhow::Error) -> String {
    let msg = format!("{e:#}").replace('\n', " ");
    match e.downcast_ref::<CoreError>() {
        Some(CoreError::NotConverged {
            time_index,
            iterations,
            residual,
        }) => format!(
            "error kind=not_converged time_index={time_index} iterations={iterations} residual={} message=\"{msg}\"",
            format_g17(*residual)
        ),
        Some(CoreError::Unstable { time_index, cfl_bound }) => format!(
            "error kind=unstable time_index={time_index} cfl_bound={} message=\"{msg}\"",
            format_g17(*cfl_bound)
        ),
        Some(CoreError::Csv { line, .. }) => format!("error kind=parse line={line} message=\"{msg}\""),
        _ if e.downcast_ref::<ConfigError>().is_some() => format!("error kind=config message=\"{msg}\""),
        _ => format!("error kind=failure message=\"{msg}\""),
    }
}

fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    write_file(path, |out| Ok(write_field_csv(field, out)?))
}

/// Sidecar tying every output file of a command to the config hash.
fn write_metadata(dir: &Path, command: &str, config: &RunConfig, files: &[&str]) -> Result<()> {
    let meta = json!({
        "command": command,
        "scenario": config.scenario,
        "config_hash": config.hash(),
        "version": env!("CARGO_PKG_VERSION"),
        "files": files,
    });
    write_file(&dir.join("metadata.json"), |out| {
        serde_json::to_writer_pretty(&mut *out, &meta)?;
        writeln!(out)?;
        Ok(())
    })
}

/// Final-level sup distance to the scenario's stationary solution.
pub fn final_error(sol: &ParabolicSolution, scenario: &Scenario) -> Option<f64> {
    let exact = scenario.exact.as_ref()?;
    let g = sol.u.grid();
    let j = sol.u.time_grid().n_steps();
    Some(
        (0..g.node_count())
            .map(|n| (sol.u.at(n, j) - exact.u(g.node_position(n), 0.0)).abs())
            .fold(0.0, f64::max),
    )
}

pub fn cmd_simulate(config: &RunConfig, dry_run: bool, out: &mut dyn Write) -> Result<i32> {
    if dry_run {
        write!(out, "{}", config.resolved())?;
        writeln!(out, "# config hash {}", config.hash())?;
        return Ok(EXIT_OK);
    }
    let scenario = build(config)?;
    let sol = solve_parabolic(&scenario.spec, &scenario.solver)?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_field(&dir.join("u.csv"), &sol.u)?;
    write_field(&dir.join("f.csv"), &sol.f)?;
    let fb = extract_free_boundary(&sol.u, positivity_threshold(&sol.u));
    fs::write(dir.join("profiles.svg"), profiles_svg(&sol.u, &fb))?;
    fs::write(dir.join("config.txt"), config.resolved())?;
    write_metadata(
        dir,
        "simulate",
        config,
        &["u.csv", "f.csv", "profiles.svg", "config.txt"],
    )?;

    let iters = sol.steps.iter().map(|s| s.iterations).max().unwrap_or(0);
    let stefan = check_stefan(&sol.u, 1e-8);
    writeln!(out, "scenario {}", config.scenario)?;
    writeln!(
        out,
        "steps {}  omega {:.4}  max PSOR iterations {iters}",
        sol.steps.len(),
        sol.omega
    )?;
    writeln!(
        out,
        "max u {}  interface points {}",
        format_g17(sol.u.max()),
        fb.len()
    )?;
    writeln!(
        out,
        "stefan monotone {}  violation {}",
        stefan.ok,
        format_g17(stefan.violation)
    )?;
    let adm = check_admissible_with(
        &sol.f,
        0.5,
        AdmissibilityOptions {
            seed: config.seed,
            ..AdmissibilityOptions::default()
        },
    )?;
    writeln!(
        out,
        "datum admissible {}  min f {}  holder(1/2) {}  pairs {}",
        adm.ok,
        format_g17(adm.delta0),
        format_g17(adm.holder_const),
        adm.pairs_checked
    )?;
    if let Some(err) = final_error(&sol, &scenario) {
        writeln!(out, "final-slice L-inf error vs exact {}", format_g17(err))?;
    }
    writeln!(out, "wrote {}", dir.display())?;
    Ok(EXIT_OK)
}

/// Loads a trajectory and the matching obstacle datum.
fn load_trajectory(path: &Path, config: &RunConfig) -> Result<(ScalarField, ScalarField)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let u = read_field_csv(BufReader::new(file), "u")?;
    let scenario = build(config)?;
    let f = obstacle_datum(&scenario.spec)?;
    let f = if f.same_layout(&u) {
        f
    } else {
        resample(&f, u.grid(), u.time_grid())
            .context("trajectory grid is not covered by the configured scenario")?
    };
    Ok((u, f))
}

pub fn run_analysis(
    u: &ScalarField,
    f: &ScalarField,
    config: &RunConfig,
) -> Result<AnalysisReport> {
    let scenario = build(config)?;
    Ok(analyze(u, f, &scenario.analysis)?)
}

pub fn cmd_analyze(trajectory: &Path, config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (u, f) = load_trajectory(trajectory, config)?;
    let report = run_analysis(&u, &f, config)?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(&dir.join("regularity.csv"), |o| {
        Ok(write_regularity_csv(&report, o)?)
    })?;
    write_file(&dir.join("classification.csv"), |o| {
        Ok(write_classification_csv(&report, o)?)
    })?;
    write_file(&dir.join("weiss.csv"), |o| Ok(write_weiss_csv(&report, o)?))?;
    fs::write(dir.join("overlay.svg"), overlay_svg(&u, &report))?;
    write_metadata(
        dir,
        "analyze",
        config,
        &[
            "regularity.csv",
            "classification.csv",
            "weiss.csv",
            "overlay.svg",
        ],
    )?;

    if report.points.is_empty() {
        writeln!(out, "no FB points")?;
        return Ok(EXIT_OK);
    }
    let count = |l: PointLabel| report.points.iter().filter(|p| p.label == l).count();
    writeln!(
        out,
        "time level {}  analysed points {} of {}",
        report.slice,
        report.points.len(),
        report.free_boundary.len()
    )?;
    writeln!(
        out,
        "regular {}  singular {}  unresolved {}",
        count(PointLabel::Regular),
        count(PointLabel::Singular),
        count(PointLabel::Unresolved)
    )?;
    let exps: Vec<f64> = report
        .points
        .iter()
        .filter_map(|p| p.regularity.as_ref().ok().map(|r| r.fitted_exponent))
        .collect();
    if let (Some(lo), Some(hi)) = (
        exps.iter().cloned().reduce(f64::min),
        exps.iter().cloned().reduce(f64::max),
    ) {
        writeln!(out, "growth exponent range [{lo:.4}, {hi:.4}]")?;
    }
    for (j, n) in &report.singular.per_slice {
        writeln!(out, "level {j}: {n} singular point(s)")?;
    }
    for sp in &report.singular.singular {
        writeln!(
            out,
            "singular at x = {:?} t = {} kernel dim {} isolated {}",
            &sp.z.x[..report.free_boundary.dim],
            format_g17(sp.z.t),
            sp.kernel_dim.map_or("-".into(), |k| k.to_string()),
            sp.isolated
        )?;
    }
    writeln!(out, "wrote {}", dir.display())?;
    Ok(EXIT_OK)
}

fn scale_rows(r: &ScaleReport) -> [(&'static str, f64, &'static str); 4] {
    [
        ("carriers", r.carriers, ""),
        ("per_molecule_force", r.per_molecule_force, "N"),
        ("total_force", r.total_force, "N"),
        ("gravity_force", r.gravity_force, "N"),
    ]
}

pub fn cmd_scale_report(config: &RunConfig, as_json: bool, out: &mut dyn Write) -> Result<i32> {
    let r = scale_report(&config.scale);
    if as_json {
        let mut map = serde_json::Map::new();
        for (k, v, _) in scale_rows(&r) {
            map.insert(k.into(), json!(v));
        }
        map.insert(
            "force_to_gravity".into(),
            json!(r.total_force / r.gravity_force),
        );
        writeln!(out, "{}", serde_json::Value::Object(map))?;
    } else {
        writeln!(out, "{:<20} {:>12}", "quantity", "value")?;
        for (k, v, unit) in scale_rows(&r) {
            writeln!(out, "{k:<20} {v:>12.3e} {unit}")?;
        }
        writeln!(
            out,
            "{:<20} {:>12.3e}",
            "force/gravity",
            r.total_force / r.gravity_force
        )?;
    }
    Ok(EXIT_OK)
}

/// Resolutions of a refinement sweep: `sweep.cells` or `{n/2, n, 2n}`.
fn sweep_cells(config: &RunConfig) -> Vec<usize> {
    if config.sweep_cells.is_empty() {
        vec![config.cells / 2, config.cells, config.cells * 2]
    } else {
        config.sweep_cells.clone()
    }
}

fn thread_cap() -> usize {
    std::env::var("POROSIM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

struct SweepRow {
    cells: usize,
    h: f64,
    max_u: f64,
    error: Option<f64>,
    iterations: usize,
}

/// Refinement sweep: one simulation per resolution, each in its own
/// `cells-N` directory, run on up to `POROSIM_THREADS` threads. Wave
/// scenarios also get the quasi-static inertia sweep.
pub fn cmd_sweep(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let cells = sweep_cells(config);
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<Result<SweepRow>>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    let workers = thread_cap().min(cells.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= cells.len() {
                    break;
                }
                let res = sweep_one(config, cells[k]);
                rows.lock().expect("no worker panicked")[k] = Some(res);
            });
        }
    });
    let rows = rows.into_inner().expect("no worker panicked");
    let dir = &config.out_dir;
    fs::create_dir_all(dir)?;
    let mut table = String::from("cells,h,max_u,error,max_iterations\n");
    writeln!(
        out,
        "{:>8} {:>12} {:>14} {:>14} {:>8}",
        "cells", "h", "max u", "error", "iters"
    )?;
    for row in rows {
        let row = row.expect("every index is visited")?;
        let err = row.error.map_or("nan".into(), format_g17);
        table.push_str(&format!(
            "{},{},{},{},{}\n",
            row.cells,
            format_g17(row.h),
            format_g17(row.max_u),
            err,
            row.iterations
        ));
        writeln!(
            out,
            "{:>8} {:>12.5e} {:>14.6e} {:>14} {:>8}",
            row.cells,
            row.h,
            row.max_u,
            row.error.map_or("-".into(), |e| format!("{e:.6e}")),
            row.iterations
        )?;
    }
    fs::write(dir.join("sweep.csv"), table)?;
    let mut files = vec!["sweep.csv"];
    if matches!(config.forcing, ForcingKind::Wave) {
        let scenario = build(config)?;
        let pts = quasi_static_sweep(
            &scenario.spec,
            &config.inertia,
            &scenario.solver,
            &WaveSettings::default(),
        )?;
        let mut qs = String::from("inertia_factor,gap\n");
        writeln!(out, "quasi-static sweep")?;
        for p in &pts {
            qs.push_str(&format!(
                "{},{}\n",
                format_g17(p.inertia_factor),
                format_g17(p.gap)
            ));
            writeln!(out, "  inertia x{:<8} gap {:.6e}", p.inertia_factor, p.gap)?;
        }
        fs::write(dir.join("quasi_static.csv"), qs)?;
        files.push("quasi_static.csv");
    }
    write_metadata(dir, "sweep", config, &files)?;
    writeln!(out, "wrote {}", dir.display())?;
    Ok(EXIT_OK)
}

fn sweep_one(config: &RunConfig, cells: usize) -> Result<SweepRow> {
    let mut c = config.clone().with_cells(cells);
    c.out_dir = config.out_dir.join(format!("cells-{cells}"));
    c.validate()?;
    let scenario = build(&c)?;
    let sol = solve_parabolic(&scenario.spec, &scenario.solver)?;
    fs::create_dir_all(&c.out_dir)?;
    write_field(&c.out_dir.join("u.csv"), &sol.u)?;
    write_metadata(&c.out_dir, "sweep", &c, &["u.csv"])?;
    Ok(SweepRow {
        cells,
        h: sol.u.grid().h_max(),
        max_u: sol.u.max(),
        error: final_error(&sol, &scenario),
        iterations: sol.steps.iter().map(|s| s.iterations).max().unwrap_or(0),
    })
}

/// Output directory override from the command line.
pub fn with_out_dir(mut config: RunConfig, out: Option<PathBuf>) -> RunConfig {
    if let Some(dir) = out {
        config.out_dir = dir;
    }
    config
}
