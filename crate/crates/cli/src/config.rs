//! Run configuration: flat `key = value` lines with dotted section names.
//!
//! ```text
//! # comment
//! scenario = stationary-1d
//! grid.cells = 200
//! solver.omega = optimal
//! analysis.rho = 0.4, 0.3, 0.2
//! ```
//!
//! A file starts from the defaults of its `scenario` and overrides them
//! key by key. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use porosim_core::forcing::ChargeScaleParams;
use porosim_core::geometry::format_g17;
use sha2::{Digest, Sha256};

/// Invalid configuration; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

pub const SCENARIOS: [&str; 5] = [
    "stationary-1d",
    "traveling-wave-1d",
    "flicker-1d",
    "two-bump-collision-1d",
    "radial-2d",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Omega {
    Fixed(f64),
    Optimal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingKind {
    /// Constant obstacle datum `f = value` in normalized units.
    Unit,
    /// Lorentz force of the traveling field wave.
    Wave,
    /// Physical force density read from a field CSV.
    Table(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveConfig {
    pub b_hat: [f64; 3],
    pub k: [f64; 3],
    pub v: f64,
    pub b_dc: [f64; 3],
    pub e0: [f64; 3],
    pub q: f64,
    pub gamma: f64,
    pub f_osc: f64,
    pub normal: [f64; 3],
    pub reference_area: f64,
    pub switch_off_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    /// Cells per axis.
    pub cells: usize,
    pub origin: [f64; 2],
    pub extent: [f64; 2],
    pub t_end: f64,
    pub steps: usize,
    pub rho: f64,
    pub tension: f64,
    pub t1: f64,
    pub forcing: ForcingKind,
    pub forcing_value: f64,
    pub wave: WaveConfig,
    pub omega: Omega,
    pub max_iters: usize,
    pub tol: f64,
    pub rho_list: Vec<f64>,
    pub tau_list: Vec<f64>,
    pub theta: f64,
    pub fit_threshold: f64,
    pub kernel_tol: f64,
    pub blowup_lambda: f64,
    pub max_points: usize,
    pub slice: Option<usize>,
    /// Inertia factors of the quasi-static sweep.
    pub inertia: Vec<f64>,
    /// Resolutions of the refinement sweep; empty means `{n/2, n, 2n}`.
    pub sweep_cells: Vec<usize>,
    pub scale: ChargeScaleParams,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Defaults of a bundled scenario.
    pub fn bundled(name: &str) -> ConfigResult<Self> {
        let mut c = RunConfig {
            scenario: name.to_string(),
            cells: 200,
            origin: [-1.0, 0.0],
            extent: [2.0, 0.0],
            t_end: 1.0,
            steps: 100,
            rho: 1.0,
            tension: 1.0,
            t1: 2.0,
            forcing: ForcingKind::Unit,
            forcing_value: 1.0,
            wave: WaveConfig {
                b_hat: [0.0, 1.0, 0.0],
                k: [0.25, 0.0, 0.0],
                v: 1.0,
                b_dc: [0.0, 1.0, 0.0],
                e0: [0.0; 3],
                q: 1.0,
                gamma: 0.0,
                f_osc: 0.1,
                normal: [0.0, 0.0, 1.0],
                reference_area: 1.0,
                switch_off_at: None,
            },
            omega: Omega::Optimal,
            max_iters: 20_000,
            tol: 1e-10,
            rho_list: vec![0.4, 0.33, 0.27, 0.22, 0.18, 0.15],
            tau_list: vec![0.4, 0.2, 0.1],
            theta: 0.25,
            fit_threshold: 0.1,
            kernel_tol: 1e-3,
            blowup_lambda: 0.2,
            max_points: 64,
            slice: None,
            inertia: vec![1.0, 0.1, 0.01, 0.001],
            sweep_cells: Vec::new(),
            scale: ChargeScaleParams::default(),
            seed: 0,
            out_dir: PathBuf::from(format!("out/{name}")),
        };
        match name {
            "stationary-1d" => {
                // offset so that the contact point x = 0 is not a node
                c.origin = [-1.0 + 2.0 / c.cells as f64 / 3.0, 0.0];
                c.t_end = 10.0;
                c.steps = 500;
            }
            "traveling-wave-1d" | "flicker-1d" => {
                c.origin = [2.0, 0.0];
                c.extent = [4.0, 0.0];
                c.t_end = 2.0;
                c.steps = 200;
                c.forcing = ForcingKind::Wave;
                if name == "flicker-1d" {
                    c.wave.switch_off_at = Some(1.0);
                }
            }
            "two-bump-collision-1d" => {
                c.cells = 400;
                c.t_end = 1.2;
                c.steps = 480;
                c.tau_list = vec![0.2, 0.1, 0.05];
            }
            "radial-2d" => {
                c.cells = 128;
                c.origin = [-1.0, -1.0];
                c.extent = [2.0, 2.0];
                c.t_end = 0.25;
                c.steps = 16;
                c.rho_list = vec![0.3, 0.26, 0.22, 0.19, 0.16, 0.14];
                // the backward window of the largest τ reaches back to t = 0
                c.tau_list = vec![0.25, 0.18, 0.125];
                c.max_points = 32;
            }
            other => {
                return err(format!(
                    "unknown scenario '{other}' (known: {})",
                    SCENARIOS.join(", ")
                ))
            }
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        if self.scenario == "radial-2d" {
            2
        } else {
            1
        }
    }

    /// Parses a config file; relative table paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> ConfigResult<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", i + 1));
            };
            entries.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let scenario = entries
            .iter()
            .find(|(_, k, _)| k == "scenario")
            .map(|(_, _, v)| v.clone())
            .unwrap_or_else(|| "stationary-1d".to_string());
        let mut c = RunConfig::bundled(&scenario)?;
        // cells first so that the stationary offset follows an override
        if let Some((line, _, v)) = entries.iter().find(|(_, k, _)| k == "grid.cells") {
            let cells = parse_usize(v).map_err(|e| ConfigError(format!("line {line}: {}", e.0)))?;
            c = c.with_cells(cells);
        }
        for (line, k, v) in &entries {
            if k == "scenario" || k == "grid.cells" {
                continue;
            }
            c.set(k, v, base)
                .map_err(|e| ConfigError(format!("line {line}: {}", e.0)))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Changes the resolution, keeping the stationary grid offset at `h/3`.
    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells = cells;
        if self.scenario == "stationary-1d" && cells > 0 {
            self.origin[0] = -1.0 + self.extent[0] / cells as f64 / 3.0;
        }
        self
    }

    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> ConfigResult<()> {
        let f = || parse_f64(value);
        match key {
            "grid.cells" => *self = self.clone().with_cells(parse_usize(value)?),
            "grid.x0" => self.origin[0] = f()?,
            "grid.y0" => self.origin[1] = f()?,
            "grid.lx" => self.extent[0] = f()?,
            "grid.ly" => self.extent[1] = f()?,
            "time.t_end" => self.t_end = f()?,
            "time.steps" => self.steps = parse_usize(value)?,
            "constants.rho" => self.rho = f()?,
            "constants.t0" => self.tension = f()?,
            "constants.t1" => self.t1 = f()?,
            "forcing.kind" => {
                self.forcing = match value {
                    "unit" => ForcingKind::Unit,
                    "wave" => ForcingKind::Wave,
                    "table" => ForcingKind::Table(PathBuf::new()),
                    other => {
                        return err(format!(
                            "forcing.kind must be unit, wave or table, got '{other}'"
                        ))
                    }
                }
            }
            "forcing.table" => self.forcing = ForcingKind::Table(base.join(value)),
            "forcing.value" => self.forcing_value = f()?,
            "forcing.b_hat" => self.wave.b_hat = parse_vec3(value)?,
            "forcing.k" => self.wave.k = parse_vec3(value)?,
            "forcing.v" => self.wave.v = f()?,
            "forcing.b_dc" => self.wave.b_dc = parse_vec3(value)?,
            "forcing.e0" => self.wave.e0 = parse_vec3(value)?,
            "forcing.q" => self.wave.q = f()?,
            "forcing.gamma" => self.wave.gamma = f()?,
            "forcing.f_osc" => self.wave.f_osc = f()?,
            "forcing.normal" => self.wave.normal = parse_vec3(value)?,
            "forcing.reference_area" => self.wave.reference_area = f()?,
            "forcing.switch_off_at" => {
                self.wave.switch_off_at = if value == "none" { None } else { Some(f()?) }
            }
            "solver.omega" => {
                self.omega = if value == "optimal" {
                    Omega::Optimal
                } else {
                    Omega::Fixed(f()?)
                }
            }
            "solver.max_iters" => self.max_iters = parse_usize(value)?,
            "solver.tol" => self.tol = f()?,
            "analysis.rho" => self.rho_list = parse_list(value)?,
            "analysis.tau" => self.tau_list = parse_list(value)?,
            "analysis.theta" => self.theta = f()?,
            "analysis.fit_threshold" => self.fit_threshold = f()?,
            "analysis.kernel_tol" => self.kernel_tol = f()?,
            "analysis.lambda" => self.blowup_lambda = f()?,
            "analysis.max_points" => self.max_points = parse_usize(value)?,
            "analysis.slice" => {
                self.slice = if value == "auto" {
                    None
                } else {
                    Some(parse_usize(value)?)
                }
            }
            "sweep.inertia" => self.inertia = parse_list(value)?,
            "sweep.cells" => {
                self.sweep_cells = if value == "auto" {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|v| parse_usize(v.trim()))
                        .collect::<ConfigResult<_>>()?
                }
            }
            "scale.charges_per_area" => self.scale.charges_per_area = f()?,
            "scale.dimple_area" => self.scale.dimple_area = f()?,
            "scale.energy_per_molecule" => self.scale.energy_per_molecule = f()?,
            "scale.characteristic_length" => self.scale.characteristic_length = f()?,
            "scale.dimple_mass" => self.scale.dimple_mass = f()?,
            "scale.g" => self.scale.g = f()?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad seed '{value}'")))?
            }
            "output.dir" => self.out_dir = base.join(value),
            other => return err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> ConfigResult<()> {
        let positive = [
            ("time.t_end", self.t_end),
            ("constants.rho", self.rho),
            ("constants.t0", self.tension),
            ("constants.t1", self.t1),
            ("solver.tol", self.tol),
            ("analysis.theta", self.theta),
            ("analysis.fit_threshold", self.fit_threshold),
            ("analysis.kernel_tol", self.kernel_tol),
            ("analysis.lambda", self.blowup_lambda),
            ("grid.lx", self.extent[0]),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.dim() == 2 && !(self.extent[1] > 0.0) {
            return err("grid.ly must be positive");
        }
        if self.cells < 4 || self.cells > 4096 {
            return err(format!(
                "grid.cells must lie in [4, 4096], got {}",
                self.cells
            ));
        }
        if self.steps == 0 || self.steps > 1_000_000 {
            return err(format!(
                "time.steps must lie in [1, 1e6], got {}",
                self.steps
            ));
        }
        if let Omega::Fixed(w) = self.omega {
            if !(w > 0.0 && w < 2.0) {
                return err(format!("solver.omega must lie in (0, 2), got {w}"));
            }
        }
        if self.max_iters == 0 {
            return err("solver.max_iters must be at least 1");
        }
        if self.theta >= 0.5 {
            return err("analysis.theta must be below 0.5 so the bands stay disjoint");
        }
        for (name, list, min_len) in [
            ("analysis.rho", &self.rho_list, 2),
            ("analysis.tau", &self.tau_list, 1),
        ] {
            if list.len() < min_len
                || list.iter().any(|v| !(*v > 0.0))
                || list.windows(2).any(|w| !(w[1] < w[0]))
            {
                return err(format!(
                    "{name} must be {min_len}+ positive, strictly decreasing values"
                ));
            }
        }
        if self.sweep_cells.iter().any(|&n| !(4..=4096).contains(&n)) {
            return err("sweep.cells entries must lie in [4, 4096]");
        }
        if self.inertia.iter().any(|v| !(*v > 0.0)) {
            return err("sweep.inertia factors must be positive");
        }
        if let ForcingKind::Table(path) = &self.forcing {
            if !path.is_file() {
                return err(format!("forcing table '{}' does not exist", path.display()));
            }
        }
        if self.wave.reference_area <= 0.0 || self.wave.v < 0.0 || self.wave.gamma < 0.0 {
            return err(
                "forcing.reference_area must be positive, forcing.v and forcing.gamma non-negative",
            );
        }
        let s = &self.scale;
        for (name, v) in [
            ("scale.charges_per_area", s.charges_per_area),
            ("scale.dimple_area", s.dimple_area),
            ("scale.energy_per_molecule", s.energy_per_molecule),
            ("scale.dimple_mass", s.dimple_mass),
            ("scale.g", s.g),
        ] {
            if !(v >= 0.0) {
                return err(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(s.characteristic_length > 0.0) {
            return err("scale.characteristic_length must be positive");
        }
        Ok(())
    }

    /// Every setting as `key = value`, in a fixed order.
    pub fn resolved(&self) -> String {
        let mut m: BTreeMap<&str, String> = BTreeMap::new();
        let g = |v: f64| format_g17(v);
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format_g17(*x))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let v3 = |v: &[f64; 3]| list(v);
        m.insert("scenario", self.scenario.clone());
        m.insert("grid.cells", self.cells.to_string());
        m.insert("grid.x0", g(self.origin[0]));
        m.insert("grid.lx", g(self.extent[0]));
        if self.dim() == 2 {
            m.insert("grid.y0", g(self.origin[1]));
            m.insert("grid.ly", g(self.extent[1]));
        }
        m.insert("time.t_end", g(self.t_end));
        m.insert("time.steps", self.steps.to_string());
        m.insert("constants.rho", g(self.rho));
        m.insert("constants.t0", g(self.tension));
        m.insert("constants.t1", g(self.t1));
        m.insert(
            "forcing.kind",
            match &self.forcing {
                ForcingKind::Unit => "unit".into(),
                ForcingKind::Wave => "wave".into(),
                ForcingKind::Table(_) => "table".into(),
            },
        );
        if let ForcingKind::Table(p) = &self.forcing {
            m.insert("forcing.table", p.display().to_string());
        }
        m.insert("forcing.value", g(self.forcing_value));
        let w = &self.wave;
        m.insert("forcing.b_hat", v3(&w.b_hat));
        m.insert("forcing.k", v3(&w.k));
        m.insert("forcing.v", g(w.v));
        m.insert("forcing.b_dc", v3(&w.b_dc));
        m.insert("forcing.e0", v3(&w.e0));
        m.insert("forcing.q", g(w.q));
        m.insert("forcing.gamma", g(w.gamma));
        m.insert("forcing.f_osc", g(w.f_osc));
        m.insert("forcing.normal", v3(&w.normal));
        m.insert("forcing.reference_area", g(w.reference_area));
        m.insert(
            "forcing.switch_off_at",
            w.switch_off_at.map_or("none".into(), g),
        );
        m.insert(
            "solver.omega",
            match self.omega {
                Omega::Optimal => "optimal".into(),
                Omega::Fixed(x) => g(x),
            },
        );
        m.insert("solver.max_iters", self.max_iters.to_string());
        m.insert("solver.tol", g(self.tol));
        m.insert("analysis.rho", list(&self.rho_list));
        m.insert("analysis.tau", list(&self.tau_list));
        m.insert("analysis.theta", g(self.theta));
        m.insert("analysis.fit_threshold", g(self.fit_threshold));
        m.insert("analysis.kernel_tol", g(self.kernel_tol));
        m.insert("analysis.lambda", g(self.blowup_lambda));
        m.insert("analysis.max_points", self.max_points.to_string());
        m.insert(
            "analysis.slice",
            self.slice.map_or("auto".into(), |s| s.to_string()),
        );
        m.insert("sweep.inertia", list(&self.inertia));
        m.insert(
            "sweep.cells",
            if self.sweep_cells.is_empty() {
                "auto".into()
            } else {
                self.sweep_cells
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            },
        );
        let s = &self.scale;
        m.insert("scale.charges_per_area", g(s.charges_per_area));
        m.insert("scale.dimple_area", g(s.dimple_area));
        m.insert("scale.energy_per_molecule", g(s.energy_per_molecule));
        m.insert("scale.characteristic_length", g(s.characteristic_length));
        m.insert("scale.dimple_mass", g(s.dimple_mass));
        m.insert("scale.g", g(s.g));
        m.insert("seed", self.seed.to_string());
        m.insert("output.dir", self.out_dir.display().to_string());
        let mut out = String::new();
        for (k, v) in m {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// SHA-256 of the resolved settings, output directory excluded.
    pub fn hash(&self) -> String {
        let text: String = self
            .resolved()
            .lines()
            .filter(|l| !l.starts_with("output.dir"))
            .map(|l| format!("{l}\n"))
            .collect();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_f64(s: &str) -> ConfigResult<f64> {
    s.parse::<f64>()
        .map_err(|_| ConfigError(format!("'{s}' is not a number")))
}

fn parse_usize(s: &str) -> ConfigResult<usize> {
    s.parse::<usize>()
        .map_err(|_| ConfigError(format!("'{s}' is not a non-negative integer")))
}

fn parse_list(s: &str) -> ConfigResult<Vec<f64>> {
    s.split(',').map(|x| parse_f64(x.trim())).collect()
}

fn parse_vec3(s: &str) -> ConfigResult<[f64; 3]> {
    let v = parse_list(s)?;
    match v.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => err(format!("expected three components, got '{s}'")),
    }
}
