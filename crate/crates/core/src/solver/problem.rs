use crate::error::{Error, Result};
use crate::forcing::{forcing_density, resample, ForcingSpec};
use crate::geometry::{Grid, ScalarField, TimeGrid, UnitSystem};

/// Membrane material constants (SI). In 1D `rho` is a line density and
/// `tension` a force; in 2D they are per unit area and per unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub rho: f64,
    pub tension: f64,
    /// Relaxation time of the surrounding medium.
    pub t1: f64,
}

impl PhysicalConstants {
    pub fn new(rho: f64, tension: f64, t1: f64) -> Result<Self> {
        let c = PhysicalConstants { rho, tension, t1 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rho", self.rho), ("T0", self.tension), ("T1", self.t1)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Squared speed of sound `T0/ρ`.
    pub fn c_s2(&self) -> f64 {
        self.tension / self.rho
    }

    pub fn c_s(&self) -> f64 {
        self.c_s2().sqrt()
    }

    /// Damping coefficient `2ρ/T1` multiplying `∂u/∂t` in the force balance.
    pub fn damping(&self) -> f64 {
        2.0 * self.rho / self.t1
    }
}

impl Default for PhysicalConstants {
    /// Constants for which the model equation already has unit
    /// coefficients: `u_t − u_xx = f`.
    fn default() -> Self {
        PhysicalConstants {
            rho: 1.0,
            tension: 1.0,
            t1: 2.0,
        }
    }
}

/// Scales taking physical variables to normalized ones:
/// `x' = x / space_scale`, `t' = t / time_scale`, `u' = u / u_scale`,
/// and a physical force density `F` to `F / f_scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRecord {
    pub space_scale: f64,
    pub time_scale: f64,
    pub u_scale: f64,
    pub f_scale: f64,
}

impl NormalizationRecord {
    pub const IDENTITY: NormalizationRecord = NormalizationRecord {
        space_scale: 1.0,
        time_scale: 1.0,
        u_scale: 1.0,
        f_scale: 1.0,
    };

    /// Scales that turn `(2/T1) u_t − c_s² Δu = F/ρ` into `u_t − Δu = F'`.
    ///
    /// `time_scale = T1/2` and `space_scale = c_s·T1/2` give unit
    /// coefficients; `u_scale = space_scale` keeps slopes unchanged, and
    /// `f_scale = ρ·u_scale/time_scale²`.
    pub fn from_constants(c: &PhysicalConstants) -> Self {
        let time_scale = c.t1 / 2.0;
        let space_scale = c.c_s() * time_scale;
        let u_scale = space_scale;
        NormalizationRecord {
            space_scale,
            time_scale,
            u_scale,
            f_scale: c.rho * u_scale / (time_scale * time_scale),
        }
    }
}

impl Default for NormalizationRecord {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Where the forcing datum comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    /// Physical force density, positive along the membrane normal; sampled
    /// at physical coordinates.
    Physical(ForcingSpec),
    /// The datum `f` of `Δu − u_t = f χ{u>0}` directly, on normalized
    /// coordinates. Positive `f` holds the membrane on the obstacle.
    Obstacle(ScalarField),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    /// `u = 0` on the patch boundary.
    ClampedZero,
    /// Boundary values read from this field (interior samples ignored),
    /// expressed in the problem's unit system.
    Prescribed(ScalarField),
}

/// A complete obstacle problem: domain, material, forcing and data.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleProblemSpec {
    pub grid: Grid,
    pub time_grid: TimeGrid,
    pub constants: PhysicalConstants,
    pub forcing: Forcing,
    pub boundary: Boundary,
    /// Displacement at the first time level, one value per node.
    pub initial_u: Vec<f64>,
    /// Scales relating this spec to physical units; identity while the
    /// spec is still physical.
    pub normalization: NormalizationRecord,
}

impl ObstacleProblemSpec {
    /// Flat membrane at rest, clamped boundary.
    pub fn new(
        grid: Grid,
        time_grid: TimeGrid,
        constants: PhysicalConstants,
        forcing: Forcing,
    ) -> Self {
        let n = grid.node_count();
        ObstacleProblemSpec {
            grid,
            time_grid,
            constants,
            forcing,
            boundary: Boundary::ClampedZero,
            initial_u: vec![0.0; n],
            normalization: NormalizationRecord::IDENTITY,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.grid.unit_system() == UnitSystem::Normalized
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if self.initial_u.len() != self.grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "initial data has {} values for {} nodes",
                self.initial_u.len(),
                self.grid.node_count()
            )));
        }
        if let Some(v) = self
            .initial_u
            .iter()
            .find(|v| !(**v >= 0.0) || !v.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "initial displacement must be finite and non-negative, found {v}"
            )));
        }
        if let Boundary::Prescribed(trace) = &self.boundary {
            if trace.grid().dim() != self.grid.dim() {
                return Err(Error::GridMismatch("boundary trace dimension".into()));
            }
            if trace.min() < 0.0 || !trace.all_finite() {
                return Err(Error::InvalidParameter(
                    "boundary data must be finite and non-negative".into(),
                ));
            }
        }
        if let Forcing::Physical(f) = &self.forcing {
            f.validate()?;
        }
        Ok(())
    }
}

fn scale_grid(grid: &Grid, factor: f64, unit: UnitSystem) -> Result<Grid> {
    let dim = grid.dim();
    let origin: Vec<f64> = (0..dim).map(|a| grid.origin(a) * factor).collect();
    let extent: Vec<f64> = (0..dim).map(|a| grid.extent(a) * factor).collect();
    let cells: Vec<usize> = (0..dim).map(|a| grid.n_cells(a)).collect();
    Ok(Grid::new(dim, &origin, &extent, &cells)?.with_unit_system(unit))
}

fn scale_time(tg: &TimeGrid, factor: f64) -> Result<TimeGrid> {
    TimeGrid::new(tg.t0() * factor, tg.dt() * factor, tg.n_steps())
}

/// Maps a physical field to normalized variables.
pub fn normalize_field(field: &ScalarField, rec: &NormalizationRecord) -> Result<ScalarField> {
    let grid = scale_grid(field.grid(), 1.0 / rec.space_scale, UnitSystem::Normalized)?;
    let tg = scale_time(field.time_grid(), 1.0 / rec.time_scale)?;
    let values = field.values().iter().map(|v| v / rec.u_scale).collect();
    ScalarField::from_values(grid, tg, values, field.name())
}

/// Inverse of [`normalize_field`].
pub fn denormalize_field(field: &ScalarField, rec: &NormalizationRecord) -> Result<ScalarField> {
    let grid = scale_grid(field.grid(), rec.space_scale, UnitSystem::Physical)?;
    let tg = scale_time(field.time_grid(), rec.time_scale)?;
    let values = field.values().iter().map(|v| v * rec.u_scale).collect();
    ScalarField::from_values(grid, tg, values, field.name())
}

/// Rewrites a physical spec in normalized variables. Already-normalized
/// specs are returned unchanged.
pub fn normalize(spec: &ObstacleProblemSpec) -> Result<ObstacleProblemSpec> {
    spec.validate()?;
    if spec.is_normalized() {
        return Ok(spec.clone());
    }
    let rec = NormalizationRecord::from_constants(&spec.constants);
    let boundary = match &spec.boundary {
        Boundary::ClampedZero => Boundary::ClampedZero,
        Boundary::Prescribed(trace) => Boundary::Prescribed(normalize_field(trace, &rec)?),
    };
    Ok(ObstacleProblemSpec {
        grid: scale_grid(&spec.grid, 1.0 / rec.space_scale, UnitSystem::Normalized)?,
        time_grid: scale_time(&spec.time_grid, 1.0 / rec.time_scale)?,
        constants: spec.constants,
        forcing: spec.forcing.clone(),
        boundary,
        initial_u: spec.initial_u.iter().map(|v| v / rec.u_scale).collect(),
        normalization: rec,
    })
}

/// Inverse of [`normalize`]: back to physical units.
pub fn denormalize(spec: &ObstacleProblemSpec) -> Result<ObstacleProblemSpec> {
    if !spec.is_normalized() {
        return Ok(spec.clone());
    }
    let rec = spec.normalization;
    let boundary = match &spec.boundary {
        Boundary::ClampedZero => Boundary::ClampedZero,
        Boundary::Prescribed(trace) => Boundary::Prescribed(denormalize_field(trace, &rec)?),
    };
    Ok(ObstacleProblemSpec {
        grid: scale_grid(&spec.grid, rec.space_scale, UnitSystem::Physical)?,
        time_grid: scale_time(&spec.time_grid, rec.time_scale)?,
        constants: spec.constants,
        forcing: spec.forcing.clone(),
        boundary,
        initial_u: spec.initial_u.iter().map(|v| v * rec.u_scale).collect(),
        normalization: NormalizationRecord::IDENTITY,
    })
}

/// The datum `f` of the normalized obstacle problem on the normalized grid
/// of `spec`.
pub fn obstacle_datum(spec: &ObstacleProblemSpec) -> Result<ScalarField> {
    let ns = normalize(spec)?;
    let rec = ns.normalization;
    match &ns.forcing {
        Forcing::Obstacle(table) => resample(table, &ns.grid, &ns.time_grid),
        Forcing::Physical(forcing) => {
            let grid = scale_grid(&ns.grid, rec.space_scale, UnitSystem::Physical)?;
            let tg = scale_time(&ns.time_grid, rec.time_scale)?;
            let density = forcing_density(forcing, &grid, &tg)?;
            let values = density.values().iter().map(|v| -v / rec.f_scale).collect();
            ScalarField::from_values(ns.grid.clone(), ns.time_grid.clone(), values, "f")
        }
    }
}

/// Boundary values for every time level of the normalized spec `ns`
/// (zero at interior nodes).
pub(crate) fn boundary_values(ns: &ObstacleProblemSpec) -> Result<ScalarField> {
    let mut out = ScalarField::zeros(ns.grid.clone(), ns.time_grid.clone(), "boundary");
    if let Boundary::Prescribed(trace) = &ns.boundary {
        let sampled = resample(trace, &ns.grid, &ns.time_grid)?;
        for j in 0..ns.time_grid.n_times() {
            let src = sampled.slice(j);
            let dst = out.slice_mut(j);
            for node in 0..ns.grid.node_count() {
                if ns.grid.is_boundary(node) {
                    dst[node] = src[node];
                }
            }
        }
    }
    Ok(out)
}
