//! External forcing of the membrane: the traveling field wave, the Lorentz
//! force it exerts, and checks on the resulting force density.

mod admissible;
mod scale;
mod wave;

pub use admissible::{
    check_admissible, check_admissible_with, AdmissibilityOptions, AdmissibilityReport,
};
pub use scale::{scale_report, ChargeScaleParams, ScaleReport, GRAVITY};
pub use wave::{b_field, capacitive_reactance, e_field, lorentz_force, WaveForcingParams};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{Grid, ScalarField, TimeGrid};

/// Dimple-top area used to turn a force into a force density (m²).
pub const DEFAULT_REFERENCE_AREA: f64 = 100e-18;

/// Lorentz forcing from an analytic field wave.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveForcing {
    pub params: WaveForcingParams,
    /// Unit vector along which the membrane is displaced.
    pub normal_dir: Vector3<f64>,
    /// Area (2D) or length (1D) the force is spread over.
    pub reference_area: f64,
    /// The wave is switched off from this time on, if set.
    pub switch_off_at: Option<f64>,
}

impl WaveForcing {
    pub fn new(params: WaveForcingParams) -> Self {
        WaveForcing {
            params,
            normal_dir: Vector3::z(),
            reference_area: DEFAULT_REFERENCE_AREA,
            switch_off_at: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if (self.normal_dir.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "normal direction must be a unit vector".into(),
            ));
        }
        if !(self.reference_area > 0.0) || !self.reference_area.is_finite() {
            return Err(Error::InvalidParameter(
                "reference area must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Normal force density at a membrane point (positive pushes the
    /// membrane along `normal_dir`).
    pub fn density_at(&self, x: &Vector3<f64>, t: f64) -> f64 {
        if self.switch_off_at.is_some_and(|t_off| t >= t_off) {
            return 0.0;
        }
        lorentz_force(&self.params, x, t).dot(&self.normal_dir) / self.reference_area
    }
}

/// Source of the force density `f(x, t)` acting on the membrane.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingSpec {
    Wave(WaveForcing),
    /// A precomputed density, resampled onto the solver grid.
    Tabulated(ScalarField),
}

impl ForcingSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ForcingSpec::Wave(w) => w.validate(),
            ForcingSpec::Tabulated(table) => {
                if table.all_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(
                        "tabulated forcing has non-finite samples".into(),
                    ))
                }
            }
        }
    }
}

/// Membrane point of grid position `p` in the 3D frame (flat membrane in
/// the `z = 0` plane).
pub(crate) fn embed(p: [f64; 2]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], 0.0)
}

/// Samples the normal force density on every node and time level.
pub fn forcing_density(
    spec: &ForcingSpec,
    grid: &Grid,
    time_grid: &TimeGrid,
) -> Result<ScalarField> {
    spec.validate()?;
    match spec {
        ForcingSpec::Wave(w) => Ok(ScalarField::from_fn(
            grid.clone(),
            time_grid.clone(),
            "f",
            |p, t| w.density_at(&embed(p), t),
        )),
        ForcingSpec::Tabulated(table) => resample(table, grid, time_grid),
    }
}

/// Interpolates `table` onto another space-time grid; fails if any target
/// sample lies outside the table.
pub fn resample(table: &ScalarField, grid: &Grid, time_grid: &TimeGrid) -> Result<ScalarField> {
    if table.grid().dim() != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "table is {}D but the grid is {}D",
            table.grid().dim(),
            grid.dim()
        )));
    }
    if table.grid().matches(grid) && table.time_grid().matches(time_grid) {
        let mut out = table.clone();
        out.set_name("f");
        return Ok(out);
    }
    let mut values = Vec::with_capacity(grid.node_count() * time_grid.n_times());
    for j in 0..time_grid.n_times() {
        let t = time_grid.time(j);
        for node in 0..grid.node_count() {
            let p = grid.node_position(node);
            let v = table
                .interpolate(p, t)
                .ok_or_else(|| Error::Extrapolation {
                    x: p[..grid.dim()].to_vec(),
                    t,
                })?;
            values.push(v);
        }
    }
    ScalarField::from_values(grid.clone(), time_grid.clone(), values, "f")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn wave(q: f64) -> WaveForcing {
        let params = WaveForcingParams {
            b_hat: Vector3::new(0.0, 1.0, 0.0),
            k_vec: Vector3::new(0.25, 0.0, 0.0),
            v: 1.0,
            b_dc: Vector3::zeros(),
            e0: Vector3::zeros(),
            q,
            gamma: 0.0,
            f_osc: 0.1,
        };
        WaveForcing {
            params,
            normal_dir: Vector3::z(),
            reference_area: 1.0,
            switch_off_at: None,
        }
    }

    fn grids() -> (Grid, TimeGrid) {
        (
            Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [8, 8]).unwrap(),
            TimeGrid::new(0.0, 0.1, 4).unwrap(),
        )
    }

    #[test]
    fn zero_charge_gives_zero_density() {
        let (g, tg) = grids();
        let f = forcing_density(&ForcingSpec::Wave(wave(0.0)), &g, &tg).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn phase_zero_is_the_maximum() {
        let (g, tg) = grids();
        let f = forcing_density(&ForcingSpec::Wave(wave(1.0)), &g, &tg).unwrap();
        let origin = g.node_id([4, 4]);
        assert_relative_eq!(f.at(origin, 0), 1.0);
        assert_relative_eq!(f.at(origin, 0), f.max());
    }

    #[test]
    fn tabulated_passthrough_and_resampling() {
        let (g, tg) = grids();
        let ones = ScalarField::from_fn(g.clone(), tg.clone(), "table", |_, _| 1.0);
        let f = forcing_density(&ForcingSpec::Tabulated(ones.clone()), &g, &tg).unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));

        let fine = Grid::new_2d([-0.5, -0.5], [1.0, 1.0], [13, 13]).unwrap();
        let f = forcing_density(&ForcingSpec::Tabulated(ones.clone()), &fine, &tg).unwrap();
        assert!(f.values().iter().all(|&v| (v - 1.0).abs() < 1e-14));

        let wide = Grid::new_2d([-2.0, -1.0], [3.0, 2.0], [8, 8]).unwrap();
        assert!(matches!(
            forcing_density(&ForcingSpec::Tabulated(ones), &wide, &tg),
            Err(Error::Extrapolation { .. })
        ));
    }

    #[test]
    fn switch_off_zeroes_the_density() {
        let (g, tg) = grids();
        let mut w = wave(1.0);
        w.switch_off_at = Some(0.2);
        let f = forcing_density(&ForcingSpec::Wave(w), &g, &tg).unwrap();
        assert!(f.slice(1).iter().any(|&v| v != 0.0));
        assert!(f.slice(2).iter().all(|&v| v == 0.0));
    }

    proptest! {
        #[test]
        fn density_is_linear_in_charge(q in -5.0f64..5.0) {
            let (g, tg) = grids();
            let a = forcing_density(&ForcingSpec::Wave(wave(q)), &g, &tg).unwrap();
            let b = forcing_density(&ForcingSpec::Wave(wave(2.0 * q)), &g, &tg).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((2.0 * x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }
    }
}
