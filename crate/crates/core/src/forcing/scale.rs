/// Standard gravity used in the order-of-magnitude comparison (m/s²).
pub const GRAVITY: f64 = 9.8;

/// Inputs of the force-scale estimate around the dimple top.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeScaleParams {
    /// Surplus charges per nm² of membrane.
    pub charges_per_area: f64,
    /// Area of the dimple top (nm²).
    pub dimple_area: f64,
    /// Energy of one charged phospholipid molecule (J).
    pub energy_per_molecule: f64,
    /// Length over which that energy acts (m).
    pub characteristic_length: f64,
    /// Mass of the dimple (kg).
    pub dimple_mass: f64,
    pub g: f64,
}

impl Default for ChargeScaleParams {
    /// 10¹⁰ charges per 1000 nm², a 100 nm² dimple top, 10⁻¹⁹ J per
    /// molecule over 10 nm and a 10⁻²¹ kg dimple.
    fn default() -> Self {
        ChargeScaleParams {
            charges_per_area: 1e10 / 1000.0,
            dimple_area: 100.0,
            energy_per_molecule: 1e-19,
            characteristic_length: 10e-9,
            dimple_mass: 1e-21,
            g: GRAVITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleReport {
    pub carriers: f64,
    pub per_molecule_force: f64,
    pub total_force: f64,
    pub gravity_force: f64,
}

pub fn scale_report(p: &ChargeScaleParams) -> ScaleReport {
    let carriers = p.charges_per_area * p.dimple_area;
    let per_molecule_force = p.energy_per_molecule / p.characteristic_length;
    ScaleReport {
        carriers,
        per_molecule_force,
        total_force: carriers * per_molecule_force,
        gravity_force: p.dimple_mass * p.g,
    }
}
