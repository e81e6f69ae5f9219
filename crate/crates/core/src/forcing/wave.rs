use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Electromagnetic data of a plane field wave traveling through the cell
/// plus the charge and friction data of the particles it acts on (SI).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveForcingParams {
    /// Amplitude of the oscillating flux density (T).
    pub b_hat: Vector3<f64>,
    /// Wave vector (1/m). Its direction is the propagation direction.
    pub k_vec: Vector3<f64>,
    /// Propagation speed (m/s).
    pub v: f64,
    /// Background flux density (T).
    pub b_dc: Vector3<f64>,
    /// Background electric field (V/m).
    pub e0: Vector3<f64>,
    /// Charge of the carriers acted upon (C); negative for lipid heads.
    pub q: f64,
    /// Friction coefficient (kg/s).
    pub gamma: f64,
    /// Oscillation frequency (Hz).
    pub f_osc: f64,
}

impl Default for WaveForcingParams {
    fn default() -> Self {
        WaveForcingParams {
            b_hat: Vector3::new(0.0, 0.035, 0.0),
            k_vec: Vector3::new(1.0, 0.0, 0.0),
            v: 1.0,
            b_dc: Vector3::zeros(),
            e0: Vector3::zeros(),
            q: 1.0,
            gamma: 0.0,
            f_osc: 0.1,
        }
    }
}

impl WaveForcingParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.v, self.q, self.gamma, self.f_osc]
            .iter()
            .all(|x| x.is_finite())
            && [self.b_hat, self.k_vec, self.b_dc, self.e0]
                .iter()
                .all(|v| v.iter().all(|c| c.is_finite()));
        if !finite {
            return Err(Error::InvalidParameter(
                "wave parameters must be finite".into(),
            ));
        }
        if !(self.k_vec.norm() > 0.0) {
            return Err(Error::InvalidParameter(
                "wave vector must be non-zero".into(),
            ));
        }
        if self.v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "wave speed must be non-negative, got {}",
                self.v
            )));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter(
                "friction coefficient must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_osc
    }

    pub fn wavenumber(&self) -> f64 {
        self.k_vec.norm()
    }

    /// Velocity of the wave front: speed `v` along `k_vec`.
    pub fn velocity(&self) -> Vector3<f64> {
        self.k_vec * (self.v / self.k_vec.norm())
    }

    pub fn phase(&self, x: &Vector3<f64>, t: f64) -> f64 {
        self.k_vec.dot(x) - self.wavenumber() * self.v * t
    }
}

/// `B(x, t) = B̂ cos(k·x − |k| v t) + B_DC`.
pub fn b_field(x: &Vector3<f64>, t: f64, p: &WaveForcingParams) -> Vector3<f64> {
    p.b_hat * p.phase(x, t).cos() + p.b_dc
}

/// Induced field `E = v × B`.
pub fn e_field(x: &Vector3<f64>, t: f64, p: &WaveForcingParams) -> Vector3<f64> {
    p.velocity().cross(&b_field(x, t, p))
}

/// `F_L = q E₀ + q (v × B) − γ v`.
pub fn lorentz_force(p: &WaveForcingParams, x: &Vector3<f64>, t: f64) -> Vector3<f64> {
    let v = p.velocity();
    p.e0 * p.q + v.cross(&b_field(x, t, p)) * p.q - v * p.gamma
}

/// Capacitive reactance `X_C = 1/(ωC)` of a membrane region.
pub fn capacitive_reactance(omega: f64, capacitance: f64) -> Result<f64> {
    if !(omega > 0.0) || !(capacitance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "reactance needs omega > 0 and C > 0, got omega={omega}, C={capacitance}"
        )));
    }
    Ok(1.0 / (omega * capacitance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params() -> WaveForcingParams {
        WaveForcingParams {
            b_hat: Vector3::new(0.0, 0.02, 0.01),
            k_vec: Vector3::new(2.0, 1.0, 0.0),
            v: 3.0,
            b_dc: Vector3::new(0.001, 0.0, 0.004),
            e0: Vector3::zeros(),
            q: -2.0,
            gamma: 0.5,
            f_osc: 0.1,
        }
    }

    #[test]
    fn b_field_at_zero_and_quarter_phase() {
        let p = params();
        assert_eq!(b_field(&Vector3::zeros(), 0.0, &p), p.b_hat + p.b_dc);
        // k·x = π/2 at t = 0 for x along k.
        let x = p.k_vec * (PI / 2.0 / p.k_vec.norm_squared());
        let b = b_field(&x, 0.0, &p);
        assert_abs_diff_eq!((b - p.b_dc).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn generator_field_magnitude() {
        let p = WaveForcingParams::default();
        assert_relative_eq!(b_field(&Vector3::zeros(), 0.0, &p).norm(), 0.035);
    }

    #[test]
    fn e_field_cases() {
        let mut p = params();
        p.v = 0.0;
        assert_eq!(
            e_field(&Vector3::new(0.3, 0.1, 0.0), 1.0, &p),
            Vector3::zeros()
        );

        let mut p = params();
        p.b_hat = p.k_vec * 0.01;
        p.b_dc = Vector3::zeros();
        assert_abs_diff_eq!(
            e_field(&Vector3::zeros(), 0.0, &p).norm(),
            0.0,
            epsilon = 1e-18
        );

        let p = WaveForcingParams {
            b_hat: Vector3::new(0.0, 0.0, 0.5),
            k_vec: Vector3::new(1.0, 0.0, 0.0),
            v: 4.0,
            b_dc: Vector3::zeros(),
            ..WaveForcingParams::default()
        };
        assert_eq!(
            e_field(&Vector3::zeros(), 0.0, &p),
            Vector3::new(0.0, -2.0, 0.0)
        );
    }

    #[test]
    fn lorentz_limits() {
        let mut p = params();
        p.q = 0.0;
        p.gamma = 0.0;
        assert_eq!(
            lorentz_force(&p, &Vector3::new(1.0, 2.0, 0.0), 0.7),
            Vector3::zeros()
        );
        p.gamma = 0.5;
        assert_eq!(
            lorentz_force(&p, &Vector3::new(1.0, 2.0, 0.0), 0.7),
            -p.velocity() * 0.5
        );
    }

    #[test]
    fn per_molecule_force_scale() {
        // v ⟂ B with |q v B| = 1e-11 N
        let p = WaveForcingParams {
            b_hat: Vector3::new(0.0, 0.035, 0.0),
            k_vec: Vector3::new(1.0, 0.0, 0.0),
            v: 1e-11 / (1.6e-19 * 0.035),
            b_dc: Vector3::zeros(),
            e0: Vector3::zeros(),
            q: 1.6e-19,
            gamma: 0.0,
            f_osc: 0.1,
        };
        assert_relative_eq!(
            lorentz_force(&p, &Vector3::zeros(), 0.0).norm(),
            1e-11,
            max_relative = 1e-12
        );
    }

    #[test]
    fn reactance() {
        assert_relative_eq!(
            capacitive_reactance(2.0 * PI * 0.1, 1.0).unwrap(),
            1.0 / (2.0 * PI * 0.1)
        );
        assert_relative_eq!(
            capacitive_reactance(2.0 * PI * 0.1, 1.0).unwrap(),
            1.5915494309189535
        );
        assert_eq!(capacitive_reactance(1.0, 1.0).unwrap(), 1.0);
        let mut last = f64::INFINITY;
        for c in [1.0, 10.0, 1e3, 1e6] {
            let x = capacitive_reactance(1.0, c).unwrap();
            assert!(x < last);
            last = x;
        }
        assert!(last < 1e-5);
        assert!(capacitive_reactance(0.0, 1.0).is_err());
        assert!(capacitive_reactance(1.0, -1.0).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = params();
        p.k_vec = Vector3::zeros();
        assert!(p.validate().is_err());
        let mut p = params();
        p.v = -1.0;
        assert!(p.validate().is_err());
        assert!(params().validate().is_ok());
    }

    proptest! {
        #[test]
        fn b_field_is_periodic_along_the_wave(x in -5.0f64..5.0, y in -5.0f64..5.0, t in 0.0f64..3.0) {
            let p = params();
            let pos = Vector3::new(x, y, 0.0);
            let shift = p.k_vec / p.k_vec.norm() * (2.0 * PI / p.k_vec.norm());
            let a = b_field(&pos, t, &p);
            let b = b_field(&(pos + shift), t, &p);
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }

        #[test]
        fn e_field_orthogonal_to_v_and_b(x in -5.0f64..5.0, t in 0.0f64..3.0) {
            let p = params();
            let pos = Vector3::new(x, 0.3, -0.2);
            let e = e_field(&pos, t, &p);
            let b = b_field(&pos, t, &p);
            let scale = e.norm().max(1e-30) * (p.velocity().norm() + b.norm());
            prop_assert!(e.dot(&p.velocity()).abs() <= 1e-12 * scale);
            prop_assert!(e.dot(&b).abs() <= 1e-12 * scale);
        }
    }
}
