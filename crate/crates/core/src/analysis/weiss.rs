use std::f64::consts::PI;

use super::free_boundary::PointLabel;
use crate::error::{Error, Result};
use crate::geometry::{ConstantFunction, SpaceTimeFunction, SpaceTimePoint};
use crate::oracle::exact_half_space;

/// Panel counts for the Weiss integral in the scaled variables
/// `x = x* + τ y`, `t = t* − τ² s`, `|y| < 1`, `1 < s < 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeissQuadrature {
    /// Simpson panels in `|y|` (per side in 1D).
    pub n_radial: usize,
    /// Trapezoid nodes in angle (2D), rounded up to a multiple of 4 so the
    /// coordinate axes are sampled.
    pub n_angular: usize,
    /// Simpson panels in `s`.
    pub n_time: usize,
}

impl Default for WeissQuadrature {
    fn default() -> Self {
        WeissQuadrature {
            n_radial: 64,
            n_angular: 64,
            n_time: 64,
        }
    }
}

impl WeissQuadrature {
    pub fn doubled(&self) -> Self {
        WeissQuadrature {
            n_radial: 2 * self.n_radial,
            n_angular: 2 * self.n_angular,
            n_time: 2 * self.n_time,
        }
    }
}

fn simpson(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(2) + n % 2;
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| {
            let w = match i {
                0 => 1.0,
                _ if i == n => 1.0,
                _ if i % 2 == 1 => 4.0,
                _ => 2.0,
            };
            (a + i as f64 * h, w * h / 3.0)
        })
        .collect()
}

/// Gauss–Weierstrass kernel `(4πs)^{−n/2} exp(−|y|²/(4s))`.
pub fn heat_kernel(y2: f64, s: f64, dim: usize) -> f64 {
    (4.0 * PI * s).powf(-(dim as f64) / 2.0) * (-y2 / (4.0 * s)).exp()
}

/// `W(τ) = τ⁻⁴ ∫_{t*−4τ²}^{t*−τ²} ∫_{|x−x*|<τ} (|∇u|² + 2fu + u²/(t−t*))
/// G(x−x*, t*−t) dx dt`.
///
/// The integral is taken in the scaled variables, where it reads
/// `τ⁻² ∫₁⁴ ∫_{|y|<1} (|∇u|² + 2fu − u²/(τ²s)) G(y, s) dy ds`, with
/// composite Simpson in `s` and `|y|` and the trapezoid rule in angle.
/// Sampled fields are evaluated by interpolation.
pub fn weiss_energy(
    u: &dyn SpaceTimeFunction,
    f: &dyn SpaceTimeFunction,
    z: &SpaceTimePoint,
    tau: f64,
    quad: &WeissQuadrature,
) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "τ must be positive, got {tau}"
        )));
    }
    let dim = u.dim();
    let outside = || Error::CylinderOutsideDomain {
        x: z.coords(dim),
        t: z.t,
        radius: tau,
    };
    let integrand = |y: [f64; 2], s: f64| -> Result<f64> {
        let x = [z.x[0] + tau * y[0], z.x[1] + tau * y[1]];
        let t = z.t - tau * tau * s;
        let v = u.value(x, t).ok_or_else(outside)?;
        let g = u.gradient(x, t).ok_or_else(outside)?;
        let fv = f.value(x, t).ok_or_else(outside)?;
        let grad2: f64 = (0..dim).map(|a| g[a] * g[a]).sum();
        let y2: f64 = (0..dim).map(|a| y[a] * y[a]).sum();
        Ok((grad2 + 2.0 * fv * v - v * v / (tau * tau * s)) * heat_kernel(y2, s, dim))
    };

    let mut total = 0.0;
    let s_rule = simpson(1.0, 4.0, quad.n_time);
    if dim == 1 {
        let y_rule = simpson(-1.0, 1.0, 2 * quad.n_radial);
        for &(s, ws) in &s_rule {
            for &(y, wy) in &y_rule {
                total += ws * wy * integrand([y, 0.0], s)?;
            }
        }
    } else {
        let r_rule = simpson(0.0, 1.0, quad.n_radial);
        let n_theta = quad.n_angular.max(4).div_ceil(4) * 4;
        let w_theta = 2.0 * PI / n_theta as f64;
        let dirs: Vec<[f64; 2]> = (0..n_theta)
            .map(|k| {
                let th = k as f64 * w_theta;
                [th.cos(), th.sin()]
            })
            .collect();
        for &(s, ws) in &s_rule {
            for &(r, wr) in &r_rule {
                if r == 0.0 {
                    continue;
                }
                for d in &dirs {
                    total += ws * wr * r * w_theta * integrand([r * d[0], r * d[1]], s)?;
                }
            }
        }
    }
    Ok(total / (tau * tau))
}

/// `τ → 0` limit from the last three values of a geometric `τ` sequence by
/// Aitken's Δ² process. Returns the limit and a residual: the size of the
/// extrapolation step, or the last increment when Aitken is not applicable.
pub fn extrapolate_limit(values: &[f64]) -> (f64, f64) {
    match values {
        [] => (f64::NAN, f64::NAN),
        [w] => (*w, f64::INFINITY),
        [w1, w2] => (*w2, (w2 - w1).abs()),
        [.., w0, w1, w2] => {
            let last_step = (w2 - w1).abs();
            let denom = w2 - 2.0 * w1 + w0;
            let scale = w0.abs() + w1.abs() + w2.abs();
            if denom.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return (*w2, last_step);
            }
            let lim = w2 - (w2 - w1).powi(2) / denom;
            // an accelerating sequence gives a wild correction; keep the data
            if !lim.is_finite() || (lim - w2).abs() > 10.0 * last_step {
                (*w2, last_step)
            } else {
                (lim, (lim - w2).abs())
            }
        }
    }
}

/// Result of a Weiss sweep at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeissValue {
    pub z: SpaceTimePoint,
    pub tau_values: Vec<f64>,
    pub w_values: Vec<f64>,
    pub extrapolated_limit: f64,
    pub extrapolation_residual: f64,
    pub a_n: f64,
    /// `limit / (f(z*)² A_n)`.
    pub ratio: f64,
    pub label: PointLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifySettings {
    /// Strictly decreasing, ideally geometric.
    pub taus: Vec<f64>,
    pub quadrature: WeissQuadrature,
    /// Half-width of the acceptance bands around ratios 1 and 2.
    pub theta: f64,
    /// Extrapolation residual, relative to `f(z*)² A_n`, beyond which the
    /// sweep is reported as not converged.
    pub max_relative_residual: f64,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        ClassifySettings {
            taus: vec![0.2, 0.1, 0.05],
            quadrature: WeissQuadrature::default(),
            theta: 0.25,
            max_relative_residual: 0.5,
        }
    }
}

pub fn label_for_ratio(ratio: f64, theta: f64) -> PointLabel {
    if (ratio - 1.0).abs() < theta {
        PointLabel::Regular
    } else if (ratio - 2.0).abs() < theta {
        PointLabel::Singular
    } else {
        PointLabel::Unresolved
    }
}

/// `A_n`: the Weiss limit of the half-space profile `½(x₁)₊²` with
/// `f ≡ 1`, extrapolated over `τ ∈ {1, ½, ¼}`.
pub fn compute_a_n(dim: usize, quad: &WeissQuadrature) -> Result<f64> {
    compute_a_n_along(dim, [1.0, 0.0], quad)
}

/// [`compute_a_n`] for a half-space with normal `e`.
pub fn compute_a_n_along(dim: usize, e: [f64; 2], quad: &WeissQuadrature) -> Result<f64> {
    let profile = exact_half_space(dim, e)?;
    let one = ConstantFunction { dim, value: 1.0 };
    let z = SpaceTimePoint {
        x: [0.0, 0.0],
        t: 0.0,
    };
    let values = [1.0, 0.5, 0.25]
        .iter()
        .map(|&tau| weiss_energy(&profile, &one, &z, tau, quad))
        .collect::<Result<Vec<f64>>>()?;
    let (limit, residual) = extrapolate_limit(&values);
    if !(limit > 0.0) || !(residual <= 1e-6 * limit) {
        return Err(Error::WeissNotConverged { values });
    }
    Ok(limit)
}

/// Sweeps `τ`, extrapolates `lim W`, and labels the point by comparing the
/// limit with `f(z*)² A_n`: regular near 1, singular near 2.
pub fn classify_point(
    u: &dyn SpaceTimeFunction,
    f: &dyn SpaceTimeFunction,
    z: &SpaceTimePoint,
    a_n: f64,
    settings: &ClassifySettings,
) -> Result<WeissValue> {
    if !(a_n > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "A_n must be positive, got {a_n}"
        )));
    }
    if settings.taus.is_empty() || settings.taus.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(
            "τ values must be strictly decreasing".into(),
        ));
    }
    let fz = f.value(z.x, z.t).ok_or(Error::CylinderOutsideDomain {
        x: z.coords(u.dim()),
        t: z.t,
        radius: 0.0,
    })?;
    let w_values = settings
        .taus
        .iter()
        .map(|&tau| weiss_energy(u, f, z, tau, &settings.quadrature))
        .collect::<Result<Vec<f64>>>()?;
    if w_values.iter().any(|w| !w.is_finite()) {
        return Err(Error::WeissNotConverged { values: w_values });
    }
    let (limit, residual) = extrapolate_limit(&w_values);
    let reference = fz * fz * a_n;
    if residual > settings.max_relative_residual * reference.max(f64::MIN_POSITIVE) {
        return Err(Error::WeissNotConverged { values: w_values });
    }
    let ratio = limit / reference;
    Ok(WeissValue {
        z: *z,
        tau_values: settings.taus.clone(),
        w_values,
        extrapolated_limit: limit,
        extrapolation_residual: residual,
        a_n,
        ratio,
        label: label_for_ratio(ratio, settings.theta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_polynomial, reference_quadrature, QuadRegion};

    #[test]
    fn zero_field_has_zero_energy() {
        let zero = ConstantFunction { dim: 2, value: 0.0 };
        let one = ConstantFunction { dim: 2, value: 1.0 };
        let z = SpaceTimePoint::new_2d(0.0, 0.0, 0.0);
        assert_eq!(
            weiss_energy(&zero, &one, &z, 0.3, &WeissQuadrature::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn half_space_energy_is_scale_invariant() {
        let q = WeissQuadrature::default();
        let hs = exact_half_space(1, [1.0, 0.0]).unwrap();
        let one = ConstantFunction { dim: 1, value: 1.0 };
        let z = SpaceTimePoint::new_1d(0.0, 0.0);
        let w: Vec<f64> = [1.0, 0.3, 0.01]
            .iter()
            .map(|&tau| weiss_energy(&hs, &one, &z, tau, &q).unwrap())
            .collect();
        assert!(w[0] > 0.0);
        assert!((w[1] - w[0]).abs() < 1e-12 * w[0] && (w[2] - w[0]).abs() < 1e-10 * w[0]);
    }

    #[test]
    fn a_1_matches_reference_quadrature() {
        // direct integral in the original variables at τ = 1, z* = 0
        let direct = reference_quadrature(
            |x, t| {
                let s = -t;
                let xp = x[0].max(0.0);
                (xp * xp + xp * xp - 0.25 * xp.powi(4) / s) * heat_kernel(x[0] * x[0], s, 1)
            },
            &QuadRegion::Cylinder {
                dim: 1,
                center: [0.0, 0.0],
                radius: 1.0,
                t0: -4.0,
                t1: -1.0,
            },
            400,
        );
        let a1 = compute_a_n(1, &WeissQuadrature::default()).unwrap();
        assert!((a1 - direct).abs() < 1e-8 * direct, "{a1} vs {direct}");
    }

    #[test]
    fn rotation_invariance_in_2d() {
        let q = WeissQuadrature::default();
        let a = compute_a_n_along(2, [1.0, 0.0], &q).unwrap();
        let b = compute_a_n_along(2, [0.0, 1.0], &q).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn dichotomy_on_exact_profiles() {
        let settings = ClassifySettings::default();
        for dim in [1usize, 2] {
            let a_n = compute_a_n(dim, &settings.quadrature).unwrap();
            let one = ConstantFunction { dim, value: 1.0 };
            let z = SpaceTimePoint {
                x: [0.0, 0.0],
                t: 0.0,
            };
            let hs = exact_half_space(dim, [1.0, 0.0]).unwrap();
            let r = classify_point(&hs, &one, &z, a_n, &settings).unwrap();
            assert_eq!(r.label, PointLabel::Regular);
            assert!((r.ratio - 1.0).abs() < 1e-9);
            let sq = exact_polynomial(dim, 0.0, [[0.5, 0.0], [0.0, 0.0]]).unwrap();
            let r = classify_point(&sq, &one, &z, a_n, &settings).unwrap();
            assert_eq!(r.label, PointLabel::Singular);
            assert!((r.ratio - 2.0).abs() < 1e-9, "{}", r.ratio);
        }
    }

    #[test]
    fn labels_and_extrapolation() {
        assert_eq!(label_for_ratio(1.5, 0.25), PointLabel::Unresolved);
        assert_eq!(label_for_ratio(1.2, 0.25), PointLabel::Regular);
        // W = 3 + τ over τ = 1, ½, ¼ extrapolates to 3
        let (l, _) = extrapolate_limit(&[4.0, 3.5, 3.25]);
        assert!((l - 3.0).abs() < 1e-12);
    }
}
