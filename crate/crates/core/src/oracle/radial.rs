use crate::error::{Error, Result};

/// Radially symmetric stationary obstacle solution sampled at
/// `r_i = i·h`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub h: f64,
    pub u: Vec<f64>,
}

impl RadialProfile {
    /// Linear interpolation in `r`; `None` beyond the outer radius.
    pub fn value(&self, r: f64) -> Option<f64> {
        let n = self.u.len() - 1;
        let s = r / self.h;
        if !(s >= 0.0) || s > n as f64 + 1e-9 {
            return None;
        }
        let i = (s.floor() as usize).min(n - 1);
        let w = s - i as f64;
        Some((1.0 - w) * self.u[i] + w * self.u[i + 1])
    }

    /// Radius of the contact set `{u = 0}`; uses `u ≈ ½(r − r₀)²` from the
    /// first positive node, clamped to the bracketing cell.
    pub fn contact_radius(&self) -> f64 {
        let Some(first) = self.u.iter().position(|&v| v > 0.0) else {
            return self.h * (self.u.len() - 1) as f64;
        };
        if first == 0 {
            return 0.0;
        }
        let r_pos = first as f64 * self.h;
        (r_pos - (2.0 * self.u[first]).sqrt()).clamp(r_pos - self.h, r_pos)
    }
}

/// Solves `u'' + u'/r = 1` on `{u > 0}`, `u ≥ 0`, on the disc of radius
/// `outer_radius` with `u = boundary_value` on its rim.
///
/// Finite volumes on `n` radial cells give a symmetric tridiagonal
/// M-matrix whose contact set is a centred disc, so the Brennan–Schwartz
/// sweep (elimination from the rim, projected substitution from the
/// centre) solves the complementarity problem exactly.
pub fn radial_stationary_profile(
    outer_radius: f64,
    boundary_value: f64,
    n: usize,
) -> Result<RadialProfile> {
    if !(outer_radius > 0.0) || !(boundary_value >= 0.0) || n < 2 {
        return Err(Error::InvalidParameter(
            "radial oracle needs a positive radius, non-negative rim value and at least 2 cells"
                .into(),
        ));
    }
    let h = outer_radius / n as f64;
    // rows i = 0..n−1; unknown u_n is the rim value
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    // centre cell: disc of radius h/2, scaled by h/(2π)
    diag[0] = h / 2.0;
    upper[0] = -h / 2.0;
    rhs[0] = -h * h * h / 8.0;
    for i in 1..n {
        let (rm, rp) = ((i as f64 - 0.5) * h, (i as f64 + 0.5) * h);
        lower[i] = -rm;
        diag[i] = rm + rp;
        upper[i] = -rp;
        rhs[i] = -(i as f64) * h * h * h;
    }
    rhs[n - 1] -= upper[n - 1] * boundary_value;
    upper[n - 1] = 0.0;

    for i in (0..n - 1).rev() {
        let m = upper[i] / diag[i + 1];
        diag[i] -= m * lower[i + 1];
        rhs[i] -= m * rhs[i + 1];
    }
    let mut u = vec![0.0; n + 1];
    u[0] = (rhs[0] / diag[0]).max(0.0);
    for i in 1..n {
        u[i] = ((rhs[i] - lower[i] * u[i - 1]) / diag[i]).max(0.0);
    }
    u[n] = boundary_value;
    Ok(RadialProfile { h, u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_radial_2d;

    #[test]
    fn recovers_closed_form() {
        let exact = exact_radial_2d([0.0, 0.0], 0.5).unwrap();
        let g = exact.u([1.0, 0.0], 0.0);
        let p = radial_stationary_profile(1.0, g, 2000).unwrap();
        assert!((p.contact_radius() - 0.5).abs() < p.h);
        for k in 0..=100 {
            let r = k as f64 / 100.0;
            assert!(
                (p.value(r).unwrap() - exact.u([r, 0.0], 0.0)).abs() < 1e-5,
                "r = {r}"
            );
        }
    }

    #[test]
    fn zero_rim_gives_zero() {
        let p = radial_stationary_profile(1.0, 0.0, 50).unwrap();
        assert!(p.u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn complementarity_holds() {
        let p = radial_stationary_profile(2.0, 0.7, 400).unwrap();
        let h = p.h;
        for i in 1..p.u.len() - 1 {
            let r = i as f64 * h;
            let lap = (p.u[i + 1] - 2.0 * p.u[i] + p.u[i - 1]) / (h * h)
                + (p.u[i + 1] - p.u[i - 1]) / (2.0 * h * r);
            let w = 1.0 - lap;
            assert!(p.u[i] >= 0.0);
            assert!(w > -1e-6, "i = {i}, w = {w}");
            assert!(p.u[i].min(w.abs()) < 1e-6);
        }
    }
}
