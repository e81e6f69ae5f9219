use crate::error::{Error, Result};
use crate::geometry::{sym_eigenvalues, SpaceTimeFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactKind {
    HalfSpace,
    Polynomial,
    Radial2dStationary,
}

/// Closed-form solutions of `Δu − u_t = 1` on `{u > 0}`, all with `f ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    /// `½((x·e)₊)²`; `u'' = 1` across the positive side, `u_t = 0`.
    HalfSpace { dim: usize, e: [f64; 2] },
    /// `m t + xᵀ M x`; `Δu − u_t = 2 Tr M − m = 1`.
    Polynomial {
        dim: usize,
        m: f64,
        mat: [[f64; 2]; 2],
    },
    /// `r²/4 − r₀²/4 − (r₀²/2) ln(r/r₀)` for `r ≥ r₀`, zero inside; the
    /// logarithm is harmonic in 2D and `Δ(r²/4) = 1`.
    Radial2d { center: [f64; 2], r0: f64 },
}

pub fn exact_half_space(dim: usize, e: [f64; 2]) -> Result<ExactSolution> {
    check_dim(dim)?;
    let norm = (0..dim).map(|a| e[a] * e[a]).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 || (dim == 1 && e[1] != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "direction {e:?} is not a unit vector"
        )));
    }
    Ok(ExactSolution::HalfSpace { dim, e })
}

/// Admissible when `2 Tr M − m = 1` (the PDE) and `u ≥ 0` on the backward
/// reference cylinder, i.e. `M` positive semidefinite and `m ≤ 0`.
pub fn exact_polynomial(dim: usize, m: f64, mat: [[f64; 2]; 2]) -> Result<ExactSolution> {
    check_dim(dim)?;
    let mut mat = mat;
    if dim == 1 {
        mat = [[mat[0][0], 0.0], [0.0, 0.0]];
    }
    if (mat[0][1] - mat[1][0]).abs() > 1e-12 {
        return Err(Error::InvalidParameter(
            "quadratic form must be symmetric".into(),
        ));
    }
    let trace = mat[0][0] + mat[1][1];
    if (2.0 * trace - m - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "2 Tr M − m = {} but the equation requires 1",
            2.0 * trace - m
        )));
    }
    let (lo, _) = sym_eigenvalues(mat);
    if lo < -1e-12 {
        return Err(Error::InvalidParameter(format!(
            "M has eigenvalue {lo} < 0, so u takes negative values"
        )));
    }
    if m > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "m = {m} > 0 makes u(0, t) = m t negative for t < 0"
        )));
    }
    Ok(ExactSolution::Polynomial { dim, m, mat })
}

pub fn exact_radial_2d(center: [f64; 2], r0: f64) -> Result<ExactSolution> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "contact radius must be positive, got {r0}"
        )));
    }
    Ok(ExactSolution::Radial2d { center, r0 })
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "dimension must be 1 or 2, got {dim}"
        )))
    }
}

impl ExactSolution {
    pub fn kind(&self) -> ExactKind {
        match self {
            ExactSolution::HalfSpace { .. } => ExactKind::HalfSpace,
            ExactSolution::Polynomial { .. } => ExactKind::Polynomial,
            ExactSolution::Radial2d { .. } => ExactKind::Radial2dStationary,
        }
    }

    pub fn u(&self, x: [f64; 2], t: f64) -> f64 {
        match *self {
            ExactSolution::HalfSpace { dim, e } => {
                let s: f64 = (0..dim).map(|a| x[a] * e[a]).sum();
                0.5 * s.max(0.0).powi(2)
            }
            ExactSolution::Polynomial { dim, m, mat } => m * t + quad_form(dim, &mat, x),
            ExactSolution::Radial2d { center, r0 } => {
                let r = (x[0] - center[0]).hypot(x[1] - center[1]);
                if r <= r0 {
                    0.0
                } else {
                    r * r / 4.0 - r0 * r0 / 4.0 - r0 * r0 / 2.0 * (r / r0).ln()
                }
            }
        }
    }

    pub fn f(&self, _x: [f64; 2], _t: f64) -> f64 {
        1.0
    }

    pub fn grad(&self, x: [f64; 2], _t: f64) -> [f64; 2] {
        match *self {
            ExactSolution::HalfSpace { dim, e } => {
                let s: f64 = (0..dim).map(|a| x[a] * e[a]).sum::<f64>().max(0.0);
                [s * e[0], s * e[1]]
            }
            ExactSolution::Polynomial { dim, mat, .. } => {
                let mut g = [0.0; 2];
                for a in 0..dim {
                    for b in 0..dim {
                        g[a] += 2.0 * mat[a][b] * x[b];
                    }
                }
                g
            }
            ExactSolution::Radial2d { center, r0 } => {
                let d = [x[0] - center[0], x[1] - center[1]];
                let r = d[0].hypot(d[1]);
                if r <= r0 {
                    [0.0, 0.0]
                } else {
                    // u'(r)/r = 1/2 − r₀²/(2r²)
                    let k = 0.5 - r0 * r0 / (2.0 * r * r);
                    [k * d[0], k * d[1]]
                }
            }
        }
    }

    pub fn time_derivative(&self, _x: [f64; 2], _t: f64) -> f64 {
        match *self {
            ExactSolution::Polynomial { m, .. } => m,
            _ => 0.0,
        }
    }

    /// Analytic Laplacian (one-sided on the free boundary).
    pub fn laplacian(&self, x: [f64; 2], t: f64) -> f64 {
        match *self {
            ExactSolution::HalfSpace { .. } | ExactSolution::Radial2d { .. } => {
                if self.u(x, t) > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ExactSolution::Polynomial { dim, mat, .. } => {
                2.0 * (0..dim).map(|a| mat[a][a]).sum::<f64>()
            }
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ExactSolution::HalfSpace { dim, .. } | ExactSolution::Polynomial { dim, .. } => dim,
            ExactSolution::Radial2d { .. } => 2,
        }
    }
}

fn quad_form(dim: usize, mat: &[[f64; 2]; 2], x: [f64; 2]) -> f64 {
    let mut acc = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            acc += x[a] * mat[a][b] * x[b];
        }
    }
    acc
}

impl SpaceTimeFunction for ExactSolution {
    fn dim(&self) -> usize {
        ExactSolution::dim(self)
    }

    fn value(&self, x: [f64; 2], t: f64) -> Option<f64> {
        Some(self.u(x, t))
    }

    fn gradient(&self, x: [f64; 2], t: f64) -> Option<[f64; 2]> {
        Some(self.grad(x, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fd_residual(sol: &ExactSolution, x: [f64; 2], t: f64) -> f64 {
        // central differences on a quadratic are exact up to round-off
        let h = 1e-3;
        let mut lap = 0.0;
        for a in 0..sol.dim() {
            let mut p = x;
            let mut q = x;
            p[a] += h;
            q[a] -= h;
            lap += (sol.u(p, t) - 2.0 * sol.u(x, t) + sol.u(q, t)) / (h * h);
        }
        let ut = (sol.u(x, t + h) - sol.u(x, t - h)) / (2.0 * h);
        lap - ut - sol.f(x, t)
    }

    #[test]
    fn half_space_values() {
        let u = exact_half_space(2, [1.0, 0.0]).unwrap();
        assert_relative_eq!(u.u([0.3, 7.0], 0.0), 0.045, max_relative = 1e-15);
        assert_eq!(u.u([-0.3, 7.0], 0.0), 0.0);
        assert!(exact_half_space(2, [1.0, 1.0]).is_err());
        assert!(exact_half_space(1, [-1.0, 0.0]).is_ok());
    }

    #[test]
    fn polynomial_admissibility() {
        assert!(exact_polynomial(1, 0.0, [[0.5, 0.0], [0.0, 0.0]]).is_ok());
        assert!(exact_polynomial(1, -1.0, [[0.0, 0.0], [0.0, 0.0]]).is_ok());
        assert!(exact_polynomial(2, 0.0, [[0.5, 0.0], [0.0, 0.0]]).is_ok());
        // PDE violated
        assert!(exact_polynomial(1, 0.0, [[1.0, 0.0], [0.0, 0.0]]).is_err());
        // negative eigenvalue
        assert!(exact_polynomial(2, 0.0, [[1.0, 0.0], [0.0, -0.5]]).is_err());
        // satisfies the PDE but is negative on t < 0
        assert!(exact_polynomial(1, 1.0, [[1.0, 0.0], [0.0, 0.0]]).is_err());
    }

    #[test]
    fn residual_identity_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sols = [
            exact_half_space(2, [0.6, 0.8]).unwrap(),
            exact_half_space(1, [1.0, 0.0]).unwrap(),
            exact_polynomial(1, 0.0, [[0.5, 0.0], [0.0, 0.0]]).unwrap(),
            exact_polynomial(2, -0.5, [[0.1, 0.05], [0.05, 0.15]]).unwrap(),
            exact_radial_2d([0.1, -0.2], 0.5).unwrap(),
        ];
        for sol in &sols {
            let mut checked = 0;
            while checked < 100 {
                let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let t = rng.gen_range(-1.0..0.0);
                // stay a stencil away from the free boundary
                let pos = sol.u(x, t) > 1e-2
                    && (0..sol.dim()).all(|a| {
                        let mut p = x;
                        let mut q = x;
                        p[a] += 2e-3;
                        q[a] -= 2e-3;
                        sol.u(p, t) > 0.0 && sol.u(q, t) > 0.0
                    });
                if !pos {
                    continue;
                }
                let scale = 1.0 + sol.u(x, t).abs();
                assert!(
                    (sol.laplacian(x, t) - sol.time_derivative(x, t) - sol.f(x, t)).abs()
                        <= 1e-12 * scale,
                    "{sol:?}"
                );
                assert!(
                    fd_residual(sol, x, t).abs() <= 1e-5 * scale,
                    "{sol:?} at {x:?}"
                );
                checked += 1;
            }
        }
    }

    #[test]
    fn radial_profile_is_c1_at_contact() {
        let s = exact_radial_2d([0.0, 0.0], 0.5).unwrap();
        assert_eq!(s.u([0.5, 0.0], 0.0), 0.0);
        let g = s.grad([0.5 + 1e-9, 0.0], 0.0);
        assert!(g[0].abs() < 1e-8);
        assert!(s.u([1.0, 0.0], 0.0) > 0.0);
    }
}
