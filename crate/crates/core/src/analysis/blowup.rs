use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Grid, ScalarField, SpaceTimeFunction, SpaceTimePoint, TimeGrid};
use crate::oracle::ExactSolution;

/// Sampling of the reference cylinder `{|x| ≤ 1} × [−1, 0]`: the box
/// `[−1, 1]ⁿ × [−1, 0]` with `n_space` cells per axis and `n_time` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceCylinder {
    pub n_space: usize,
    pub n_time: usize,
}

impl Default for ReferenceCylinder {
    fn default() -> Self {
        ReferenceCylinder {
            n_space: 16,
            n_time: 16,
        }
    }
}

impl ReferenceCylinder {
    pub fn grids(&self, dim: usize) -> Result<(Grid, TimeGrid)> {
        let g = match dim {
            1 => Grid::new_1d(-1.0, 2.0, self.n_space)?,
            _ => Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [self.n_space, self.n_space])?,
        };
        Ok((
            g,
            TimeGrid::new(-1.0, 1.0 / self.n_time as f64, self.n_time)?,
        ))
    }
}

/// Largest `λ` for which the window of `rescale_blowup` stays inside the
/// trajectory.
pub fn max_blowup_lambda(u: &ScalarField, z: &SpaceTimePoint, f_at_z: f64) -> f64 {
    let g = u.grid();
    let sf = f_at_z.abs().sqrt();
    let mut lam = ((z.t - u.time_grid().t0()) * f_at_z.abs()).max(0.0).sqrt();
    for a in 0..g.dim() {
        let lo = z.x[a] - g.origin(a);
        let hi = g.origin(a) + g.extent(a) - z.x[a];
        lam = lam.min(lo.min(hi).max(0.0) * sf);
    }
    lam
}

/// `u_λ(x, t) = u(x* + x λ/√f, t* + t λ²/f) / λ²` on the reference
/// cylinder, by interpolation of `u`.
pub fn rescale_blowup(
    u: &dyn SpaceTimeFunction,
    z: &SpaceTimePoint,
    lambda: f64,
    f_at_z: f64,
    window: &ReferenceCylinder,
) -> Result<ScalarField> {
    if !(f_at_z > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "blow-up needs f(z*) > 0, got {f_at_z}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "λ must be positive, got {lambda}"
        )));
    }
    let (g, tg) = window.grids(u.dim())?;
    let sx = lambda / f_at_z.sqrt();
    let st = lambda * lambda / f_at_z;
    let mut values = Vec::with_capacity(g.node_count() * tg.n_times());
    for j in 0..tg.n_times() {
        let t = z.t + tg.time(j) * st;
        for n in 0..g.node_count() {
            let p = g.node_position(n);
            let x = [z.x[0] + p[0] * sx, z.x[1] + p[1] * sx];
            let v = u.value(x, t).ok_or(Error::BlowupWindow {
                max_lambda: f64::NAN,
            })?;
            values.push(v / (lambda * lambda));
        }
    }
    ScalarField::from_values(g, tg, values, "u_lambda")
}

/// [`rescale_blowup`] on a sampled trajectory; names the largest usable `λ`
/// when the window does not fit.
pub fn rescale_field_blowup(
    u: &ScalarField,
    z: &SpaceTimePoint,
    lambda: f64,
    f_at_z: f64,
    window: &ReferenceCylinder,
) -> Result<ScalarField> {
    let max_lambda = max_blowup_lambda(u, z, f_at_z);
    if lambda > max_lambda * (1.0 + 1e-12) {
        return Err(Error::BlowupWindow { max_lambda });
    }
    rescale_blowup(u, z, lambda, f_at_z, window).map_err(|e| match e {
        Error::BlowupWindow { .. } => Error::BlowupWindow { max_lambda },
        other => other,
    })
}

/// Sup distance between consecutive rescalings along `lambdas`.
pub fn blowup_cauchy_gaps(
    u: &ScalarField,
    z: &SpaceTimePoint,
    f_at_z: f64,
    lambdas: &[f64],
    window: &ReferenceCylinder,
) -> Result<Vec<f64>> {
    let fields = lambdas
        .iter()
        .map(|&l| rescale_field_blowup(u, z, l, f_at_z, window))
        .collect::<Result<Vec<_>>>()?;
    Ok(fields
        .windows(2)
        .map(|w| {
            w[0].values()
                .iter()
                .zip(w[1].values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupKind {
    HalfSpace,
    Polynomial,
    Unresolved,
}

impl BlowupKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlowupKind::HalfSpace => "half_space",
            BlowupKind::Polynomial => "polynomial",
            BlowupKind::Unresolved => "unresolved",
        }
    }
}

/// Best fits of a rescaled field against the two families of blow-up
/// limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupFit {
    pub kind: BlowupKind,
    /// Unit normal of the best half-space profile `½((x·e)₊)²`.
    pub e: [f64; 2],
    /// Best `m t + xᵀ M x` with `2 Tr M − m = 1`.
    pub m: f64,
    pub mat: [[f64; 2]; 2],
    /// Relative L² misfit of the selected family (of the smaller one when
    /// unresolved).
    pub fit_residual: f64,
    pub half_space_residual: f64,
    pub polynomial_residual: f64,
    /// `Tr M − (m + 1)`, the trace condition without the ½ on the form.
    pub alt_trace_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSettings {
    /// Misfit above which neither family is accepted.
    pub threshold: f64,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings { threshold: 0.1 }
    }
}

struct Samples {
    dim: usize,
    pts: Vec<([f64; 2], f64, f64)>,
    norm: f64,
}

fn samples(u: &ScalarField) -> Samples {
    let g = u.grid();
    let dim = g.dim();
    let mut pts = Vec::new();
    for j in 0..u.time_grid().n_times() {
        let t = u.time_grid().time(j);
        for n in 0..g.node_count() {
            let x = g.node_position(n);
            if (0..dim).map(|a| x[a] * x[a]).sum::<f64>() <= 1.0 + 1e-12 {
                pts.push((x, t, u.at(n, j)));
            }
        }
    }
    let norm = pts.iter().map(|p| p.2 * p.2).sum::<f64>().sqrt();
    Samples { dim, pts, norm }
}

fn relative_misfit(s: &Samples, model: impl Fn([f64; 2], f64) -> f64) -> f64 {
    let err = s
        .pts
        .iter()
        .map(|p| (p.2 - model(p.0, p.1)).powi(2))
        .sum::<f64>()
        .sqrt();
    err / s.norm.max(f64::MIN_POSITIVE)
}

fn half_space_misfit(s: &Samples, e: [f64; 2]) -> f64 {
    relative_misfit(s, |x, _| 0.5 * (x[0] * e[0] + x[1] * e[1]).max(0.0).powi(2))
}

fn fit_half_space(s: &Samples) -> ([f64; 2], f64) {
    if s.dim == 1 {
        let a = half_space_misfit(s, [1.0, 0.0]);
        let b = half_space_misfit(s, [-1.0, 0.0]);
        return if a <= b {
            ([1.0, 0.0], a)
        } else {
            ([-1.0, 0.0], b)
        };
    }
    let at = |th: f64| half_space_misfit(s, [th.cos(), th.sin()]);
    let n = 360;
    let step = std::f64::consts::TAU / n as f64;
    let mut best = (0.0, at(0.0));
    for k in 1..n {
        let th = k as f64 * step;
        let v = at(th);
        if v < best.1 {
            best = (th, v);
        }
    }
    // golden-section refinement on the bracketing interval
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..60 {
        if at(c) < at(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    let th = 0.5 * (a + b);
    let v = at(th);
    if v < best.1 {
        ([th.cos(), th.sin()], v)
    } else {
        ([best.0.cos(), best.0.sin()], best.1)
    }
}

/// Least squares for `u + t = Σ M_ab (x_a x_b + 2 δ_ab t)`, which is
/// `m t + xᵀMx` with `m = 2 Tr M − 1` substituted.
fn fit_polynomial(s: &Samples) -> (f64, [[f64; 2]; 2], f64) {
    let cols = if s.dim == 1 { 1 } else { 3 };
    let a = DMatrix::from_fn(s.pts.len(), cols, |i, c| {
        let (x, t, _) = s.pts[i];
        match c {
            0 => x[0] * x[0] + 2.0 * t,
            1 => x[1] * x[1] + 2.0 * t,
            _ => 2.0 * x[0] * x[1],
        }
    });
    let b = DVector::from_fn(s.pts.len(), |i, _| s.pts[i].2 + s.pts[i].1);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(cols));
    let mat = if s.dim == 1 {
        [[sol[0], 0.0], [0.0, 0.0]]
    } else {
        [[sol[0], sol[2]], [sol[2], sol[1]]]
    };
    let m = 2.0 * (mat[0][0] + mat[1][1]) - 1.0;
    let dim = s.dim;
    let misfit = relative_misfit(s, |x, t| {
        let mut q = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                q += x[i] * mat[i][j] * x[j];
            }
        }
        m * t + q
    });
    (m, mat, misfit)
}

/// Fits both limit families and keeps the better one; a polynomial with a
/// clearly negative eigenvalue is not an admissible limit and is skipped.
pub fn fit_blowup(u_lambda: &ScalarField, settings: &FitSettings) -> BlowupFit {
    let s = samples(u_lambda);
    let (e, hs) = fit_half_space(&s);
    let (m, mat, mut poly) = fit_polynomial(&s);
    let (lo, hi) = crate::geometry::sym_eigenvalues(mat);
    if lo < -1e-3 * hi.abs().max(0.5) {
        poly = f64::INFINITY;
    }
    let (kind, fit_residual) = if hs.min(poly) > settings.threshold {
        (BlowupKind::Unresolved, hs.min(poly))
    } else if hs <= poly {
        (BlowupKind::HalfSpace, hs)
    } else {
        (BlowupKind::Polynomial, poly)
    };
    BlowupFit {
        kind,
        e,
        m,
        mat,
        fit_residual,
        half_space_residual: hs,
        polynomial_residual: poly,
        alt_trace_gap: mat[0][0] + mat[1][1] - (m + 1.0),
    }
}

/// `dim Ker M` of a fitted polynomial limit, counting eigenvalues below
/// `rel_tol · max(max|μ|, ½)`. The floor ½ is the eigenvalue of the
/// profile ½x², so `M ≈ 0` counts as a full kernel.
pub fn kernel_dimension(fit: &BlowupFit, dim: usize, rel_tol: f64) -> usize {
    let eig: Vec<f64> = if dim == 1 {
        vec![fit.mat[0][0]]
    } else {
        let (a, b) = crate::geometry::sym_eigenvalues(fit.mat);
        vec![a, b]
    };
    let scale = eig.iter().fold(0.5f64, |m, v| m.max(v.abs()));
    eig.iter().filter(|v| v.abs() < rel_tol * scale).count()
}

/// Samples an exact profile onto the reference cylinder (for tests and
/// validation).
pub fn sample_exact(sol: &ExactSolution, window: &ReferenceCylinder) -> Result<ScalarField> {
    let (g, tg) = window.grids(sol.dim())?;
    Ok(ScalarField::from_fn(g, tg, "u", |x, t| sol.u(x, t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_half_space, exact_polynomial};

    #[test]
    fn homogeneous_profiles_are_fixed_by_rescaling() {
        let w = ReferenceCylinder::default();
        let profiles = [
            exact_half_space(2, [0.6, 0.8]).unwrap(),
            exact_polynomial(1, 0.0, [[0.5, 0.0], [0.0, 0.0]]).unwrap(),
            exact_polynomial(2, -0.5, [[0.2, 0.05], [0.05, 0.05]]).unwrap(),
        ];
        let z = SpaceTimePoint::new_2d(0.0, 0.0, 0.0);
        for p in &profiles {
            let base = sample_exact(p, &w).unwrap();
            for lambda in [1.0, 0.5, 0.25, 0.1] {
                let r = rescale_blowup(p, &z, lambda, 1.0, &w).unwrap();
                for (a, b) in r.values().iter().zip(base.values()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fits_recover_family_members() {
        let w = ReferenceCylinder::default();
        let hs = sample_exact(&exact_half_space(2, [1.0, 0.0]).unwrap(), &w).unwrap();
        let fit = fit_blowup(&hs, &FitSettings::default());
        assert_eq!(fit.kind, BlowupKind::HalfSpace);
        assert!((fit.e[0] - 1.0).abs() < 1e-6 && fit.e[1].abs() < 1e-3);
        assert!(fit.fit_residual < 1e-6);

        let sq = sample_exact(
            &exact_polynomial(1, 0.0, [[0.5, 0.0], [0.0, 0.0]]).unwrap(),
            &w,
        )
        .unwrap();
        let fit = fit_blowup(&sq, &FitSettings::default());
        assert_eq!(fit.kind, BlowupKind::Polynomial);
        assert!(fit.m.abs() < 1e-10 && (fit.mat[0][0] - 0.5).abs() < 1e-10);
        assert!((fit.alt_trace_gap + 0.5).abs() < 1e-10);
        assert_eq!(kernel_dimension(&fit, 1, 1e-3), 0);

        let lin = sample_exact(
            &exact_polynomial(1, -1.0, [[0.0, 0.0], [0.0, 0.0]]).unwrap(),
            &w,
        )
        .unwrap();
        let fit = fit_blowup(&lin, &FitSettings::default());
        assert_eq!(fit.kind, BlowupKind::Polynomial);
        assert!((fit.m + 1.0).abs() < 1e-6);
        assert_eq!(kernel_dimension(&fit, 1, 1e-3), 1);
    }

    #[test]
    fn poor_fit_is_unresolved() {
        let w = ReferenceCylinder::default();
        let (g, tg) = w.grids(1).unwrap();
        let wiggle = ScalarField::from_fn(g, tg, "u", |x, t| {
            1.0 + (7.0 * x[0]).sin() * (3.0 * t).cos()
        });
        assert_eq!(
            fit_blowup(&wiggle, &FitSettings::default()).kind,
            BlowupKind::Unresolved
        );
    }

    #[test]
    fn window_errors_name_the_limit() {
        let g = Grid::new_1d(-1.0, 2.0, 20).unwrap();
        let tg = TimeGrid::new(0.0, 0.05, 20).unwrap();
        let u = ScalarField::from_fn(g, tg, "u", |x, _| 0.5 * x[0].max(0.0).powi(2));
        let z = SpaceTimePoint::new_1d(0.5, 1.0);
        match rescale_field_blowup(&u, &z, 0.9, 1.0, &ReferenceCylinder::default()) {
            Err(Error::BlowupWindow { max_lambda }) => assert!((max_lambda - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(rescale_field_blowup(&u, &z, 0.5, 1.0, &ReferenceCylinder::default()).is_ok());
    }
}
