use super::free_boundary::{extract_free_boundary, on_free_boundary};
use crate::error::{Error, Result};
use crate::geometry::{
    cylinder_nodes, distance, sup_on_cylinder, ParabolicCylinder, ScalarField, SpaceTimePoint,
};
use crate::solver::positivity_threshold;

/// Growth of `sup_{Q_ρ(z0)} u` across a sweep of radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub z0: SpaceTimePoint,
    pub rho_values: Vec<f64>,
    pub sup_values: Vec<f64>,
    /// Slope of `log sup` against `log ρ` (NaN with fewer than two
    /// positive sups).
    pub fitted_exponent: f64,
    /// `min sup/ρ²`.
    pub fitted_c_lower: f64,
    /// `max sup/ρ²`.
    pub fitted_c_upper: f64,
}

/// Least-squares slope of `log y` against `log x` over positive `y`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn sweep(u: &ScalarField, z0: &SpaceTimePoint, rho_list: &[f64]) -> Result<RegularityReport> {
    if rho_list.is_empty() {
        return Err(Error::InvalidParameter("empty radius list".into()));
    }
    if rho_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(
            "radii must be strictly decreasing".into(),
        ));
    }
    let sups = rho_list
        .iter()
        .map(|&rho| sup_on_cylinder(u, &ParabolicCylinder::new(*z0, rho)?))
        .collect::<Result<Vec<f64>>>()?;
    let scaled: Vec<f64> = sups
        .iter()
        .zip(rho_list)
        .map(|(s, r)| s / (r * r))
        .collect();
    Ok(RegularityReport {
        z0: *z0,
        fitted_exponent: log_log_slope(rho_list, &sups),
        fitted_c_lower: scaled.iter().copied().fold(f64::INFINITY, f64::min),
        fitted_c_upper: scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        rho_values: rho_list.to_vec(),
        sup_values: sups,
    })
}

/// Nondegeneracy `sup_{Q_ρ} u ≥ c ρ²` at a point of the closure of
/// `{u > ε}`.
pub fn nondegeneracy_sweep(
    u: &ScalarField,
    z0: &SpaceTimePoint,
    rho_list: &[f64],
) -> Result<RegularityReport> {
    let g = u.grid();
    let eps = positivity_threshold(u);
    let j = u
        .time_grid()
        .nearest_index(z0.t)
        .ok_or(Error::Precondition {
            x: z0.coords(g.dim()),
            t: z0.t,
            reason: "time outside the trajectory".into(),
        })?;
    let reach = (0..g.dim()).map(|a| g.h(a).powi(2)).sum::<f64>().sqrt() * (1.0 + 1e-9);
    let near_positive = (0..g.node_count())
        .any(|n| u.at(n, j) > eps && distance(&g.node_position(n), &z0.x, g.dim()) <= reach);
    if !near_positive {
        return Err(Error::Precondition {
            x: z0.coords(g.dim()),
            t: z0.t,
            reason: "point is not in the closure of {u > 0}".into(),
        });
    }
    sweep(u, z0, rho_list)
}

/// Quadratic growth `sup_{Q_ρ} u ≤ C ρ²` at a free boundary point.
pub fn quadratic_growth_sweep(
    u: &ScalarField,
    z0: &SpaceTimePoint,
    rho_list: &[f64],
) -> Result<RegularityReport> {
    let fb = extract_free_boundary(u, positivity_threshold(u));
    if !on_free_boundary(u, &fb, z0) {
        return Err(Error::Precondition {
            x: z0.coords(u.grid().dim()),
            t: z0.t,
            reason: "point is not on the free boundary".into(),
        });
    }
    sweep(u, z0, rho_list)
}

/// `max (Σᵢⱼ |∂ᵢⱼu| + |∂ₜu|)` over the nodes of `Q_ρ(z0)` whose whole
/// difference stencil lies in `{u > ε}`; central differences throughout,
/// backward in time on the last available level.
pub fn derivative_bounds(u: &ScalarField, z0: &SpaceTimePoint, rho: f64) -> Result<f64> {
    let g = u.grid();
    let tg = u.time_grid();
    let dim = g.dim();
    let eps = positivity_threshold(u);
    let fb = extract_free_boundary(u, eps);
    if !on_free_boundary(u, &fb, z0) {
        return Err(Error::Precondition {
            x: z0.coords(dim),
            t: z0.t,
            reason: "point is not on the free boundary".into(),
        });
    }
    let cyl = ParabolicCylinder::new(*z0, rho)?;
    let mut best: Option<f64> = None;
    for (node, j) in cylinder_nodes(u, &cyl)? {
        if g.is_boundary(node) || j == 0 {
            continue;
        }
        let ix = g.node_multi_index(node);
        let at = |di: [isize; 2], jj: usize| {
            let m = [
                (ix[0] as isize + di[0]) as usize,
                (ix[1] as isize + di[1]) as usize,
            ];
            u.at(g.node_id(m), jj)
        };
        let mut offsets: Vec<[isize; 2]> = vec![[0, 0]];
        for a in 0..dim {
            let mut p = [0isize; 2];
            p[a] = 1;
            offsets.push(p);
            offsets.push([-p[0], -p[1]]);
        }
        if dim == 2 {
            offsets.extend([[1, 1], [1, -1], [-1, 1], [-1, -1]]);
        }
        let j_next = if j < tg.n_steps() { Some(j + 1) } else { None };
        let levels: Vec<usize> = [Some(j - 1), Some(j), j_next]
            .into_iter()
            .flatten()
            .collect();
        if offsets.iter().any(|&o| at(o, j) <= eps)
            || levels.iter().any(|&jj| at([0, 0], jj) <= eps)
        {
            continue;
        }
        let c = at([0, 0], j);
        let mut total = 0.0;
        for a in 0..dim {
            let mut p = [0isize; 2];
            p[a] = 1;
            total += ((at(p, j) - 2.0 * c + at([-p[0], -p[1]], j)) / g.h(a).powi(2)).abs();
        }
        if dim == 2 {
            let mixed = (at([1, 1], j) - at([1, -1], j) - at([-1, 1], j) + at([-1, -1], j))
                / (4.0 * g.h(0) * g.h(1));
            total += 2.0 * mixed.abs();
        }
        let ut = match j_next {
            Some(jn) => (at([0, 0], jn) - at([0, 0], j - 1)) / (2.0 * tg.dt()),
            None => (c - at([0, 0], j - 1)) / tg.dt(),
        };
        total += ut.abs();
        best = Some(best.map_or(total, |b: f64| b.max(total)));
    }
    best.ok_or(Error::EmptyCylinder {
        radius: rho,
        reason: "no node with its full stencil inside {u > 0}".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Grid, TimeGrid};

    fn stationary(n: usize) -> ScalarField {
        let g = Grid::new_1d(-1.0, 2.0, n).unwrap();
        let tg = TimeGrid::new(0.0, 0.02, 50).unwrap();
        ScalarField::from_fn(g, tg, "u", |x, _| 0.5 * x[0].max(0.0).powi(2))
    }

    #[test]
    fn stationary_profile_grows_quadratically() {
        let u = stationary(400);
        let z0 = SpaceTimePoint::new_1d(0.0, 1.0);
        let rhos = [0.8, 0.6, 0.45, 0.3, 0.2, 0.15];
        let r = quadratic_growth_sweep(&u, &z0, &rhos).unwrap();
        assert!(
            (r.fitted_exponent - 2.0).abs() < 0.1,
            "{}",
            r.fitted_exponent
        );
        assert!((r.fitted_c_upper - 0.5).abs() < 0.05);
        let r = nondegeneracy_sweep(&u, &z0, &rhos).unwrap();
        assert!((r.fitted_c_lower - 0.5).abs() < 0.05);
    }

    #[test]
    fn singular_profile_grows_quadratically() {
        let g = Grid::new_1d(-1.0, 2.0, 400).unwrap();
        let tg = TimeGrid::new(0.0, 0.02, 50).unwrap();
        let u = ScalarField::from_fn(g, tg, "u", |x, _| 0.5 * x[0] * x[0]);
        let r = quadratic_growth_sweep(&u, &SpaceTimePoint::new_1d(0.0, 1.0), &[0.8, 0.4, 0.2])
            .unwrap();
        assert!((r.fitted_exponent - 2.0).abs() < 0.1);
        assert!((r.fitted_c_upper - 0.5).abs() < 0.05);
    }

    #[test]
    fn preconditions() {
        let u = stationary(100);
        let deep = SpaceTimePoint::new_1d(-0.5, 1.0);
        assert!(matches!(
            nondegeneracy_sweep(&u, &deep, &[0.2]),
            Err(Error::Precondition { .. })
        ));
        assert!(matches!(
            quadratic_growth_sweep(&u, &deep, &[0.2]),
            Err(Error::Precondition { .. })
        ));
        assert!(derivative_bounds(&u, &deep, 0.2).is_err());
    }

    #[test]
    fn constant_field_has_flat_exponent() {
        let g = Grid::new_1d(-1.0, 2.0, 50).unwrap();
        let tg = TimeGrid::new(0.0, 0.02, 50).unwrap();
        let u = ScalarField::from_fn(g, tg, "u", |_, _| 0.3);
        let r = nondegeneracy_sweep(&u, &SpaceTimePoint::new_1d(0.0, 1.0), &[0.5, 0.25]).unwrap();
        assert!(r.fitted_exponent.abs() < 1e-12);
    }

    #[test]
    fn derivative_bound_of_stationary_profile() {
        let u = stationary(200);
        let z0 = SpaceTimePoint::new_1d(0.0, 1.0);
        let m1 = derivative_bounds(&u, &z0, 0.4).unwrap();
        let m2 = derivative_bounds(&u, &z0, 0.2).unwrap();
        assert!((m1 - 1.0).abs() < 1e-9 && (m2 - 1.0).abs() < 1e-9);
        let scaled = u.map("u", |v| 3.0 * v);
        assert!((derivative_bounds(&scaled, &z0, 0.4).unwrap() - 3.0).abs() < 1e-9);
    }
}
