use crate::error::{Error, Result};
use crate::geometry::ScalarField;

/// Discrete defects of a normalized trajectory, measured at interior
/// nodes of every time level after the first.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualReport {
    /// `max(−u)`, zero when `u ≥ 0`.
    pub negativity: f64,
    /// `max(−w)` with `w = u_t − Δu + f` (backward difference in time).
    pub slack_negativity: f64,
    /// `max |min(u, w)|`.
    pub complementarity: f64,
    /// `max |Δu − u_t − f|` where `u > 0`.
    pub positive_set_pde: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.negativity
            .max(self.slack_negativity)
            .max(self.complementarity)
            .max(self.positive_set_pde)
    }
}

/// Threshold below which `u` counts as touching the obstacle.
pub fn positivity_threshold(u: &ScalarField) -> f64 {
    1e-12 * u.max().max(1.0)
}

fn laplacian(g: &crate::geometry::Grid, slice: &[f64], node: usize) -> f64 {
    let ix = g.node_multi_index(node);
    let mut lap = 0.0;
    for a in 0..g.dim() {
        let mut lo = ix;
        let mut hi = ix;
        lo[a] -= 1;
        hi[a] += 1;
        lap += (slice[g.node_id(lo)] - 2.0 * slice[node] + slice[g.node_id(hi)]) / g.h(a).powi(2);
    }
    lap
}

/// Pointwise `|Δ_h u − D_t u − f χ{u>ε}|` with a backward time difference;
/// zero on boundary nodes and on the first time level.
pub fn residual(u: &ScalarField, f: &ScalarField) -> Result<ScalarField> {
    if !u.same_layout(f) {
        return Err(Error::GridMismatch(
            "u and f live on different grids".into(),
        ));
    }
    let g = u.grid();
    let dt = u.time_grid().dt();
    let eps = positivity_threshold(u);
    let mut out = ScalarField::zeros(g.clone(), u.time_grid().clone(), "residual");
    for j in 1..u.time_grid().n_times() {
        let cur = u.slice(j);
        let prev = u.slice(j - 1);
        let dst = out.slice_mut(j);
        for node in (0..g.node_count()).filter(|&n| !g.is_boundary(n)) {
            let chi = if cur[node] > eps { 1.0 } else { 0.0 };
            dst[node] =
                (laplacian(g, cur, node) - (cur[node] - prev[node]) / dt - f.at(node, j) * chi)
                    .abs();
        }
    }
    Ok(out)
}

/// Evaluates the discrete complementarity conditions on `u` with datum
/// `f` (same layout).
pub fn complementarity(u: &ScalarField, f: &ScalarField) -> Result<ResidualReport> {
    if !u.same_layout(f) {
        return Err(Error::GridMismatch(
            "u and f live on different grids".into(),
        ));
    }
    let g = u.grid();
    let dt = u.time_grid().dt();
    let mut rep = ResidualReport {
        negativity: (-u.min()).max(0.0),
        ..ResidualReport::default()
    };
    for j in 1..u.time_grid().n_times() {
        let cur = u.slice(j);
        let prev = u.slice(j - 1);
        for node in (0..g.node_count()).filter(|&n| !g.is_boundary(n)) {
            let w = (cur[node] - prev[node]) / dt - laplacian(g, cur, node) + f.at(node, j);
            rep.slack_negativity = rep.slack_negativity.max(-w);
            rep.complementarity = rep.complementarity.max(cur[node].min(w).abs());
            if cur[node] > 0.0 {
                rep.positive_set_pde = rep.positive_set_pde.max(w.abs());
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StefanReport {
    /// `min(0, min (u^j − u^{j−1})/dt)` over all nodes.
    pub violation: f64,
    /// Node and time index of the most negative difference quotient.
    pub worst: Option<(usize, usize)>,
    pub ok: bool,
}

/// Checks that the trajectory is non-decreasing in time, up to `tol` on the
/// difference quotient.
pub fn check_stefan(u: &ScalarField, tol: f64) -> StefanReport {
    let dt = u.time_grid().dt();
    let mut violation = 0.0f64;
    let mut worst = None;
    for j in 1..u.time_grid().n_times() {
        for (node, (a, b)) in u.slice(j).iter().zip(u.slice(j - 1)).enumerate() {
            let q = (a - b) / dt;
            if q < violation {
                violation = q;
                worst = Some((node, j));
            }
        }
    }
    StefanReport {
        violation,
        worst,
        ok: violation >= -tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Grid, TimeGrid};

    #[test]
    fn stationary_half_space_profile_has_no_defect() {
        // ½x₊² on nodes: Δ_h is exactly 1 wherever the stencil sees u > 0
        let g = Grid::new_1d(-1.0, 2.0, 20).unwrap();
        let tg = TimeGrid::new(0.0, 0.1, 3).unwrap();
        let u = ScalarField::from_fn(g.clone(), tg.clone(), "u", |x, _| {
            0.5 * x[0].max(0.0).powi(2)
        });
        let f = ScalarField::from_fn(g, tg, "f", |_, _| 1.0);
        let r = complementarity(&u, &f).unwrap();
        assert!(r.max() < 1e-12, "{r:?}");
        // pointwise residual vanishes except at the contact node x = 0
        let res = residual(&u, &f).unwrap();
        for j in 1..4 {
            for n in 0..21 {
                let expect = if n == 10 { 0.5 } else { 0.0 };
                assert!((res.at(n, j) - expect).abs() < 1e-12, "node {n}");
            }
        }
        let zero = ScalarField::zeros(u.grid().clone(), u.time_grid().clone(), "u");
        assert_eq!(residual(&zero, &f).unwrap().max(), 0.0);
    }

    #[test]
    fn stefan_flags_decrease() {
        let g = Grid::new_1d(0.0, 1.0, 4).unwrap();
        let tg = TimeGrid::new(0.0, 0.5, 2).unwrap();
        let up = ScalarField::from_fn(g.clone(), tg.clone(), "u", |x, t| x[0] * t);
        assert!(check_stefan(&up, 1e-12).ok);
        let down = ScalarField::from_fn(g, tg, "u", |x, t| x[0] * (1.0 - t));
        let r = check_stefan(&down, 1e-12);
        assert!(!r.ok);
        assert!((r.violation + 1.0).abs() < 1e-12);
        assert_eq!(r.worst, Some((4, 1)));
    }
}
