use super::{distance, ScalarField, SpaceTimePoint, COORD_SLACK};
use crate::error::{Error, Result};

/// `Q_ρ(z0) = {|x − x0| < ρ} × (t0 − ρ², t0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicCylinder {
    pub center: SpaceTimePoint,
    pub radius: f64,
}

impl ParabolicCylinder {
    pub fn new(center: SpaceTimePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cylinder radius must be positive, got {radius}"
            )));
        }
        Ok(ParabolicCylinder { center, radius })
    }

    /// Length of the time window; always `radius²`.
    pub fn duration(&self) -> f64 {
        self.radius * self.radius
    }
}

/// All `(node, time_index)` samples strictly inside the cylinder.
///
/// Both the spatial ball and the time interval are open; the slice at
/// `t = t0` itself is never included.
pub fn cylinder_nodes(field: &ScalarField, cyl: &ParabolicCylinder) -> Result<Vec<(usize, usize)>> {
    let grid = field.grid();
    let tg = field.time_grid();
    let dim = grid.dim();
    let z0 = cyl.center;
    let rho = cyl.radius;

    let outside = || Error::CylinderOutsideDomain {
        x: z0.coords(dim),
        t: z0.t,
        radius: rho,
    };
    for axis in 0..dim {
        let lo = grid.origin(axis);
        let hi = lo + grid.extent(axis);
        let slack = COORD_SLACK * grid.h(axis);
        if z0.x[axis] - rho < lo - slack || z0.x[axis] + rho > hi + slack {
            return Err(outside());
        }
    }
    let t_slack = COORD_SLACK * tg.dt();
    if z0.t - cyl.duration() < tg.t0() - t_slack || z0.t > tg.t_end() + t_slack {
        return Err(outside());
    }

    let times: Vec<usize> = (0..tg.n_times())
        .filter(|&j| {
            let t = tg.time(j);
            t > z0.t - cyl.duration() + t_slack && t < z0.t - t_slack
        })
        .collect();
    if times.is_empty() {
        return Err(Error::EmptyCylinder {
            radius: rho,
            reason: format!(
                "time window {:e} holds no level of step {:e}",
                cyl.duration(),
                tg.dt()
            ),
        });
    }

    let h_min = (0..dim).map(|a| grid.h(a)).fold(f64::INFINITY, f64::min);
    let reach = rho - COORD_SLACK * h_min;
    let mut range = [(0usize, 0usize); 2];
    for (axis, r) in range.iter_mut().enumerate() {
        if axis < dim {
            let h = grid.h(axis);
            let lo = ((z0.x[axis] - rho - grid.origin(axis)) / h)
                .floor()
                .max(0.0) as usize;
            let hi = (((z0.x[axis] + rho - grid.origin(axis)) / h).ceil() as usize)
                .min(grid.n_cells(axis));
            *r = (lo, hi);
        }
    }
    let mut nodes = Vec::new();
    for iy in range[1].0..=range[1].1 {
        for ix in range[0].0..=range[0].1 {
            let node = grid.node_id([ix, iy]);
            if distance(&grid.node_position(node), &z0.x, dim) < reach {
                nodes.push(node);
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::EmptyCylinder {
            radius: rho,
            reason: "spatial ball contains no grid node".into(),
        });
    }

    let mut out = Vec::with_capacity(nodes.len() * times.len());
    for &j in &times {
        out.extend(nodes.iter().map(|&n| (n, j)));
    }
    Ok(out)
}

/// Largest sampled value of `u` inside the cylinder.
pub fn sup_on_cylinder(u: &ScalarField, cyl: &ParabolicCylinder) -> Result<f64> {
    let nodes = cylinder_nodes(u, cyl)?;
    Ok(nodes
        .iter()
        .map(|&(n, j)| u.at(n, j))
        .fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Grid, TimeGrid};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn field_1d(f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let g = Grid::new_1d(0.0, 1.0, 10).unwrap();
        let tg = TimeGrid::new(0.0, 0.005, 20).unwrap();
        ScalarField::from_fn(g, tg, "u", |x, t| f(x[0], t))
    }

    #[test]
    fn nodes_match_open_cylinder() {
        let u = field_1d(|_, _| 0.0);
        let cyl = ParabolicCylinder::new(SpaceTimePoint::new_1d(0.5, 0.1), 0.2).unwrap();
        let nodes = cylinder_nodes(&u, &cyl).unwrap();
        let mut xs: Vec<f64> = nodes
            .iter()
            .map(|&(n, _)| u.grid().node_position(n)[0])
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(xs.len(), 3);
        assert_abs_diff_eq!(xs[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(xs[2], 0.6, epsilon = 1e-12);
        let mut ts: Vec<f64> = nodes.iter().map(|&(_, j)| u.time_grid().time(j)).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        // t in (0.06, 0.1): 0.065, ..., 0.095
        assert_eq!(ts.len(), 7);
        assert!(ts[0] > 0.06 && *ts.last().unwrap() < 0.1);
    }

    #[test]
    fn degenerate_window_is_rejected() {
        let u = field_1d(|_, _| 0.0);
        let cyl = ParabolicCylinder::new(SpaceTimePoint::new_1d(0.5, 0.1), 0.05).unwrap();
        assert!(matches!(
            cylinder_nodes(&u, &cyl),
            Err(Error::EmptyCylinder { .. })
        ));
    }

    #[test]
    fn corner_cylinder_is_rejected() {
        let u = field_1d(|_, _| 0.0);
        let cyl = ParabolicCylinder::new(SpaceTimePoint::new_1d(0.0, 0.1), 0.2).unwrap();
        assert!(matches!(
            cylinder_nodes(&u, &cyl),
            Err(Error::CylinderOutsideDomain { .. })
        ));
        let cyl = ParabolicCylinder::new(SpaceTimePoint::new_1d(0.5, 0.01), 0.2).unwrap();
        assert!(cylinder_nodes(&u, &cyl).is_err());
    }

    #[test]
    fn sup_of_constants() {
        let cyl = ParabolicCylinder::new(SpaceTimePoint::new_1d(0.5, 0.1), 0.2).unwrap();
        assert_eq!(sup_on_cylinder(&field_1d(|_, _| 0.0), &cyl).unwrap(), 0.0);
        assert_eq!(sup_on_cylinder(&field_1d(|_, _| 3.25), &cyl).unwrap(), 3.25);
    }

    #[test]
    fn sup_of_half_space_profile() {
        let g = Grid::new_1d(-1.0, 2.0, 200).unwrap();
        let tg = TimeGrid::new(0.0, 0.01, 100).unwrap();
        let u = ScalarField::from_fn(g, tg, "u", |x, _| 0.5 * x[0].max(0.0).powi(2));
        let cyl = ParabolicCylinder::new(SpaceTimePoint::new_1d(0.0, 1.0), 0.2).unwrap();
        // Largest node strictly inside |x| < 0.2 is x = 0.19.
        assert_abs_diff_eq!(
            sup_on_cylinder(&u, &cyl).unwrap(),
            0.5 * 0.19f64.powi(2),
            epsilon = 1e-12
        );
    }

    proptest! {
        #[test]
        fn cylinder_nodes_monotone_in_radius(r1 in 0.08f64..0.3, dr in 0.0f64..0.15, x0 in 0.45f64..0.55) {
            let g = Grid::new_2d([0.0, 0.0], [1.0, 1.0], [20, 20]).unwrap();
            let tg = TimeGrid::new(0.0, 0.002, 100).unwrap();
            let u = ScalarField::from_fn(g, tg, "u", |x, t| (x[0] - 0.3).powi(2) + x[1] * t);
            let z0 = SpaceTimePoint::new_2d(x0, 0.5, 0.2);
            let small = ParabolicCylinder::new(z0, r1).unwrap();
            let large = ParabolicCylinder::new(z0, r1 + dr).unwrap();
            let a = cylinder_nodes(&u, &small).unwrap();
            let b: std::collections::HashSet<_> = cylinder_nodes(&u, &large).unwrap().into_iter().collect();
            prop_assert!(a.iter().all(|p| b.contains(p)));
            prop_assert!(sup_on_cylinder(&u, &small).unwrap() <= sup_on_cylinder(&u, &large).unwrap());
        }
    }
}
