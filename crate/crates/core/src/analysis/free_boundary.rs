use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{distance, ScalarField, SpaceTimePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointLabel {
    Regular,
    Singular,
    #[default]
    Unresolved,
}

impl PointLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointLabel::Regular => "regular",
            PointLabel::Singular => "singular",
            PointLabel::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeBoundaryPoint {
    pub z: SpaceTimePoint,
    /// Time level the point was extracted from.
    pub slice: usize,
    pub label: PointLabel,
}

/// Interface between `{u > ε}` and `{u ≤ ε}` on every time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeBoundarySet {
    pub dim: usize,
    pub eps: f64,
    pub points: Vec<FreeBoundaryPoint>,
}

impl FreeBoundarySet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn slice_points(&self, j: usize) -> impl Iterator<Item = &FreeBoundaryPoint> + '_ {
        self.points.iter().filter(move |p| p.slice == j)
    }

    /// Distance from `x` to the nearest point of slice `j`.
    pub fn distance_in_slice(&self, j: usize, x: [f64; 2]) -> Option<f64> {
        self.slice_points(j)
            .map(|p| distance(&p.z.x, &x, self.dim))
            .min_by(f64::total_cmp)
    }
}

/// Walks every grid edge of every slice and records a crossing of the level
/// `eps` where the two end values lie on different sides of it.
///
/// Near a regular point `u ≈ ½ f ((x − x⁰)·n)²`, so `√u` is linear along
/// any grid line. When the node beyond the positive end is also positive
/// and larger, the crossing is the root of that linear extrapolation, which
/// is exact for half-space profiles; otherwise `u` itself is interpolated.
pub fn extract_free_boundary(u: &ScalarField, eps: f64) -> FreeBoundarySet {
    let g = u.grid();
    let dim = g.dim();
    let mut points = Vec::new();
    for j in 0..u.time_grid().n_times() {
        let t = u.time_grid().time(j);
        let s = u.slice(j);
        for node in 0..g.node_count() {
            let ix = g.node_multi_index(node);
            for a in 0..dim {
                if ix[a] + 1 > g.n_cells(a) {
                    continue;
                }
                let mut nx = ix;
                nx[a] += 1;
                let other = g.node_id(nx);
                let (va, vb) = (s[node], s[other]);
                if (va > eps) == (vb > eps) {
                    continue;
                }
                let h = g.h(a);
                let mut w = ((eps - va) / (vb - va)).clamp(0.0, 1.0);
                // the node past the positive end, on the same grid line
                let beyond = if vb > eps {
                    (ix[a] + 2 <= g.n_cells(a)).then(|| {
                        let mut k = ix;
                        k[a] += 2;
                        k
                    })
                } else {
                    (ix[a] >= 1).then(|| {
                        let mut k = ix;
                        k[a] -= 1;
                        k
                    })
                };
                if let Some(k) = beyond {
                    let (v1, v2) = if vb > eps {
                        (vb, s[g.node_id(k)])
                    } else {
                        (va, s[g.node_id(k)])
                    };
                    let (r1, r2) = (v1.sqrt(), v2.sqrt());
                    if r2 > r1 {
                        let d = (r1 / (r2 - r1)).min(1.0);
                        w = if vb > eps { 1.0 - d } else { d };
                    }
                }
                let mut x = g.node_position(node);
                x[a] += w * h;
                points.push(FreeBoundaryPoint {
                    z: SpaceTimePoint { x, t },
                    slice: j,
                    label: PointLabel::Unresolved,
                });
            }
        }
    }
    FreeBoundarySet { dim, eps, points }
}

/// Whether `z` lies within one grid diagonal of the extracted interface
/// on its time level.
pub fn on_free_boundary(u: &ScalarField, fb: &FreeBoundarySet, z: &SpaceTimePoint) -> bool {
    let Some(j) = u.time_grid().nearest_index(z.t) else {
        return false;
    };
    let g = u.grid();
    let reach = (0..g.dim()).map(|a| g.h(a).powi(2)).sum::<f64>().sqrt() * (1.0 + 1e-9);
    fb.distance_in_slice(j, z.x).is_some_and(|d| d <= reach)
}

/// Least-squares circle through 2D points (algebraic fit of
/// `x² + y² + D x + E y + F = 0`). Returns centre and radius.
pub fn fit_circle(points: &[[f64; 2]]) -> Result<([f64; 2], f64)> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(
            "circle fit needs at least 3 points".into(),
        ));
    }
    let n = points.len();
    let a = DMatrix::from_fn(n, 3, |i, c| match c {
        0 => points[i][0],
        1 => points[i][1],
        _ => 1.0,
    });
    let b = DVector::from_fn(n, |i, _| -(points[i][0].powi(2) + points[i][1].powi(2)));
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidParameter(format!("circle fit failed: {e}")))?;
    let center = [-sol[0] / 2.0, -sol[1] / 2.0];
    let r2 = center[0].powi(2) + center[1].powi(2) - sol[2];
    if !(r2 > 0.0) {
        return Err(Error::InvalidParameter(
            "points do not determine a circle".into(),
        ));
    }
    Ok((center, r2.sqrt()))
}

/// Space-time volume of the nodes lying within one grid step of the
/// interface: `count · hⁿ · dt`. Tends to zero under refinement when the
/// free boundary has zero measure.
pub fn free_boundary_measure(u: &ScalarField, fb: &FreeBoundarySet) -> f64 {
    let g = u.grid();
    let h = g.h_max();
    let mut count = 0usize;
    for j in 0..u.time_grid().n_times() {
        let pts: Vec<[f64; 2]> = fb.slice_points(j).map(|p| p.z.x).collect();
        if pts.is_empty() {
            continue;
        }
        count += (0..g.node_count())
            .filter(|&n| {
                let x = g.node_position(n);
                pts.iter()
                    .any(|p| distance(p, &x, g.dim()) <= h * (1.0 + 1e-9))
            })
            .count();
    }
    let cell: f64 = (0..g.dim()).map(|a| g.h(a)).product();
    count as f64 * cell * u.time_grid().dt()
}
