use super::blowup::{kernel_dimension, BlowupFit, BlowupKind};
use super::free_boundary::{FreeBoundarySet, PointLabel};
use crate::geometry::{distance, SpaceTimePoint};

/// A cluster of singular interface points on one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularPoint {
    pub z: SpaceTimePoint,
    pub slice: usize,
    /// Indices into the free boundary point list.
    pub members: Vec<usize>,
    /// `dim Ker M` of the fitted polynomial limit, if there is one.
    pub kernel_dim: Option<usize>,
    /// No other singular cluster within `3h` on the same level.
    pub isolated: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SingularReport {
    pub total_points: usize,
    pub singular: Vec<SingularPoint>,
    /// `(slice, singular cluster count)` for levels with any.
    pub per_slice: Vec<(usize, usize)>,
}

impl SingularReport {
    /// Clusters with `dim Ker M = k`.
    pub fn stratum(&self, k: usize) -> impl Iterator<Item = &SingularPoint> + '_ {
        self.singular
            .iter()
            .filter(move |p| p.kernel_dim == Some(k))
    }
}

/// Groups singular points, sorts them into strata `S(k)` by `k = dim Ker M`
/// and checks isolation. `fits[i]` belongs to `fb.points[i]`.
///
/// Interface points closer than `2h` on a level are one cluster: a single
/// singular point yields a crossing on each adjacent grid edge.
pub fn singular_structure(
    fb: &FreeBoundarySet,
    fits: &[Option<BlowupFit>],
    h: f64,
    kernel_tol: f64,
) -> SingularReport {
    let mut report = SingularReport {
        total_points: fb.len(),
        ..SingularReport::default()
    };
    let mut slices: Vec<usize> = fb.points.iter().map(|p| p.slice).collect();
    slices.sort_unstable();
    slices.dedup();
    for j in slices {
        let idx: Vec<usize> = (0..fb.len())
            .filter(|&i| fb.points[i].slice == j && fb.points[i].label == PointLabel::Singular)
            .collect();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &idx {
            let xi = fb.points[i].z.x;
            let hit = clusters.iter_mut().find(|c| {
                c.iter()
                    .any(|&k| distance(&fb.points[k].z.x, &xi, fb.dim) < 2.0 * h)
            });
            match hit {
                Some(c) => c.push(i),
                None => clusters.push(vec![i]),
            }
        }
        if clusters.is_empty() {
            continue;
        }
        let centres: Vec<[f64; 2]> = clusters
            .iter()
            .map(|c| {
                let n = c.len() as f64;
                let sx: f64 = c.iter().map(|&k| fb.points[k].z.x[0]).sum();
                let sy: f64 = c.iter().map(|&k| fb.points[k].z.x[1]).sum();
                [sx / n, sy / n]
            })
            .collect();
        report.per_slice.push((j, clusters.len()));
        for (ci, c) in clusters.iter().enumerate() {
            let kernel_dim = c.iter().find_map(|&k| {
                fits.get(k)
                    .copied()
                    .flatten()
                    .filter(|f| f.kind == BlowupKind::Polynomial)
                    .map(|f| kernel_dimension(&f, fb.dim, kernel_tol))
            });
            let isolated = centres
                .iter()
                .enumerate()
                .all(|(cj, o)| cj == ci || distance(o, &centres[ci], fb.dim) >= 3.0 * h);
            report.singular.push(SingularPoint {
                z: SpaceTimePoint {
                    x: centres[ci],
                    t: fb.points[c[0]].z.t,
                },
                slice: j,
                members: c.clone(),
                kernel_dim,
                isolated,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::free_boundary::FreeBoundaryPoint;

    fn point(x: f64, label: PointLabel) -> FreeBoundaryPoint {
        FreeBoundaryPoint {
            z: SpaceTimePoint::new_1d(x, 1.0),
            slice: 3,
            label,
        }
    }

    fn flat_fit() -> BlowupFit {
        BlowupFit {
            kind: BlowupKind::Polynomial,
            e: [1.0, 0.0],
            m: -1.0,
            mat: [[0.0, 0.0], [0.0, 0.0]],
            fit_residual: 0.0,
            half_space_residual: 1.0,
            polynomial_residual: 0.0,
            alt_trace_gap: 0.0,
        }
    }

    #[test]
    fn empty_and_regular_only() {
        let fb = FreeBoundarySet {
            dim: 1,
            eps: 0.0,
            points: vec![
                point(0.0, PointLabel::Regular),
                point(0.5, PointLabel::Regular),
            ],
        };
        let r = singular_structure(&fb, &[None, None], 0.01, 1e-3);
        assert_eq!(r.total_points, 2);
        assert!(r.singular.is_empty());
        let none = FreeBoundarySet {
            dim: 1,
            eps: 0.0,
            points: vec![],
        };
        assert!(singular_structure(&none, &[], 0.01, 1e-3)
            .singular
            .is_empty());
    }

    #[test]
    fn adjacent_crossings_form_one_isolated_point() {
        let fb = FreeBoundarySet {
            dim: 1,
            eps: 0.0,
            points: vec![
                point(-0.004, PointLabel::Singular),
                point(0.004, PointLabel::Singular),
                point(0.5, PointLabel::Regular),
            ],
        };
        let r = singular_structure(&fb, &[Some(flat_fit()), None, None], 0.01, 1e-3);
        assert_eq!(r.singular.len(), 1);
        let p = &r.singular[0];
        assert!(p.isolated);
        assert_eq!(p.kernel_dim, Some(1));
        assert_eq!(r.stratum(1).count(), 1);
        assert_eq!(r.per_slice, vec![(3, 1)]);
    }

    #[test]
    fn nearby_clusters_are_not_isolated() {
        let fb = FreeBoundarySet {
            dim: 1,
            eps: 0.0,
            points: vec![
                point(0.0, PointLabel::Singular),
                point(0.025, PointLabel::Singular),
            ],
        };
        let r = singular_structure(&fb, &[None, None], 0.01, 1e-3);
        assert_eq!(r.singular.len(), 2);
        assert!(r.singular.iter().all(|p| !p.isolated));
    }
}
