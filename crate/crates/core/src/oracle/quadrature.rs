use std::f64::consts::PI;

/// Integration region in space × time. A degenerate time interval
/// (`t0 == t1`) means a purely spatial integral at `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadRegion {
    Cylinder {
        dim: usize,
        center: [f64; 2],
        radius: f64,
        t0: f64,
        t1: f64,
    },
    Box {
        dim: usize,
        lo: [f64; 2],
        hi: [f64; 2],
        t0: f64,
        t1: f64,
    },
}

/// Composite Simpson weights for `n` (even) panels on `[a, b]`.
fn simpson(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(2) + n % 2;
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (a + i as f64 * h, w * h / 3.0)
        })
        .collect()
}

fn time_rule(t0: f64, t1: f64, n: usize) -> Vec<(f64, f64)> {
    if t0 == t1 {
        vec![(t0, 1.0)]
    } else {
        simpson(t0, t1, n)
    }
}

/// High-order reference value of `∫ g(x, t) dx dt` over `region` with
/// `resolution` panels per direction: composite Simpson in time and in
/// Cartesian or radial directions, trapezoid (spectral for periodic
/// integrands) in angle.
pub fn reference_quadrature(
    g: impl Fn([f64; 2], f64) -> f64,
    region: &QuadRegion,
    resolution: usize,
) -> f64 {
    let mut total = 0.0;
    match *region {
        QuadRegion::Box {
            dim,
            lo,
            hi,
            t0,
            t1,
        } => {
            let xs = simpson(lo[0], hi[0], resolution);
            let ys = if dim == 2 {
                simpson(lo[1], hi[1], resolution)
            } else {
                vec![(0.0, 1.0)]
            };
            for (t, wt) in time_rule(t0, t1, resolution) {
                for &(y, wy) in &ys {
                    for &(x, wx) in &xs {
                        total += wt * wy * wx * g([x, y], t);
                    }
                }
            }
        }
        QuadRegion::Cylinder {
            dim,
            center,
            radius,
            t0,
            t1,
        } => {
            if dim == 1 {
                let xs = simpson(center[0] - radius, center[0] + radius, resolution);
                for (t, wt) in time_rule(t0, t1, resolution) {
                    for &(x, wx) in &xs {
                        total += wt * wx * g([x, 0.0], t);
                    }
                }
            } else {
                let rs = simpson(0.0, radius, resolution);
                let n_theta = 4 * resolution.max(1);
                let w_theta = 2.0 * PI / n_theta as f64;
                for (t, wt) in time_rule(t0, t1, resolution) {
                    for &(r, wr) in &rs {
                        if r == 0.0 {
                            continue;
                        }
                        for k in 0..n_theta {
                            let th = k as f64 * w_theta;
                            let p = [center[0] + r * th.cos(), center[1] + r * th.sin()];
                            total += wt * wr * r * w_theta * g(p, t);
                        }
                    }
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_over_unit_cylinder() {
        for dim in [1, 2] {
            let region = QuadRegion::Cylinder {
                dim,
                center: [0.3, -0.2],
                radius: 1.0,
                t0: -1.0,
                t1: 0.0,
            };
            let vol = if dim == 1 { 2.0 } else { PI };
            assert_relative_eq!(
                reference_quadrature(|_, _| 3.0, &region, 16),
                3.0 * vol,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn heat_kernel_has_unit_mass() {
        let s: f64 = 0.7;
        let sigma = (2.0 * s).sqrt();
        for dim in [1usize, 2] {
            let r = 6.0 * sigma;
            let region = QuadRegion::Box {
                dim,
                lo: [-r, -r],
                hi: [r, r],
                t0: s,
                t1: s,
            };
            let mass = reference_quadrature(
                |x, t| {
                    let y2 = x[0] * x[0] + if dim == 2 { x[1] * x[1] } else { 0.0 };
                    (4.0 * PI * t).powf(-(dim as f64) / 2.0) * (-y2 / (4.0 * t)).exp()
                },
                &region,
                200,
            );
            assert!((mass - 1.0).abs() < 1e-6, "dim {dim}: {mass}");
        }
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let region = QuadRegion::Box {
            dim: 1,
            lo: [0.0, 0.0],
            hi: [1.0, 0.0],
            t0: 0.0,
            t1: 1.0,
        };
        let g = |x: [f64; 2], t: f64| (x[0] * 3.0).exp() * (2.0 * t).cos();
        let exact = (3.0f64.exp() - 1.0) / 3.0 * (2.0f64.sin() / 2.0);
        let e1 = (reference_quadrature(g, &region, 8) - exact).abs();
        let e2 = (reference_quadrature(g, &region, 16) - exact).abs();
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.3, "order {order}");
    }
}
