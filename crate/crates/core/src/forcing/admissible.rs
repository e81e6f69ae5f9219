use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityOptions {
    /// Pair budget; every pair is checked when the field has fewer.
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for AdmissibilityOptions {
    fn default() -> Self {
        AdmissibilityOptions {
            max_pairs: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    /// Smallest sample of `f`; must be positive.
    pub delta0: f64,
    /// Largest sampled Hölder quotient.
    pub holder_const: f64,
    pub pairs_checked: usize,
    pub ok: bool,
}

pub fn check_admissible(f: &ScalarField, alpha: f64) -> Result<AdmissibilityReport> {
    check_admissible_with(f, alpha, AdmissibilityOptions::default())
}

/// Spot-checks non-degeneracy (`f > δ₀ > 0`) and Hölder continuity of
/// `f` in the parabolic-free space-time metric `(|x−y|² + |t−s|²)^{1/2}`.
///
/// Above the pair budget, half the pairs are drawn per separation scale
/// (offsets 1, 2, 4, ... grid steps along a random axis) and half
/// uniformly at random.
pub fn check_admissible_with(
    f: &ScalarField,
    alpha: f64,
    opts: AdmissibilityOptions,
) -> Result<AdmissibilityReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Hölder exponent must lie in (0, 1), got {alpha}"
        )));
    }
    let grid = f.grid();
    let tg = f.time_grid();
    let nodes = grid.node_count();
    let n = f.values().len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty field".into()));
    }

    let delta0 = f.min();
    let point = |k: usize| {
        let (node, j) = (k % nodes, k / nodes);
        let p = grid.node_position(node);
        [p[0], p[1], tg.time(j)]
    };
    let quotient = |a: usize, b: usize| {
        let (pa, pb) = (point(a), point(b));
        let d2: f64 = (0..3).map(|c| (pa[c] - pb[c]).powi(2)).sum();
        let df = (f.values()[a] - f.values()[b]).abs();
        if d2 == 0.0 {
            0.0
        } else {
            df / d2.powf(alpha / 2.0)
        }
    };

    let total_pairs = n * (n - 1) / 2;
    let mut holder: f64 = 0.0;
    let mut checked = 0usize;
    if total_pairs <= opts.max_pairs {
        for a in 0..n {
            for b in a + 1..n {
                holder = holder.max(quotient(a, b));
            }
        }
        checked = total_pairs;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        // per-axis strides in flat sample index, and axis lengths
        let mut axes: Vec<(usize, usize)> = vec![(1, grid.nodes_on_axis(0))];
        if grid.dim() == 2 {
            axes.push((grid.nodes_on_axis(0), grid.nodes_on_axis(1)));
        }
        axes.push((nodes, tg.n_times()));
        let longest = axes.iter().map(|a| a.1).max().unwrap_or(1);
        let levels = (usize::BITS - longest.leading_zeros()) as usize;
        let stratified = opts.max_pairs / 2;
        let per_level = (stratified / levels.max(1)).max(1);
        for level in 0..levels {
            let offset = 1usize << level;
            for _ in 0..per_level {
                let (stride, len) = axes[rng.gen_range(0..axes.len())];
                if offset >= len {
                    continue;
                }
                let a = rng.gen_range(0..n);
                let pos = (a / stride) % len;
                if pos + offset >= len {
                    continue;
                }
                holder = holder.max(quotient(a, a + offset * stride));
                checked += 1;
            }
        }
        while checked < opts.max_pairs {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                holder = holder.max(quotient(a, b));
                checked += 1;
            }
        }
    }

    Ok(AdmissibilityReport {
        delta0,
        holder_const: holder,
        pairs_checked: checked,
        ok: delta0 > 0.0 && holder.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Grid, TimeGrid};
    use approx::assert_relative_eq;

    fn small(f: impl Fn(f64, f64) -> f64) -> ScalarField {
        // 5 nodes × 4 levels = 20 samples
        let g = Grid::new_1d(0.0, 1.0, 4).unwrap();
        let tg = TimeGrid::new(0.0, 1.0 / 3.0, 3).unwrap();
        ScalarField::from_fn(g, tg, "f", |x, t| f(x[0], t))
    }

    #[test]
    fn constant_field_is_admissible() {
        let r = check_admissible(&small(|_, _| 1.0), 0.5).unwrap();
        assert_eq!(r.delta0, 1.0);
        assert_eq!(r.holder_const, 0.0);
        assert!(r.ok);
    }

    #[test]
    fn zero_sample_is_degenerate() {
        let r = check_admissible(&small(|x, _| if x == 0.0 { 0.0 } else { 1.0 }), 0.5).unwrap();
        assert!(!r.ok);
    }

    #[test]
    fn holder_quotient_matches_exhaustive_enumeration() {
        let f = small(|x, _| 1.0 + x);
        // independent enumeration over (x, t) sample coordinates
        let xs: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
        let ts: Vec<f64> = (0..4).map(|j| j as f64 / 3.0).collect();
        let mut pts = Vec::new();
        for &t in &ts {
            for &x in &xs {
                pts.push((x, t, 1.0 + x));
            }
        }
        let mut best: f64 = 0.0;
        for a in &pts {
            for b in &pts {
                let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                if d > 0.0 {
                    best = best.max((a.2 - b.2).abs() / d.powf(0.5));
                }
            }
        }
        let r = check_admissible(&f, 0.5).unwrap();
        assert_relative_eq!(r.holder_const, best, max_relative = 1e-14);
        // |Δx|^{1/2} is maximal at |Δx| = 1 with Δt = 0
        assert_relative_eq!(best, 1.0, max_relative = 1e-14);
        assert_eq!(r.pairs_checked, 190);
    }

    #[test]
    fn sampled_estimate_is_deterministic_and_bounded() {
        let g = Grid::new_1d(0.0, 1.0, 200).unwrap();
        let tg = TimeGrid::new(0.0, 0.01, 100).unwrap();
        let f = ScalarField::from_fn(g, tg, "f", |x, t| 2.0 + (3.0 * x[0]).sin() * t);
        let a = check_admissible(&f, 0.5).unwrap();
        let b = check_admissible(&f, 0.5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.pairs_checked, 10_000);
        assert!(a.ok);
        // Lipschitz constant of f over a unit-diameter domain bounds the quotient
        assert!(a.holder_const > 0.0 && a.holder_const <= 3.0 * 2.0f64.sqrt() + 1.0);
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(check_admissible(&small(|_, _| 1.0), 1.0).is_err());
        assert!(check_admissible(&small(|_, _| 1.0), 0.0).is_err());
    }
}
