use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::solver::{CsrMatrix, LcpSystem};

/// Enumeration visits `2^N` active sets; beyond this it is pointless.
pub const MAX_BRUTE_FORCE_DIM: usize = 20;

/// Solves the LCP `u ≥ 0, A u − b ≥ 0, uᵀ(A u − b) = 0` by trying every
/// split into free (`u > 0`, `w = 0`) and active (`u = 0`) unknowns.
pub fn brute_force_lcp(system: &LcpSystem) -> Result<Vec<f64>> {
    let n = system.dim();
    if n > MAX_BRUTE_FORCE_DIM {
        return Err(Error::InvalidParameter(format!(
            "enumeration is limited to {MAX_BRUTE_FORCE_DIM} unknowns, got {n}"
        )));
    }
    let dense = system.matrix.to_dense();
    let a = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
    let b = DVector::from_column_slice(&system.rhs);
    let scale = 1.0 + b.amax() + a.amax();
    let tol = 1e-11 * scale;

    for mask in 0u32..(1u32 << n) {
        let free: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let mut u = DVector::zeros(n);
        if !free.is_empty() {
            let k = free.len();
            let a_ff = DMatrix::from_fn(k, k, |i, j| a[(free[i], free[j])]);
            let b_f = DVector::from_fn(k, |i, _| b[free[i]]);
            let Some(sol) = a_ff.lu().solve(&b_f) else {
                continue;
            };
            if sol.iter().any(|&v| v < -tol) {
                continue;
            }
            for (i, &node) in free.iter().enumerate() {
                u[node] = sol[i].max(0.0);
            }
        }
        let w = &a * &u - &b;
        let feasible = (0..n).all(|i| mask & (1 << i) != 0 || w[i] >= -tol);
        if feasible {
            return Ok(u.iter().copied().collect());
        }
    }
    Err(Error::NoFeasibleActiveSet)
}

/// Dense assembly of one backward-Euler obstacle step, written from node
/// coordinates rather than index arithmetic so that it shares no code with
/// the production stencil. Returns the system and the node id of each
/// unknown.
pub fn dense_heat_lcp(
    grid: &Grid,
    dt: f64,
    u_prev: &[f64],
    f_next: &[f64],
    boundary: &[f64],
) -> Result<(LcpSystem, Vec<usize>)> {
    let nodes: Vec<usize> = (0..grid.node_count())
        .filter(|&n| !grid.is_boundary(n))
        .collect();
    let dim = grid.dim();
    let h = [grid.h(0), if dim == 2 { grid.h(1) } else { f64::INFINITY }];
    // axis along which p and q are unit neighbours, if any
    let neighbour_axis = |p: usize, q: usize| -> Option<usize> {
        let (xp, xq) = (grid.node_position(p), grid.node_position(q));
        let d = [(xp[0] - xq[0]).abs(), (xp[1] - xq[1]).abs()];
        (0..dim).find(|&a| {
            let other = 1 - a;
            (d[a] - h[a]).abs() < 1e-9 * h[a] && (other >= dim || d[other] < 1e-9 * h[other])
        })
    };
    let diag = 1.0 / dt + (0..dim).map(|a| 2.0 / (h[a] * h[a])).sum::<f64>();
    let mut rows = vec![vec![0.0; nodes.len()]; nodes.len()];
    let mut rhs = Vec::with_capacity(nodes.len());
    for (i, &p) in nodes.iter().enumerate() {
        rows[i][i] = diag;
        for (j, &q) in nodes.iter().enumerate() {
            if let Some(a) = neighbour_axis(p, q) {
                rows[i][j] = -1.0 / (h[a] * h[a]);
            }
        }
        let mut b = u_prev[p] / dt - f_next[p];
        for q in (0..grid.node_count()).filter(|&q| grid.is_boundary(q)) {
            if let Some(a) = neighbour_axis(p, q) {
                b += boundary[q] / (h[a] * h[a]);
            }
        }
        rhs.push(b);
    }
    Ok((LcpSystem::new(CsrMatrix::from_dense(&rows), rhs)?, nodes))
}

/// A random symmetric, strictly diagonally dominant LCP with non-positive
/// couplings that are mostly negative, reproducible from `seed`.
#[allow(clippy::needless_range_loop)]
pub fn random_lcp(seed: u64, n: usize) -> LcpSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..i {
            let v = rng.gen_range(-1.0..0.3);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| rows[i][j].abs()).sum();
        rows[i][i] = off + rng.gen_range(0.5..2.0);
    }
    let rhs = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    LcpSystem::new(CsrMatrix::from_dense(&rows), rhs).expect("square by construction")
}
