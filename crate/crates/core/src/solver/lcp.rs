//! Linear complementarity problems `u ≥ 0, w = A u − b ≥ 0, uᵀw = 0`
//! and their solution by projected successive over-relaxation.

use crate::error::{Error, Result};

/// Compressed sparse row matrix with a cached diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<f64>,
}

impl CsrMatrix {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut m = CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
            diag: vec![0.0; n],
        };
        m.diag = (0..n)
            .map(|i| m.row(i).find(|&(c, _)| c == i).map_or(0.0, |(_, v)| v))
            .collect();
        m
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(i) {
                row[c] += v;
            }
        }
        d
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d = self.to_dense();
        (0..self.n).all(|i| (0..i).all(|j| (d[i][j] - d[j][i]).abs() <= tol))
    }

    pub fn is_strictly_diagonally_dominant(&self) -> bool {
        (0..self.n).all(|i| {
            let off: f64 = self
                .row(i)
                .filter(|&(c, _)| c != i)
                .map(|(_, v)| v.abs())
                .sum();
            self.diag[i].abs() > off
        })
    }
}

/// `u ≥ 0, A u − b ≥ 0, uᵢ (A u − b)ᵢ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl LcpSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != matrix.dim() {
            return Err(Error::GridMismatch(format!(
                "rhs has {} entries for a {}x{} matrix",
                rhs.len(),
                matrix.dim(),
                matrix.dim()
            )));
        }
        if (0..matrix.dim()).any(|i| !(matrix.diag(i) > 0.0)) {
            return Err(Error::InvalidParameter(
                "LCP matrix needs a positive diagonal".into(),
            ));
        }
        Ok(LcpSystem { matrix, rhs })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// `w = A u − b`.
    pub fn slack(&self, u: &[f64]) -> Vec<f64> {
        let mut w = self.matrix.mul_vec(u);
        for (wi, bi) in w.iter_mut().zip(&self.rhs) {
            *wi -= bi;
        }
        w
    }

    /// Natural residual `max |min(uᵢ, wᵢ)|`; zero exactly at a solution.
    pub fn complementarity_residual(&self, u: &[f64]) -> f64 {
        self.slack(u)
            .iter()
            .zip(u)
            .map(|(w, u)| u.min(*w).abs())
            .fold(0.0, f64::max)
    }
}

/// Over-relaxation factor selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relaxation {
    Fixed(f64),
    /// Young's optimum `2 / (1 + √(1 − ρ_J²))` from the Jacobi spectral
    /// radius of the grid operator; falls back to 1.5 when no estimate is
    /// available.
    Optimal,
}

impl Default for Relaxation {
    fn default() -> Self {
        Relaxation::Fixed(1.5)
    }
}

impl Relaxation {
    pub fn omega(&self, jacobi_radius: Option<f64>) -> f64 {
        match *self {
            Relaxation::Fixed(w) => w,
            Relaxation::Optimal => match jacobi_radius {
                Some(r) if r < 1.0 => 2.0 / (1.0 + (1.0 - r * r).sqrt()),
                _ => 1.5,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsorSettings {
    pub omega: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for PsorSettings {
    fn default() -> Self {
        PsorSettings {
            omega: 1.5,
            max_iters: 10_000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsorOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Projected SOR. Each sweep updates
/// `uᵢ ← max(0, (1−ω) uᵢ + ω (bᵢ − Σ_{j≠i} aᵢⱼ uⱼ) / aᵢᵢ)` in place.
/// Stops once the natural residual is below `tol`, or below the round-off
/// floor `64 ε max(|aᵢᵢ uᵢ| + |bᵢ|)` when that is larger.
pub fn psor(system: &LcpSystem, initial: &[f64], settings: &PsorSettings) -> Result<PsorOutcome> {
    relax(system, initial, settings, true)
}

/// Plain SOR for `A u = b` (no sign constraint).
pub fn sor(system: &LcpSystem, initial: &[f64], settings: &PsorSettings) -> Result<PsorOutcome> {
    relax(system, initial, settings, false)
}

fn relax(
    system: &LcpSystem,
    initial: &[f64],
    settings: &PsorSettings,
    project: bool,
) -> Result<PsorOutcome> {
    let n = system.dim();
    if initial.len() != n {
        return Err(Error::GridMismatch("initial guess length".into()));
    }
    if !(settings.omega > 0.0 && settings.omega < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "relaxation factor must lie in (0, 2), got {}",
            settings.omega
        )));
    }
    let a = &system.matrix;
    let b = &system.rhs;
    let omega = settings.omega;
    let mut u: Vec<f64> = if project {
        initial.iter().map(|v| v.max(0.0)).collect()
    } else {
        initial.to_vec()
    };
    let residual_of = |u: &[f64]| {
        if project {
            system.complementarity_residual(u)
        } else {
            system.slack(u).iter().fold(0.0f64, |m, w| m.max(w.abs()))
        }
    };

    let floor = |u: &[f64]| {
        64.0 * f64::EPSILON
            * (0..n).fold(0.0f64, |m, i| m.max((a.diag(i) * u[i]).abs() + b[i].abs()))
    };
    let mut residual = residual_of(&u);
    if residual <= settings.tol {
        return Ok(PsorOutcome {
            solution: u,
            iterations: 0,
            residual,
        });
    }
    for it in 1..=settings.max_iters {
        // largest change measured in residual units
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let mut acc = b[i];
            for (c, v) in a.row(i) {
                if c != i {
                    acc -= v * u[c];
                }
            }
            let d = a.diag(i);
            let mut next = (1.0 - omega) * u[i] + omega * acc / d;
            if project && next < 0.0 {
                next = 0.0;
            }
            moved = moved.max((next - u[i]).abs() * d);
            u[i] = next;
        }
        if !moved.is_finite() {
            break;
        }
        if moved <= settings.tol.max(floor(&u)) {
            residual = residual_of(&u);
            if residual <= settings.tol.max(floor(&u)) {
                return Ok(PsorOutcome {
                    solution: u,
                    iterations: it,
                    residual,
                });
            }
        }
    }
    residual = residual_of(&u);
    Err(Error::NotConverged {
        time_index: 0,
        iterations: settings.max_iters,
        residual,
    })
}
