//! Numerical toolkit for the dimple-formation model of fusion-pore making.
//!
//! The membrane displacement `u(x, t)` is computed as the solution of a
//! parabolic obstacle problem
//!
//! ```text
//! Δu − ∂u/∂t = f χ{u > 0},   u ≥ 0
//! ```
//!
//! driven by a traveling electromagnetic wave through the Lorentz force.
//! The [`analysis`] module turns the regularity theory of that problem
//! (nondegeneracy, quadratic growth, blow-ups, Weiss energy) into
//! measurable diagnostics on solver output.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod forcing;
pub mod geometry;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Grid, ParabolicCylinder, ScalarField, SpaceTimePoint, TimeGrid, UnitSystem};
