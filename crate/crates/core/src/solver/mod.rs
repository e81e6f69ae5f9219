//! Time stepping for the membrane: the obstacle problem solved by projected
//! SOR, and the damped wave equation it approximates.

mod diagnostics;
mod lcp;
mod parabolic;
mod problem;
mod wave;

pub use diagnostics::{
    check_stefan, complementarity, positivity_threshold, residual, ResidualReport, StefanReport,
};
pub use lcp::{psor, sor, CsrMatrix, LcpSystem, PsorOutcome, PsorSettings, Relaxation};
pub use parabolic::{
    solve_parabolic, step_parabolic, ParabolicSolution, ParabolicStepper, SolverSettings, StepStats,
};
pub use problem::{
    denormalize, denormalize_field, normalize, normalize_field, obstacle_datum, Boundary, Forcing,
    NormalizationRecord, ObstacleProblemSpec, PhysicalConstants,
};
pub use wave::{
    cfl_bound, parabolic_physical, quasi_static_sweep, solve_damped_wave, QuasiStaticPoint,
    WaveScheme, WaveSettings,
};
