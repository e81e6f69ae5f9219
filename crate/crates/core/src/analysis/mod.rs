//! Diagnostics of the free boundary `Γ = ∂{u > 0}` of a computed solution.
//!
//! Growth sweeps measure nondegeneracy and quadratic growth, the Weiss
//! energy splits interface points into regular and singular, blow-up fits
//! identify the limiting profile, and singular points are sorted into
//! strata by the kernel of their quadratic form.

mod blowup;
mod free_boundary;
mod pipeline;
mod regularity;
mod report;
mod singular;
mod weiss;

pub use blowup::{
    blowup_cauchy_gaps, fit_blowup, kernel_dimension, max_blowup_lambda, rescale_blowup,
    rescale_field_blowup, sample_exact, BlowupFit, BlowupKind, FitSettings, ReferenceCylinder,
};
pub use free_boundary::{
    extract_free_boundary, fit_circle, free_boundary_measure, on_free_boundary, FreeBoundaryPoint,
    FreeBoundarySet, PointLabel,
};
pub use pipeline::{analyze, AnalysisReport, AnalysisSettings, PointAnalysis};
pub use regularity::{
    derivative_bounds, log_log_slope, nondegeneracy_sweep, quadratic_growth_sweep, RegularityReport,
};
pub use report::{
    overlay_svg, profiles_svg, write_classification_csv, write_regularity_csv, write_weiss_csv,
};
pub use singular::{singular_structure, SingularPoint, SingularReport};
pub use weiss::{
    classify_point, compute_a_n, compute_a_n_along, extrapolate_limit, heat_kernel,
    label_for_ratio, weiss_energy, ClassifySettings, WeissQuadrature, WeissValue,
};
