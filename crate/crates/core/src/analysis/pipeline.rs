use super::blowup::{
    fit_blowup, max_blowup_lambda, rescale_field_blowup, BlowupFit, FitSettings, ReferenceCylinder,
};
use super::free_boundary::{extract_free_boundary, FreeBoundarySet, PointLabel};
use super::regularity::{derivative_bounds, quadratic_growth_sweep, RegularityReport};
use super::singular::{singular_structure, SingularReport};
use super::weiss::{classify_point, compute_a_n, ClassifySettings, WeissQuadrature, WeissValue};
use crate::error::{Error, Result};
use crate::geometry::ScalarField;
use crate::solver::positivity_threshold;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    /// Strictly decreasing radii for the growth sweeps.
    pub rho_values: Vec<f64>,
    /// Strictly decreasing `τ` values for the Weiss sweep.
    pub tau_values: Vec<f64>,
    pub theta: f64,
    pub quadrature: WeissQuadrature,
    pub fit: FitSettings,
    pub window: ReferenceCylinder,
    /// Preferred blow-up scale, clipped to what the domain allows.
    pub blowup_lambda: f64,
    pub kernel_tol: f64,
    /// Time level to analyse; when unset, the last one with interface
    /// points (or the last one if there are none).
    pub slice: Option<usize>,
    /// Cap on analysed points; larger sets are subsampled evenly.
    pub max_points: usize,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            rho_values: vec![0.4, 0.33, 0.27, 0.22, 0.18, 0.15],
            tau_values: vec![0.4, 0.2, 0.1],
            theta: 0.25,
            quadrature: WeissQuadrature {
                n_radial: 24,
                n_angular: 24,
                n_time: 24,
            },
            fit: FitSettings::default(),
            window: ReferenceCylinder::default(),
            blowup_lambda: 0.2,
            kernel_tol: 1e-3,
            slice: None,
            max_points: 64,
        }
    }
}

/// Diagnostics at one interface point; failed steps keep their message.
#[derive(Debug, Clone, PartialEq)]
pub struct PointAnalysis {
    /// Index into the free boundary point list.
    pub index: usize,
    pub regularity: std::result::Result<RegularityReport, String>,
    pub m_bound: std::result::Result<f64, String>,
    pub weiss: std::result::Result<WeissValue, String>,
    pub fit: std::result::Result<BlowupFit, String>,
    pub label: PointLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub free_boundary: FreeBoundarySet,
    pub slice: usize,
    pub points: Vec<PointAnalysis>,
    pub singular: SingularReport,
    pub a_n: f64,
}

/// Runs every point diagnostic on the interface of one time level of a
/// normalized trajectory `u` with datum `f`.
pub fn analyze(
    u: &ScalarField,
    f: &ScalarField,
    settings: &AnalysisSettings,
) -> Result<AnalysisReport> {
    if !u.same_layout(f) {
        return Err(Error::GridMismatch(
            "u and f live on different grids".into(),
        ));
    }
    let mut fb = extract_free_boundary(u, positivity_threshold(u));
    let last = u.time_grid().n_steps();
    let slice = match settings.slice {
        Some(j) => j,
        None => fb.points.iter().map(|p| p.slice).max().unwrap_or(last),
    };
    if slice > last {
        return Err(Error::InvalidParameter(format!("no time level {slice}")));
    }
    let a_n = compute_a_n(u.grid().dim(), &settings.quadrature)?;
    let candidates: Vec<usize> = (0..fb.len())
        .filter(|&i| fb.points[i].slice == slice)
        .collect();
    let chosen: Vec<usize> = if candidates.len() <= settings.max_points {
        candidates
    } else {
        let step = candidates.len() as f64 / settings.max_points as f64;
        (0..settings.max_points)
            .map(|k| candidates[(k as f64 * step) as usize])
            .collect()
    };

    let classify = ClassifySettings {
        taus: settings.tau_values.clone(),
        quadrature: settings.quadrature,
        theta: settings.theta,
        ..ClassifySettings::default()
    };
    let mut points = Vec::with_capacity(chosen.len());
    let mut fits = vec![None; fb.len()];
    for &i in &chosen {
        let z = fb.points[i].z;
        let regularity =
            quadratic_growth_sweep(u, &z, &settings.rho_values).map_err(|e| e.to_string());
        let m_rho = settings.rho_values.first().copied().unwrap_or(0.1);
        let m_bound = derivative_bounds(u, &z, m_rho).map_err(|e| e.to_string());
        let weiss = classify_point(u, f, &z, a_n, &classify).map_err(|e| e.to_string());
        let fz = f.interpolate(z.x, z.t).unwrap_or(f64::NAN);
        let fit = (|| {
            let lam = settings.blowup_lambda.min(max_blowup_lambda(u, &z, fz));
            if !(lam > 0.0) {
                return Err(Error::BlowupWindow {
                    max_lambda: lam.max(0.0),
                });
            }
            let scaled = rescale_field_blowup(u, &z, lam, fz, &settings.window)?;
            Ok(fit_blowup(&scaled, &settings.fit))
        })()
        .map_err(|e: Error| e.to_string());
        let label = weiss.as_ref().map_or(PointLabel::Unresolved, |w| w.label);
        fb.points[i].label = label;
        fits[i] = fit.as_ref().ok().copied();
        points.push(PointAnalysis {
            index: i,
            regularity,
            m_bound,
            weiss,
            fit,
            label,
        });
    }
    let singular = singular_structure(&fb, &fits, u.grid().h_max(), settings.kernel_tol);
    Ok(AnalysisReport {
        free_boundary: fb,
        slice,
        points,
        singular,
        a_n,
    })
}
