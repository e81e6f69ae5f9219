use porosim_core::analysis::{analyze, fit_circle, AnalysisSettings, PointLabel};
use porosim_core::oracle::{exact_polynomial, exact_radial_2d};
use porosim_core::{Grid, ScalarField, TimeGrid};

fn unit(grid: &Grid, tg: &TimeGrid) -> ScalarField {
    ScalarField::from_fn(grid.clone(), tg.clone(), "f", |_, _| 1.0)
}

#[test]
fn radial_interface_is_a_regular_circle() {
    let sol = exact_radial_2d([0.0, 0.0], 0.5).unwrap();
    let grid = Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [96, 96]).unwrap();
    let tg = TimeGrid::new(0.0, 0.25 / 16.0, 16).unwrap();
    let u = ScalarField::from_fn(grid.clone(), tg.clone(), "u", |x, t| sol.u(x, t));
    let settings = AnalysisSettings {
        rho_values: vec![0.3, 0.26, 0.22, 0.19, 0.16, 0.14],
        tau_values: vec![0.25, 0.18, 0.125],
        max_points: 12,
        ..AnalysisSettings::default()
    };
    let report = analyze(&u, &unit(&grid, &tg), &settings).unwrap();
    assert_eq!(report.points.len(), 12);
    for p in &report.points {
        assert_eq!(p.label, PointLabel::Regular, "{:?}", p.weiss);
        let r = p.regularity.as_ref().unwrap();
        assert!((1.8..=2.2).contains(&r.fitted_exponent));
    }
    assert!(report.singular.singular.is_empty());

    let ring: Vec<[f64; 2]> = report
        .free_boundary
        .points
        .iter()
        .filter(|p| p.slice == report.slice)
        .map(|p| p.z.x)
        .collect();
    let (c, r) = fit_circle(&ring).unwrap();
    let h = grid.h(0);
    assert!(c[0].abs() < 0.1 * h && c[1].abs() < 0.1 * h);
    assert!((r - 0.5).abs() < 0.1 * h, "radius {r}");
}

#[test]
fn line_of_double_roots_has_a_one_dimensional_kernel() {
    // u = ½x², zero along the whole y axis
    let sol = exact_polynomial(2, 0.0, [[0.5, 0.0], [0.0, 0.0]]).unwrap();
    let grid = Grid::new_2d([-1.0, -1.0], [2.0, 2.0], [160, 160]).unwrap();
    let tg = TimeGrid::new(0.0, 0.05, 10).unwrap();
    let u = ScalarField::from_fn(grid.clone(), tg.clone(), "u", |x, t| sol.u(x, t));
    let settings = AnalysisSettings {
        rho_values: vec![0.3, 0.26, 0.22, 0.19, 0.16, 0.14],
        tau_values: vec![0.2, 0.14, 0.1],
        max_points: 6,
        ..AnalysisSettings::default()
    };
    let report = analyze(&u, &unit(&grid, &tg), &settings).unwrap();
    assert!(!report.points.is_empty());
    let singular = report
        .points
        .iter()
        .filter(|p| p.label == PointLabel::Singular)
        .count();
    assert!(singular * 2 >= report.points.len(), "{singular} singular");
    assert!(report.singular.stratum(1).count() > 0);
}
