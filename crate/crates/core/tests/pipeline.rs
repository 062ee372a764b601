use dyadic_cf::identification::{identify_from_samples, identify_from_slices};
use dyadic_cf::oracle::cf_value;
use dyadic_cf::{
    compose_phi_y_slices, invert_cf, sample_components, validate_cf_curve, ComponentDist, FreqGrid,
    IdentifyOptions, ModelConfig, Window,
};

#[test]
fn larger_runs_extend_smaller_ones() {
    let cfg = ModelConfig::new(
        1.0,
        ComponentDist::laplace(1.0).unwrap(),
        ComponentDist::normal(1.0).unwrap(),
        ComponentDist::uniform_symmetric(1.0).unwrap(),
    );
    let small = sample_components(&cfg, 300, 9).unwrap();
    let large = sample_components(&cfg, 600, 9).unwrap();
    assert_eq!(small.triples(), &large.triples()[..300]);
}

#[test]
fn asymmetric_components_are_recovered_from_slices() {
    let cfg = ModelConfig::new(
        0.0,
        ComponentDist::shifted_exponential(1.0).unwrap(),
        ComponentDist::laplace(0.5).unwrap(),
        ComponentDist::normal(0.5).unwrap(),
    );
    let grid = FreqGrid::with_spacing(4.0, 0.01).unwrap();
    let id = identify_from_slices(&compose_phi_y_slices(&cfg, &grid), &IdentifyOptions::default()).unwrap();
    for (curve, dist) in [
        (id.alpha_cf(), cfg.alpha),
        (id.eta_cf(), cfg.eta),
        (id.epsilon_cf(), cfg.epsilon),
    ] {
        let err = curve.sup_error(4.0, |s| cf_value(&dist, s), |_| false);
        assert!(err < 1e-4, "{dist}: {err}");
        assert!(validate_cf_curve(curve, 1e-3).passed);
    }
}

#[test]
fn monte_carlo_curves_are_valid_and_invertible() {
    let n = ComponentDist::normal(1.0).unwrap();
    let cfg = ModelConfig::new(3.0, n, n, n);
    let samples = sample_components(&cfg, 20_000, 3).unwrap();
    let grid = FreqGrid::with_spacing(2.0, 0.01).unwrap();
    let id = identify_from_samples(&samples, &grid, &IdentifyOptions::default()).unwrap();
    for curve in [id.alpha_cf(), id.eta_cf(), id.epsilon_cf()] {
        assert!(validate_cf_curve(curve, 0.1).passed);
        assert!(curve.sup_error(1.0, |s| cf_value(&n, s), |_| false) < 0.05);
        let est = invert_cf(curve, 2.0, Window::CosineTaper).unwrap();
        assert!((est.mass - 1.0).abs() < 0.05, "{}", est.mass);
    }
}
