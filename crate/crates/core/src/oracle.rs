//! Closed-form characteristic functions, their derivatives and densities for
//! every supported law, and the φ_Y slices they compose into.

use num_complex::Complex64;

use crate::model::{ComplexCurve, ComponentDist, CurveKind, DistKind, FreqGrid, ModelConfig};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `φ(s) = E exp(isX)`.
pub fn cf_value(dist: &ComponentDist, s: f64) -> Complex64 {
    let a = dist.scale();
    match dist.kind() {
        DistKind::Normal => real((-0.5 * a * a * s * s).exp()),
        DistKind::Laplace => real(1.0 / (1.0 + a * a * s * s)),
        DistKind::UniformSymmetric => {
            let x = a * s;
            if x.abs() < 1e-4 {
                let x2 = x * x;
                real(1.0 - x2 / 6.0 + x2 * x2 / 120.0)
            } else {
                real(x.sin() / x)
            }
        }
        DistKind::TwoPointSymmetric => real((a * s).cos()),
        DistKind::ShiftedExponential => (-I * (a * s)).exp() / (1.0 - I * (a * s)),
    }
}

/// `φ'(s) = E[iX exp(isX)]`.
pub fn cf_deriv_value(dist: &ComponentDist, s: f64) -> Complex64 {
    let a = dist.scale();
    match dist.kind() {
        DistKind::Normal => real(-a * a * s * (-0.5 * a * a * s * s).exp()),
        DistKind::Laplace => {
            let d = 1.0 + a * a * s * s;
            real(-2.0 * a * a * s / (d * d))
        }
        DistKind::UniformSymmetric => {
            let x = a * s;
            if x.abs() < 1e-4 {
                // d/ds of 1 - x²/6 + x⁴/120
                real(a * (-x / 3.0 + x * x * x / 30.0))
            } else {
                real((x.cos() - x.sin() / x) / s)
            }
        }
        DistKind::TwoPointSymmetric => real(-a * (a * s).sin()),
        DistKind::ShiftedExponential => {
            let h = 1.0 / (1.0 - I * (a * s));
            -(a * a * s) * (-I * (a * s)).exp() * h * h
        }
    }
}

/// Density at `x`, or `None` for laws without one.
pub fn density_value(dist: &ComponentDist, x: f64) -> Option<f64> {
    if !dist.has_density() {
        return None;
    }
    let a = dist.scale();
    Some(match dist.kind() {
        DistKind::Normal => (-0.5 * (x / a).powi(2)).exp() / (a * (2.0 * std::f64::consts::PI).sqrt()),
        DistKind::Laplace => (-(x.abs()) / a).exp() / (2.0 * a),
        DistKind::UniformSymmetric => {
            if x.abs() <= a {
                0.5 / a
            } else {
                0.0
            }
        }
        DistKind::ShiftedExponential => {
            if x >= -a {
                (-(x + a) / a).exp() / a
            } else {
                0.0
            }
        }
        DistKind::TwoPointSymmetric => unreachable!(),
    })
}

/// Support of the law as `(lower, upper)`.
pub fn support(dist: &ComponentDist) -> (f64, f64) {
    let a = dist.scale();
    match dist.kind() {
        DistKind::Normal | DistKind::Laplace => (f64::NEG_INFINITY, f64::INFINITY),
        DistKind::UniformSymmetric | DistKind::TwoPointSymmetric => (-a, a),
        DistKind::ShiftedExponential => (-a, f64::INFINITY),
    }
}

pub fn analytic_cf(dist: &ComponentDist, grid: &FreqGrid) -> ComplexCurve {
    ComplexCurve::from_fn(*grid, CurveKind::Cf, |s| cf_value(dist, s))
}

pub fn analytic_cf_deriv(dist: &ComponentDist, grid: &FreqGrid) -> ComplexCurve {
    ComplexCurve::from_fn(*grid, CurveKind::Derivative, |s| cf_deriv_value(dist, s))
}

/// The five slices of φ_Y used by identification.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiYSlices {
    /// `φ_Y(0,0,r) = φ_η(r) φ_ε(r) φ_α(r)`, the CF of `y_il`.
    pub curve_00r: ComplexCurve,
    /// `φ_Y(0,t,0) = φ_α(t) φ_ε(t) φ_η(t)`, the CF of `y_kj`.
    pub curve_0t0: ComplexCurve,
    /// `φ_{y_ij}(s) = φ_α(s) φ_η(s) φ_ε(s)`.
    pub curve_s00: ComplexCurve,
    /// `∂/∂s φ_Y(0,0,r) = φ_η(r) φ_ε(r) φ'_α(r)`.
    pub dcurve_00r: ComplexCurve,
    /// `∂/∂s φ_Y(0,t,0) = φ_α(t) φ_ε(t) φ'_η(t)`.
    pub dcurve_0t0: ComplexCurve,
}

/// Noise-free slices from the factorization of the joint CF under
/// independence. The intercept is omitted (the sample pipeline centers it out).
pub fn compose_phi_y_slices(config: &ModelConfig, grid: &FreqGrid) -> PhiYSlices {
    let (al, et, ep) = (&config.alpha, &config.eta, &config.epsilon);
    let cf = |f: &dyn Fn(f64) -> Complex64| ComplexCurve::from_fn(*grid, CurveKind::Cf, f);
    let der = |f: &dyn Fn(f64) -> Complex64| ComplexCurve::from_fn(*grid, CurveKind::Derivative, f);
    let all = |s: f64| cf_value(al, s) * cf_value(et, s) * cf_value(ep, s);
    PhiYSlices {
        curve_00r: cf(&|r| cf_value(et, r) * cf_value(ep, r) * cf_value(al, r)),
        curve_0t0: cf(&|t| cf_value(al, t) * cf_value(ep, t) * cf_value(et, t)),
        curve_s00: cf(&all),
        dcurve_00r: der(&|r| cf_value(et, r) * cf_value(ep, r) * cf_deriv_value(al, r)),
        dcurve_0t0: der(&|t| cf_value(al, t) * cf_value(ep, t) * cf_deriv_value(et, t)),
    }
}
