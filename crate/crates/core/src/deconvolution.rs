//! Densities from CFs by truncated, windowed Fourier inversion.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexCurve, ComponentDist};
use crate::oracle::{density_value, support};

/// Spectral window applied as `w(s / cutoff)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Sharp,
    #[default]
    CosineTaper,
}

impl Window {
    /// Weight at `u = s / cutoff`, `|u| ≤ 1`.
    pub fn weight(self, u: f64) -> f64 {
        match self {
            Window::Sharp => 1.0,
            Window::CosineTaper => (0.5 * PI * u).cos(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Sharp => "sharp",
            Window::CosineTaper => "cosine_taper",
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(Window::Sharp),
            "cosine_taper" | "cosine" => Ok(Window::CosineTaper),
            other => Err(Error::param("window", format!("unknown window `{other}`"))),
        }
    }
}

/// Uniform grid `x_min, …, x_max` with `n_points` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::param("x_grid", "need finite x_min < x_max"));
        }
        if n_points < 2 {
            return Err(Error::param("x_grid", "need at least two points"));
        }
        Ok(SpatialGrid {
            x_min,
            x_max,
            n_points,
        })
    }

    /// `[-half_width, half_width]` at roughly `spacing`.
    pub fn symmetric(half_width: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::param("x_grid", "spacing must be positive"));
        }
        let half = (half_width / spacing).round().max(1.0) as usize;
        let hw = half as f64 * spacing;
        SpatialGrid::new(-hw, hw, 2 * half + 1)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.value(i)).collect()
    }
}

/// A recovered density with its regularization metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub x_grid: SpatialGrid,
    pub values: Vec<f64>,
    pub cutoff: f64,
    pub window: Window,
    /// `max |Im f(x)|` before taking the real part.
    pub imaginary_residual: f64,
    /// `∫ f dx` on the grid.
    pub mass: f64,
    /// `∫ min(f, 0) dx`, the negative lobes.
    pub negative_mass: f64,
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

impl DensityEstimate {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, f)| (self.x_grid.value(i), *f))
    }

    /// `∫ f` over `[a, b]` by the trapezoid rule on the grid points inside.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let inside: Vec<f64> = self
            .points()
            .filter(|(x, _)| *x >= a && *x <= b)
            .map(|(_, f)| f)
            .collect();
        trapezoid(&inside, self.x_grid.spacing())
    }

    /// Negative lobes clipped to 0 and the rest rescaled to unit mass.
    pub fn normalized(&self) -> DensityEstimate {
        let mut values: Vec<f64> = self.values.iter().map(|v| v.max(0.0)).collect();
        let mass = trapezoid(&values, self.x_grid.spacing());
        if mass > 0.0 {
            values.iter_mut().for_each(|v| *v /= mass);
        }
        DensityEstimate {
            values,
            mass: if mass > 0.0 { 1.0 } else { 0.0 },
            negative_mass: 0.0,
            ..self.clone()
        }
    }
}

/// Default spatial grid for a curve: spacing 0.01 out to the smaller of 10
/// and half the alias-free range `π / h`.
pub fn default_spatial_grid(curve: &ComplexCurve) -> SpatialGrid {
    let half = (0.5 * PI / curve.grid().spacing()).min(10.0);
    SpatialGrid::symmetric(half, 0.01).expect("positive spacing")
}

/// `f(x) = (1/2π) ∫_{|s|≤cutoff} e^{-isx} φ(s) w(s/cutoff) ds` on the default
/// spatial grid.
pub fn invert_cf(curve: &ComplexCurve, cutoff: f64, window: Window) -> Result<DensityEstimate> {
    invert_cf_on(curve, cutoff, window, &default_spatial_grid(curve))
}

pub fn invert_cf_on(
    curve: &ComplexCurve,
    cutoff: f64,
    window: Window,
    x_grid: &SpatialGrid,
) -> Result<DensityEstimate> {
    let grid = curve.grid();
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::param("cutoff", "must be positive"));
    }
    if cutoff > grid.s_max() * (1.0 + 1e-12) {
        return Err(Error::CutoffExceedsGrid {
            cutoff,
            s_max: grid.s_max(),
        });
    }
    let h = grid.spacing();
    let inside: Vec<usize> = (0..grid.len())
        .filter(|&i| grid.value(i).abs() <= cutoff + 1e-9 * h)
        .collect();
    let (first, last) = (inside[0], inside[inside.len() - 1]);
    let terms: Vec<(f64, num_complex::Complex64)> = inside
        .iter()
        .map(|&i| {
            let s = grid.value(i);
            let end = if i == first || i == last { 0.5 } else { 1.0 };
            let w = end * h * window.weight(s / cutoff) / (2.0 * PI);
            (s, curve.value_at(i) * w)
        })
        .collect();
    let complex: Vec<(f64, f64)> = (0..x_grid.n_points)
        .into_par_iter()
        .map(|k| {
            let x = x_grid.value(k);
            let mut re = 0.0;
            let mut im = 0.0;
            for (s, c) in &terms {
                let (sin, cos) = (s * x).sin_cos();
                // c · e^{-isx}
                re += c.re * cos + c.im * sin;
                im += c.im * cos - c.re * sin;
            }
            (re, im)
        })
        .collect();
    let values: Vec<f64> = complex.iter().map(|(re, _)| *re).collect();
    let imaginary_residual = complex.iter().map(|(_, im)| im.abs()).fold(0.0, f64::max);
    let dx = x_grid.spacing();
    let negatives: Vec<f64> = values.iter().map(|v| v.min(0.0)).collect();
    Ok(DensityEstimate {
        x_grid: *x_grid,
        mass: trapezoid(&values, dx),
        negative_mass: trapezoid(&negatives, dx),
        values,
        cutoff,
        window,
        imaginary_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityErrorReport {
    pub sup: f64,
    pub l1: f64,
    /// The compared interval: the grid range intersected with the support.
    pub overlap: (f64, f64),
}

/// Sup-norm and L1 distance to the analytic density, over the overlap of
/// the estimate's grid and the truth's support.
pub fn density_error_report(est: &DensityEstimate, truth: &ComponentDist) -> Result<DensityErrorReport> {
    if !truth.has_density() {
        return Err(Error::NoDensity(truth.kind()));
    }
    let (lo, hi) = support(truth);
    let a = est.x_grid.x_min.max(lo);
    let b = est.x_grid.x_max.min(hi);
    let diffs: Vec<f64> = est
        .points()
        .filter(|(x, _)| *x >= a && *x <= b)
        .map(|(x, f)| (f - density_value(truth, x).unwrap_or(0.0)).abs())
        .collect();
    Ok(DensityErrorReport {
        sup: diffs.iter().cloned().fold(0.0, f64::max),
        l1: trapezoid(&diffs, est.x_grid.spacing()),
        overlap: (a, b),
    })
}
