//! Empirical CF slices and the ψ ratio curves built from them.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::identification::ZeroSet;
use crate::model::{ComplexCurve, CurveKind, FreqGrid};

/// `Σ_m (cos(s·x_m), sin(s·x_m))` and `Σ_m w_m (cos, sin)` at one frequency.
fn exp_sums(s: f64, anchor: &[f64], weights: Option<&[f64]>) -> (Complex64, Complex64) {
    let mut plain = Complex64::new(0.0, 0.0);
    let mut weighted = Complex64::new(0.0, 0.0);
    match weights {
        None => {
            for &x in anchor {
                let (sin, cos) = (s * x).sin_cos();
                plain.re += cos;
                plain.im += sin;
            }
        }
        Some(w) => {
            for (&x, &y) in anchor.iter().zip(w) {
                let (sin, cos) = (s * x).sin_cos();
                plain.re += cos;
                plain.im += sin;
                weighted.re += y * cos;
                weighted.im += y * sin;
            }
        }
    }
    (plain, weighted)
}

/// Evaluates on `s >= 0` only; negative frequencies follow from the
/// conjugation rules of real data, which keeps outputs exactly Hermitian.
fn half_grid_sums(grid: &FreqGrid, anchor: &[f64], weights: Option<&[f64]>) -> Vec<(Complex64, Complex64)> {
    let z = grid.zero_index();
    (z..grid.len())
        .into_par_iter()
        .map(|i| exp_sums(grid.value(i), anchor, weights))
        .collect()
}

/// Empirical CF `(1/n) Σ exp(i s x_m)`.
pub fn ecf(column: &[f64], grid: &FreqGrid) -> Result<ComplexCurve> {
    if column.is_empty() {
        return Err(Error::EmptyInput("ecf column"));
    }
    let n = column.len() as f64;
    let half: Vec<Complex64> = half_grid_sums(grid, column, None)
        .into_iter()
        .map(|(p, _)| p / n)
        .collect();
    Ok(ComplexCurve::from_half(*grid, CurveKind::Cf, &half, |v| v.conj()))
}

/// Sample analogue of `∂/∂s φ_Y` along a slice:
/// `(1/n) Σ i·y_first,m · exp(i r y_anchor,m)`.
pub fn ecf_partial_first(y_first: &[f64], y_anchor: &[f64], grid: &FreqGrid) -> Result<ComplexCurve> {
    Ok(ecf_with_partial(y_first, y_anchor, grid)?.1)
}

/// [`ecf`] of the anchor and [`ecf_partial_first`] in one pass over the data.
pub fn ecf_with_partial(
    y_first: &[f64],
    y_anchor: &[f64],
    grid: &FreqGrid,
) -> Result<(ComplexCurve, ComplexCurve)> {
    if y_first.len() != y_anchor.len() {
        return Err(Error::LengthMismatch {
            left: y_first.len(),
            right: y_anchor.len(),
        });
    }
    if y_anchor.is_empty() {
        return Err(Error::EmptyInput("ecf_partial_first columns"));
    }
    let n = y_anchor.len() as f64;
    let sums = half_grid_sums(grid, y_anchor, Some(y_first));
    let cf: Vec<Complex64> = sums.iter().map(|(p, _)| p / n).collect();
    // i·(a + ib) = -b + ia
    let der: Vec<Complex64> = sums
        .iter()
        .map(|(_, w)| Complex64::new(-w.im, w.re) / n)
        .collect();
    Ok((
        ComplexCurve::from_half(*grid, CurveKind::Cf, &cf, |v| v.conj()),
        // E[iY e^{-irX}] = -conj(E[iY e^{irX}])
        ComplexCurve::from_half(*grid, CurveKind::Derivative, &der, |v| -v.conj()),
    ))
}

/// A ψ ratio curve: derivative slice over CF slice, zero on masked points.
///
/// `zero_mask` marks the grid points nearest to detected zeros of the
/// denominator. `singular` lists the zeros classified as singular, once
/// classification has run.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiCurve {
    grid: FreqGrid,
    values: Vec<Complex64>,
    zero_mask: Vec<bool>,
    singular: Vec<f64>,
}

impl PsiCurve {
    pub fn new(grid: FreqGrid, values: Vec<Complex64>, zero_mask: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || zero_mask.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: values.len().max(zero_mask.len()),
                right: grid.len(),
            });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::param("psi", "values must be finite"));
        }
        let values = values
            .into_iter()
            .zip(&zero_mask)
            .map(|(v, &m)| if m { Complex64::new(0.0, 0.0) } else { v })
            .collect();
        Ok(PsiCurve {
            grid,
            values,
            zero_mask,
            singular: Vec::new(),
        })
    }

    pub fn grid(&self) -> &FreqGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn zero_mask(&self) -> &[bool] {
        &self.zero_mask
    }

    pub fn is_masked(&self, i: usize) -> bool {
        self.zero_mask[i]
    }

    /// Singular points recorded by classification, ascending.
    pub fn singular_points(&self) -> &[f64] {
        &self.singular
    }

    pub fn with_singular_points(mut self, mut points: Vec<f64>) -> Self {
        points.sort_by(f64::total_cmp);
        self.singular = points;
        self
    }

    /// `ψ̃(u) = -ψ(-u)`: the log-derivative of `u ↦ φ(-u)`. Maps the
    /// negative half-axis onto the positive one.
    pub fn mirrored(&self) -> PsiCurve {
        let g = self.grid;
        let n = g.len();
        let values = (0..n).map(|i| -self.values[g.mirror(i)]).collect();
        let zero_mask = (0..n).map(|i| self.zero_mask[g.mirror(i)]).collect();
        let mut singular: Vec<f64> = self.singular.iter().map(|p| -p).collect();
        singular.sort_by(f64::total_cmp);
        PsiCurve {
            grid: g,
            values,
            zero_mask,
            singular,
        }
    }
}

/// Pointwise `num / den` off the zeros of `den`, exactly 0 on them.
pub fn psi_from_curves(num: &ComplexCurve, den: &ComplexCurve, zeros: &ZeroSet) -> Result<PsiCurve> {
    if !num.grid().same_as(den.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = *den.grid();
    let mut mask = vec![false; grid.len()];
    for z in zeros.points() {
        if z.grid_index < mask.len() {
            mask[z.grid_index] = true;
        }
    }
    let values = num
        .values()
        .iter()
        .zip(den.values())
        .zip(mask.iter_mut())
        .map(|((n, d), m)| {
            if *m {
                return Complex64::new(0.0, 0.0);
            }
            let q = n / d;
            if q.re.is_finite() && q.im.is_finite() {
                q
            } else {
                // Exact zero of the denominator that detection did not report.
                *m = true;
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    PsiCurve::new(grid, values, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identification::zeros::ZeroPoint;
    use crate::model::validate_cf_curve;
    use crate::model::ComponentDist;
    use crate::simulator::{component_rng, draw, LatentComponent};
    use std::f64::consts::PI;

    fn normal_draws(n: usize, seed: u64) -> Vec<f64> {
        let d = ComponentDist::normal(1.0).unwrap();
        let mut rng = component_rng(seed, LatentComponent::AlphaI);
        (0..n).map(|_| draw(&d, &mut rng)).collect()
    }

    #[test]
    fn ecf_of_point_mass_is_one() {
        let g = FreqGrid::with_spacing(5.0, 0.1).unwrap();
        let c = ecf(&[0.0; 10], &g).unwrap();
        assert!(c.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert!(ecf(&[], &g).is_err());
    }

    #[test]
    fn ecf_of_symmetric_pair_is_cosine() {
        let g = FreqGrid::with_spacing(6.0, 0.05).unwrap();
        let c = ecf(&[-1.0, 1.0], &g).unwrap();
        for (s, v) in c.points() {
            assert!((v - Complex64::new(s.cos(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn ecf_tracks_normal_cf() {
        let xs = normal_draws(200_000, 31);
        let g = FreqGrid::with_spacing(3.0, 0.01).unwrap();
        let c = ecf(&xs, &g).unwrap();
        let err = c.sup_error(3.0, |s| Complex64::new((-s * s / 2.0).exp(), 0.0), |_| false);
        assert!(err <= 0.02, "{err}");
        assert!(validate_cf_curve(&c, 1e-12).passed);
    }

    #[test]
    fn partial_rejects_bad_input() {
        let g = FreqGrid::with_spacing(1.0, 0.1).unwrap();
        assert!(matches!(
            ecf_partial_first(&[1.0], &[1.0, 2.0], &g),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(ecf_partial_first(&[], &[], &g).is_err());
        let d = ecf_partial_first(&[0.0; 4], &[1.0, 2.0, 3.0, 4.0], &g).unwrap();
        assert!(d.values().iter().all(|v| v.norm() == 0.0));
        assert_eq!(d.kind(), CurveKind::Derivative);
    }

    #[test]
    fn partial_matches_finite_difference_of_ecf() {
        let xs = normal_draws(2_000, 4);
        let g = FreqGrid::with_spacing(3.0, 0.01).unwrap();
        let h = g.spacing();
        let d = ecf_partial_first(&xs, &xs, &g).unwrap();
        let at = |s: f64| {
            xs.iter()
                .map(|x| Complex64::new(0.0, s * x).exp())
                .sum::<Complex64>()
                / xs.len() as f64
        };
        for (s, v) in d.points().step_by(37) {
            let fd = (at(s + h / 2.0) - at(s - h / 2.0)) / h;
            assert!((v - fd).norm() < 1e-4, "{s}: {v} vs {fd}");
        }
    }

    #[test]
    fn scaling_data_rescales_frequency() {
        let xs = normal_draws(500, 8);
        let lambda = 2.0;
        let scaled: Vec<f64> = xs.iter().map(|x| lambda * x).collect();
        let g = FreqGrid::new(2.0, 41).unwrap();
        let g2 = FreqGrid::new(4.0, 41).unwrap();
        let a = ecf(&scaled, &g).unwrap();
        let b = ecf(&xs, &g2).unwrap();
        for (va, vb) in a.values().iter().zip(b.values()) {
            assert!((va - vb).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_of_gaussian_is_linear() {
        let g = FreqGrid::with_spacing(4.0, 0.01).unwrap();
        let den = ComplexCurve::from_fn(g, CurveKind::Cf, |s| Complex64::new((-s * s / 2.0).exp(), 0.0));
        let num = ComplexCurve::from_fn(g, CurveKind::Derivative, |s| {
            Complex64::new(-s * (-s * s / 2.0).exp(), 0.0)
        });
        let psi = psi_from_curves(&num, &den, &ZeroSet::empty(g.spacing())).unwrap();
        for (i, v) in psi.values().iter().enumerate() {
            assert!((v - Complex64::new(-g.value(i), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_denominator_returns_numerator() {
        let g = FreqGrid::with_spacing(2.0, 0.1).unwrap();
        let den = ComplexCurve::from_fn(g, CurveKind::Cf, |_| Complex64::new(1.0, 0.0));
        let num = ComplexCurve::from_fn(g, CurveKind::Derivative, |s| Complex64::new(s.sin(), s * s));
        let psi = psi_from_curves(&num, &den, &ZeroSet::empty(g.spacing())).unwrap();
        assert_eq!(psi.values(), num.values());
    }

    #[test]
    fn masked_zero_of_sinc_denominator() {
        let g = FreqGrid::with_spacing(4.0, 0.01).unwrap();
        let u = ComponentDist::uniform_symmetric(1.0).unwrap();
        let den = crate::oracle::analytic_cf(&u, &g);
        let num = crate::oracle::analytic_cf_deriv(&u, &g);
        let idx = g.nearest_index(PI);
        let zeros = ZeroSet::from_points(
            vec![ZeroPoint {
                location: PI,
                grid_index: idx,
                modulus: den.value_at(idx).norm(),
            }],
            g.spacing(),
        );
        let psi = psi_from_curves(&num, &den, &zeros).unwrap();
        assert!(psi.is_masked(idx));
        assert_eq!(psi.values()[idx], Complex64::new(0.0, 0.0));
        assert!(psi.values().iter().all(|v| v.re.is_finite()));
        // |cot s - 1/s| grows toward π from either side.
        let near = |k: usize| psi.values()[k].norm();
        assert!(near(idx - 1) > near(idx - 5) && near(idx - 5) > near(idx - 20));
        assert!(near(idx + 1) > near(idx + 5) && near(idx + 5) > near(idx + 20));
        assert!(near(idx + 1) > 50.0);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let g1 = FreqGrid::new(1.0, 11).unwrap();
        let g2 = FreqGrid::new(1.0, 21).unwrap();
        let a = ComplexCurve::from_fn(g1, CurveKind::Cf, |_| Complex64::new(1.0, 0.0));
        let b = ComplexCurve::from_fn(g2, CurveKind::Cf, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(
            psi_from_curves(&a, &b, &ZeroSet::empty(0.1)),
            Err(Error::GridMismatch)
        ));
    }
}
