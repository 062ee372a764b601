//! Integrals of ψ along the real line.
//!
//! Near a simple zero of the CF, ψ behaves like `1/(s - p)`. Those poles are
//! integrated in closed form, and what remains is smooth: it is integrated
//! exactly for its piecewise-linear interpolant (trapezoid rule with
//! interpolated endpoint values). Integrals over adjacent segments add up,
//! so one prefix-sum table serves every segment.

use num_complex::Complex64;

use crate::cf::PsiCurve;
use crate::error::{Error, Result};
use crate::model::FreqGrid;

/// Prefix sums of the trapezoid rule over `ψ(s) - Σ 1/(s - p)`.
///
/// Masked points, and points within 1.5 spacings of a pole, are bridged by
/// linear interpolation between their nearest usable neighbours.
#[derive(Debug)]
pub(crate) struct PsiIntegrator {
    grid: FreqGrid,
    poles: Vec<f64>,
    nodes: Vec<Complex64>,
    prefix: Vec<Complex64>,
}

impl PsiIntegrator {
    /// Subtracts the singular points recorded on `psi`.
    pub fn new(psi: &PsiCurve) -> Self {
        PsiIntegrator::with_poles(psi, psi.singular_points())
    }

    pub fn with_poles(psi: &PsiCurve, poles: &[f64]) -> Self {
        let grid = *psi.grid();
        let n = grid.len();
        let h = grid.spacing();
        let pole_part = |s: f64| poles.iter().map(|p| 1.0 / (s - p)).sum::<f64>();
        let skip: Vec<bool> = (0..n)
            .map(|i| {
                let s = grid.value(i);
                psi.is_masked(i) || poles.iter().any(|p| (s - p).abs() < 1.5 * h)
            })
            .collect();
        let mut nodes: Vec<Complex64> = psi
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| if skip[i] { *v } else { v - pole_part(grid.value(i)) })
            .collect();
        let mut i = 0;
        while i < n {
            if !skip[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < n && skip[i] {
                i += 1;
            }
            let left = start.checked_sub(1);
            let right = (i < n).then_some(i);
            for j in start..i {
                nodes[j] = match (left, right) {
                    (Some(l), Some(r)) => {
                        let t = (j - l) as f64 / (r - l) as f64;
                        nodes[l] * (1.0 - t) + nodes[r] * t
                    }
                    (Some(l), None) => nodes[l],
                    (None, Some(r)) => nodes[r],
                    (None, None) => Complex64::new(0.0, 0.0),
                };
            }
        }
        let mut prefix = Vec::with_capacity(n);
        let mut acc = Complex64::new(0.0, 0.0);
        prefix.push(acc);
        for w in nodes.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            prefix.push(acc);
        }
        PsiIntegrator {
            grid,
            poles: poles.to_vec(),
            nodes,
            prefix,
        }
    }

    pub fn grid(&self) -> &FreqGrid {
        &self.grid
    }

    /// Antiderivative of the smooth part's interpolant, from the left edge.
    fn antiderivative(&self, x: f64) -> Complex64 {
        let n = self.nodes.len();
        let h = self.grid.spacing();
        let pos = self.grid.position(x).clamp(0.0, (n - 1) as f64);
        let j = (pos.floor() as usize).min(n - 2);
        let t = pos - j as f64;
        let (q0, q1) = (self.nodes[j], self.nodes[j + 1]);
        self.prefix[j] + h * (t * q0 + 0.5 * t * t * (q1 - q0))
    }

    /// Oriented integral from `a` to `b`; either order is allowed. The
    /// segment must not contain a pole.
    pub fn integral(&self, a: f64, b: f64) -> Complex64 {
        if a == b {
            return Complex64::new(0.0, 0.0);
        }
        let logs: f64 = self
            .poles
            .iter()
            .map(|p| ((b - p).abs() / (a - p).abs()).ln())
            .sum();
        self.antiderivative(b) - self.antiderivative(a) + logs
    }
}

/// `∫_a^b ψ` over a segment free of the singular points recorded on `psi`.
pub fn integrate_psi_segment(psi: &PsiCurve, a: f64, b: f64) -> Result<Complex64> {
    let grid = psi.grid();
    if !(a.is_finite() && b.is_finite()) || a > b || !grid.contains(a) || !grid.contains(b) {
        return Err(Error::InvalidSegment { a, b });
    }
    if let Some(&point) = psi.singular_points().iter().find(|&&p| a <= p && p <= b) {
        return Err(Error::SegmentCrossesSingular { a, b, point });
    }
    Ok(PsiIntegrator::new(psi).integral(a, b))
}
