//! The idiosyncratic error CF by division: `φ_ε = φ_y / (φ_α φ_η)`.

use num_complex::Complex64;
use serde::Serialize;

use super::continuity::{fill_windows, Window};
use super::zeros::ZeroSet;
use crate::error::{Error, Result};
use crate::model::{ComplexCurve, CurveKind};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonOptions {
    /// Unmasked points where `|φ_α φ_η|` falls below this are masked too.
    pub floor: f64,
    /// Radius of the window refilled around each zero; `None` means two grid
    /// spacings.
    pub mask_radius: Option<f64>,
}

impl Default for EpsilonOptions {
    fn default() -> Self {
        EpsilonOptions {
            floor: 1e-12,
            mask_radius: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonResult {
    #[serde(skip)]
    pub curve: ComplexCurve,
    pub floor: f64,
    pub mask_radius: f64,
    /// Refilled index windows as `(from, to)` frequencies on `s ≥ 0`.
    pub filled: Vec<(f64, f64)>,
    /// Frequencies `s > 0` added to the mask by the floor.
    pub floor_masked: Vec<f64>,
    /// From here outward (in `|s|`) the denominator stays at the floor and
    /// the curve is set to 0.
    pub truncated_from: Option<f64>,
    pub warnings: Vec<String>,
}

/// Pointwise division off `zeros_union`, refilled by continuity, anchored at
/// `φ_ε(0) = 1`.
pub fn identify_epsilon(
    phi_y: &ComplexCurve,
    phi_alpha: &ComplexCurve,
    phi_eta: &ComplexCurve,
    zeros_union: &ZeroSet,
) -> Result<ComplexCurve> {
    Ok(identify_epsilon_with(phi_y, phi_alpha, phi_eta, zeros_union, &EpsilonOptions::default())?.curve)
}

/// Consecutive runs of `true` as inclusive index ranges.
fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < flags.len() {
        if flags[i] {
            let start = i;
            while i < flags.len() && flags[i] {
                i += 1;
            }
            out.push((start, i - 1));
        } else {
            i += 1;
        }
    }
    out
}

pub fn identify_epsilon_with(
    phi_y: &ComplexCurve,
    phi_alpha: &ComplexCurve,
    phi_eta: &ComplexCurve,
    zeros_union: &ZeroSet,
    opts: &EpsilonOptions,
) -> Result<EpsilonResult> {
    let grid = *phi_y.grid();
    if !grid.same_as(phi_alpha.grid()) || !grid.same_as(phi_eta.grid()) {
        return Err(Error::GridMismatch);
    }
    if !(opts.floor >= 0.0) {
        return Err(Error::param("floor", "must be non-negative"));
    }
    let h = grid.spacing();
    let radius = opts.mask_radius.unwrap_or(2.0 * h);
    let z = grid.zero_index();
    let len = z + 1;
    let at = |c: &ComplexCurve, k: usize| c.value_at(z + k);

    let positive: Vec<f64> = zeros_union.locations().into_iter().filter(|&s| s > 0.0).collect();
    let mut in_zero_window = vec![false; len];
    let reach = radius / h;
    for u in positive {
        let pos = u / h;
        let lo = (pos - reach).ceil().min(pos.round()).max(0.0) as usize;
        let hi = ((pos + reach).floor().max(pos.round()) as usize).min(len - 1);
        in_zero_window[lo..=hi].iter_mut().for_each(|m| *m = true);
    }

    let mut values = vec![Complex64::new(0.0, 0.0); len];
    let mut floor_flags = vec![false; len];
    for k in 0..len {
        let den = at(phi_alpha, k) * at(phi_eta, k);
        if in_zero_window[k] {
            continue;
        }
        if den.norm() < opts.floor || den.norm() == 0.0 {
            floor_flags[k] = true;
            continue;
        }
        values[k] = at(phi_y, k) / den;
    }
    let floor_masked: Vec<f64> = (0..len)
        .filter(|&k| floor_flags[k])
        .map(|k| k as f64 * h)
        .collect();
    let mut warnings = Vec::new();
    if !floor_masked.is_empty() {
        warnings.push(format!(
            "{} frequencies masked where |φ_α φ_η| < {:e}, first at s = {:.4}",
            floor_masked.len(),
            opts.floor,
            floor_masked[0]
        ));
    }

    // Every masked index, then grouped into windows; windows closer than two
    // clean points are merged, and a window that cannot be refilled from the
    // right (edge) starts the truncated tail.
    let mut masked = in_zero_window.clone();
    for k in 0..len {
        masked[k] |= floor_flags[k];
    }
    let mut windows: Vec<(usize, usize)> = Vec::new();
    for (lo, hi) in runs(&masked) {
        match windows.last_mut() {
            Some(last) if lo < last.1 + 3 => last.1 = hi,
            _ => windows.push((lo, hi)),
        }
    }
    let mut truncated_from = None;
    if let Some(pos) = windows.iter().position(|&(_, hi)| hi + 2 >= len) {
        let lo = windows[pos].0;
        truncated_from = Some(lo as f64 * h);
        windows.truncate(pos);
        values[lo..]
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        warnings.push(format!("curve truncated to 0 for |s| >= {:.4}", lo as f64 * h));
    }
    if let Some(&(lo, _)) = windows.first() {
        if lo < 2 {
            return Err(Error::MaskAtEdge { point: lo as f64 * h });
        }
    }
    let fill: Vec<Window> = windows
        .iter()
        .map(|&(lo, hi)| Window {
            lo,
            hi,
            centre: 0.5 * (lo + hi) as f64 * h,
        })
        .collect();
    fill_windows(&mut values, |k| k as f64 * h, &fill);

    let anchor = values[0];
    if anchor.norm() == 0.0 || !anchor.re.is_finite() {
        return Err(Error::param("phi_y", "ratio at s = 0 is not usable"));
    }
    for v in values.iter_mut() {
        *v /= anchor;
    }
    values[0] = Complex64::new(1.0, 0.0);

    Ok(EpsilonResult {
        curve: ComplexCurve::from_half(grid, CurveKind::Cf, &values, |v| v.conj()),
        floor: opts.floor,
        mask_radius: radius,
        filled: windows
            .iter()
            .map(|&(lo, hi)| (lo as f64 * h, hi as f64 * h))
            .collect(),
        floor_masked,
        truncated_from,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identification::zeros::ZeroPoint;
    use crate::model::{validate_cf_curve, FreqGrid};
    use std::f64::consts::PI;

    fn real(g: FreqGrid, f: impl Fn(f64) -> f64) -> ComplexCurve {
        ComplexCurve::from_fn(g, CurveKind::Cf, |s| Complex64::new(f(s), 0.0))
    }

    #[test]
    fn exact_division_of_normals() {
        let g = FreqGrid::with_spacing(4.0, 0.01).unwrap();
        let y = real(g, |s| (-1.5 * s * s).exp());
        let a = real(g, |s| (-0.5 * s * s).exp());
        let e = identify_epsilon(&y, &a, &a, &ZeroSet::empty(0.01)).unwrap();
        let err = e.sup_error(4.0, |s| Complex64::new((-0.5 * s * s).exp(), 0.0), |_| false);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn inconsistent_inputs_fail_validation() {
        let g = FreqGrid::with_spacing(3.0, 0.01).unwrap();
        let a = real(g, |s| (-0.5 * s * s).exp());
        let e = identify_epsilon(&a, &a, &a, &ZeroSet::empty(0.01)).unwrap();
        let report = validate_cf_curve(&e, 1e-3);
        assert!(!report.passed);
        assert!(report.modulus > 1.0);
    }

    #[test]
    fn refills_zero_of_uniform_error() {
        let g = FreqGrid::with_spacing(6.0, 0.01).unwrap();
        let sinc = |s: f64| if s == 0.0 { 1.0 } else { s.sin() / s };
        let gauss = |s: f64| (-0.5 * s * s).exp();
        let y = real(g, |s| sinc(s) * gauss(s) * gauss(s));
        let a = real(g, gauss);
        let zeros = ZeroSet::from_points(
            [-PI, PI]
                .iter()
                .map(|&location| ZeroPoint {
                    location,
                    grid_index: g.nearest_index(location),
                    modulus: 0.0,
                })
                .collect(),
            0.01,
        );
        let e = identify_epsilon(&y, &a, &a, &zeros).unwrap();
        let err = e.sup_error(5.0, |s| Complex64::new(sinc(s), 0.0), |_| false);
        assert!(err < 1e-3, "{err}");
        for i in 0..g.len() {
            assert_eq!(e.value_at(g.mirror(i)), e.value_at(i).conj());
        }
    }

    #[test]
    fn floor_truncates_the_tail() {
        let g = FreqGrid::with_spacing(8.0, 0.01).unwrap();
        let a = real(g, |s| (-0.5 * s * s).exp());
        let y = real(g, |s| (-1.5 * s * s).exp());
        let r = identify_epsilon_with(&y, &a, &a, &ZeroSet::empty(0.01), &EpsilonOptions::default()).unwrap();
        let cut = r.truncated_from.unwrap();
        // exp(-s²) < 1e-12 beyond s ≈ 5.26
        assert!((cut - 5.26).abs() < 0.02, "{cut}");
        assert!(!r.warnings.is_empty());
        assert_eq!(
            r.curve.value_at(r.curve.grid().len() - 1),
            Complex64::new(0.0, 0.0)
        );
    }
}
