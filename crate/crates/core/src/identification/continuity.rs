//! Refilling masked windows by cubic interpolation.

use num_complex::Complex64;

use super::zeros::ZeroSet;
use crate::error::{Error, Result};
use crate::model::{ComplexCurve, FreqGrid};

/// Inclusive index range `[lo, hi]` of one masked window on some axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Window {
    pub lo: usize,
    pub hi: usize,
    pub centre: f64,
}

/// Windows of grid points within `radius` of each centre (at least the
/// nearest point). `position(s)` maps a location to fractional index units on
/// an axis with `len` points. Windows must leave two clean points on each side
/// and between each other.
pub(crate) fn windows_on_axis(
    centres: &[f64],
    radius: f64,
    len: usize,
    spacing: f64,
    position: impl Fn(f64) -> f64,
) -> Result<Vec<Window>> {
    let mut out: Vec<Window> = Vec::with_capacity(centres.len());
    let mut sorted = centres.to_vec();
    sorted.sort_by(f64::total_cmp);
    let reach = radius / spacing;
    for c in sorted {
        let pos = position(c);
        let near = pos.round();
        let lo = (pos - reach).ceil().min(near);
        let hi = (pos + reach).floor().max(near);
        if lo < 2.0 || hi > len as f64 - 3.0 {
            return Err(Error::MaskAtEdge { point: c });
        }
        let w = Window {
            lo: lo as usize,
            hi: hi as usize,
            centre: c,
        };
        if let Some(prev) = out.last() {
            if w.lo < prev.hi + 3 {
                return Err(Error::MaskNotIsolated {
                    first: prev.centre,
                    second: c,
                });
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Cubic Lagrange interpolation through the two clean points on each side of
/// every window. `xs(i)` is the abscissa of index `i`.
pub(crate) fn fill_windows(values: &mut [Complex64], xs: impl Fn(usize) -> f64, windows: &[Window]) {
    for w in windows {
        let nodes = [w.lo - 2, w.lo - 1, w.hi + 1, w.hi + 2];
        let x: [f64; 4] = nodes.map(&xs);
        let y: [Complex64; 4] = nodes.map(|i| values[i]);
        for i in w.lo..=w.hi {
            let t = xs(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                let mut weight = 1.0;
                for b in 0..4 {
                    if a != b {
                        weight *= (t - x[b]) / (x[a] - x[b]);
                    }
                }
                acc += y[a] * weight;
            }
            values[i] = acc;
        }
    }
}

pub(crate) fn grid_windows(grid: &FreqGrid, centres: &[f64], radius: f64) -> Result<Vec<Window>> {
    windows_on_axis(centres, radius, grid.len(), grid.spacing(), |s| grid.position(s))
}

/// Refills the grid points within two spacings of each masked location.
pub fn extend_by_continuity(curve: &ComplexCurve, masked: &ZeroSet) -> Result<ComplexCurve> {
    extend_by_continuity_within(curve, masked, 2.0 * curve.grid().spacing())
}

/// Refills every grid point within `radius` of a masked location (at least
/// the nearest point) by a cubic through two clean points on either side.
pub fn extend_by_continuity_within(
    curve: &ComplexCurve,
    masked: &ZeroSet,
    radius: f64,
) -> Result<ComplexCurve> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::param("radius", "must be finite and non-negative"));
    }
    let grid = *curve.grid();
    let windows = grid_windows(&grid, &masked.locations(), radius)?;
    let mut values = curve.values().to_vec();
    fill_windows(&mut values, |i| grid.value(i), &windows);
    ComplexCurve::new(grid, values, curve.kind())
}
