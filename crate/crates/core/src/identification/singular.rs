//! Singular versus removable zeros of a ψ denominator.

use num_complex::Complex64;
use serde::Serialize;

use super::zeros::ZeroSet;
use crate::cf::PsiCurve;
use crate::error::{Error, Result};

/// Ordered singular points with the origin as the implicit `s(0) = 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SingularSet {
    /// `s(1) < s(2) < …`
    positive: Vec<f64>,
    /// `s(-1) > s(-2) > …`, stored nearest-to-origin first.
    negative: Vec<f64>,
}

impl SingularSet {
    pub fn empty() -> Self {
        SingularSet::default()
    }

    /// Splits `points` by sign. Zero is never singular (`φ(0) = 1`) and is
    /// rejected.
    pub fn from_points(points: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for p in points {
            if !p.is_finite() || p == 0.0 {
                return Err(Error::param("singular", format!("invalid singular point {p}")));
            }
            if p > 0.0 {
                positive.push(p);
            } else {
                negative.push(p);
            }
        }
        positive.sort_by(f64::total_cmp);
        negative.sort_by(|a, b| b.total_cmp(a));
        positive.dedup();
        negative.dedup();
        Ok(SingularSet { positive, negative })
    }

    pub fn positive(&self) -> &[f64] {
        &self.positive
    }

    /// Negative points, nearest to the origin first.
    pub fn negative(&self) -> &[f64] {
        &self.negative
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points ascending.
    pub fn all(&self) -> Vec<f64> {
        self.negative
            .iter()
            .rev()
            .chain(&self.positive)
            .copied()
            .collect()
    }

    /// The enumeration `s(k)`: `s(0) = 0`, positive `k` counts up from the
    /// origin, negative `k` counts down. `None` past either end.
    pub fn s(&self, k: i64) -> Option<f64> {
        match k {
            0 => Some(0.0),
            k if k > 0 => self.positive.get(k as usize - 1).copied(),
            k => self.negative.get((-k) as usize - 1).copied(),
        }
    }

    /// `k̄(s)`: for `s ≥ 0` the largest `k ≥ 0` with `s(k) ≤ s`; for `s < 0`
    /// the mirror-image count, negated.
    pub fn k_bar(&self, s: f64) -> i64 {
        if s >= 0.0 {
            self.positive.iter().take_while(|&&p| p <= s).count() as i64
        } else {
            -(self.negative.iter().take_while(|&&p| p >= s).count() as i64)
        }
    }

    /// The same set reflected through the origin.
    pub fn mirrored(&self) -> SingularSet {
        SingularSet {
            positive: self.negative.iter().map(|p| -p).collect(),
            negative: self.positive.iter().map(|p| -p).collect(),
        }
    }
}

/// Tuning for [`classify_zeros`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    /// Unmasked grid points examined on each side of a zero.
    pub window: usize,
    pub blowup_factor: f64,
    /// Half-width in grid points of the region supplying the baseline.
    pub region: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            window: 5,
            blowup_factor: 10.0,
            region: 100,
        }
    }
}

/// Evidence behind one singular/removable decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroClassification {
    pub location: f64,
    pub grid_index: usize,
    pub singular: bool,
    /// Smaller of the per-side maxima of `|ψ|` next to the zero.
    pub peak: f64,
    /// Median `|ψ|` over the surrounding region.
    pub baseline: f64,
    /// Median of `(s - z)·ψ(s)` over the window: the pole order (close to 1
    /// for a simple zero) when singular, close to 0 when removable.
    pub residue: Complex64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn median_complex(xs: &[Complex64]) -> Complex64 {
    Complex64::new(
        median(xs.iter().map(|z| z.re).collect()),
        median(xs.iter().map(|z| z.im).collect()),
    )
}

/// Classifies every zero in `zeros`.
///
/// A zero is singular when `|ψ|` on each side of it, over the nearest
/// `window` unmasked grid points, climbs above `blowup_factor` times the
/// median `|ψ|` of the surrounding region.
pub fn classify_zeros(
    psi: &PsiCurve,
    zeros: &ZeroSet,
    opts: &ClassifyOptions,
) -> Result<Vec<ZeroClassification>> {
    if opts.window == 0 {
        return Err(Error::param("window", "must be at least 1"));
    }
    if !(opts.blowup_factor > 0.0) {
        return Err(Error::param("blowup_factor", "must be positive"));
    }
    let grid = psi.grid();
    let n = grid.len();
    let values = psi.values();
    let indices: Vec<usize> = zeros.points().iter().map(|z| z.grid_index).collect();
    let region = opts.region.max(2 * opts.window + 1);

    let mut out = Vec::with_capacity(indices.len());
    for (idx, z) in zeros.points().iter().enumerate() {
        let g = z.grid_index;
        // Neighbouring zeros bound both the window and the baseline region.
        let left_bound = if idx > 0 { Some(indices[idx - 1]) } else { None };
        let right_bound = indices.get(idx + 1).copied();
        let reaches = |other: Option<usize>| other.is_some_and(|o| o.abs_diff(g) <= opts.window + 1);
        if reaches(left_bound) || reaches(right_bound) {
            return Err(Error::WindowReachesZero { zero: z.location });
        }

        let side = |step: isize| -> Vec<usize> {
            let mut picked = Vec::new();
            let mut i = g as isize + step;
            while picked.len() < opts.window && i >= 0 && (i as usize) < n {
                if !psi.is_masked(i as usize) {
                    picked.push(i as usize);
                }
                i += step;
            }
            picked
        };
        let (left, right) = (side(-1), side(1));
        if left.is_empty() && right.is_empty() {
            return Err(Error::WindowReachesZero { zero: z.location });
        }
        let side_peak = |pts: &[usize]| pts.iter().map(|&i| values[i].norm()).fold(0.0, f64::max);
        let peak = match (left.is_empty(), right.is_empty()) {
            (false, false) => side_peak(&left).min(side_peak(&right)),
            (true, _) => side_peak(&right),
            (_, true) => side_peak(&left),
        };

        let lo = match left_bound {
            Some(b) => g.saturating_sub(region).max((b + g) / 2 + 1),
            None => g.saturating_sub(region),
        };
        let hi = match right_bound {
            Some(b) => (g + region).min((b + g) / 2),
            None => (g + region).min(n - 1),
        };
        let baseline = median(
            (lo..=hi)
                .filter(|&i| i.abs_diff(g) > opts.window && !psi.is_masked(i))
                .map(|i| values[i].norm())
                .collect(),
        );

        let near: Vec<Complex64> = left
            .iter()
            .chain(&right)
            .map(|&i| values[i] * (grid.value(i) - z.location))
            .collect();
        out.push(ZeroClassification {
            location: z.location,
            grid_index: g,
            singular: peak > opts.blowup_factor * baseline,
            peak,
            baseline,
            residue: median_complex(&near),
        });
    }
    Ok(out)
}

/// The singular subset of `zeros`.
pub fn classify_singular(
    psi: &PsiCurve,
    zeros: &ZeroSet,
    window: usize,
    blowup_factor: f64,
) -> Result<SingularSet> {
    let opts = ClassifyOptions {
        window,
        blowup_factor,
        ..ClassifyOptions::default()
    };
    singular_subset(&classify_zeros(psi, zeros, &opts)?)
}

pub(crate) fn singular_subset(report: &[ZeroClassification]) -> Result<SingularSet> {
    SingularSet::from_points(report.iter().filter(|c| c.singular).map(|c| c.location))
}
