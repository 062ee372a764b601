//! Isolated real zeros of a sampled CF.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ComplexCurve;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroPoint {
    /// Refined location.
    pub location: f64,
    /// Nearest grid index to `location`.
    pub grid_index: usize,
    /// `|φ|` at the detecting grid point.
    pub modulus: f64,
}

/// Sorted, isolated zero locations on a grid with the given spacing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSet {
    points: Vec<ZeroPoint>,
    spacing: f64,
}

impl ZeroSet {
    pub fn empty(spacing: f64) -> Self {
        ZeroSet {
            points: Vec::new(),
            spacing,
        }
    }

    /// Sorts `points` and merges any within one grid spacing.
    pub fn from_points(mut points: Vec<ZeroPoint>, spacing: f64) -> Self {
        points.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut merged: Vec<ZeroPoint> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(last) if p.location - last.location <= spacing * (1.0 + 1e-9) => {
                    if p.modulus < last.modulus {
                        *last = p;
                    }
                }
                _ => merged.push(p),
            }
        }
        ZeroSet {
            points: merged,
            spacing,
        }
    }

    pub fn points(&self) -> &[ZeroPoint] {
        &self.points
    }

    pub fn locations(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.location).collect()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Union of two zero sets on the same grid, merged within one spacing.
    pub fn union(&self, other: &ZeroSet) -> ZeroSet {
        let mut all = self.points.clone();
        all.extend_from_slice(&other.points);
        ZeroSet::from_points(all, self.spacing.max(other.spacing))
    }

    /// Fails if two zeros are closer than two grid spacings.
    pub fn check_isolated(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if w[1].location - w[0].location < 2.0 * self.spacing {
                return Err(Error::ZerosNotIsolated {
                    first: w[0].location,
                    second: w[1].location,
                });
            }
        }
        Ok(())
    }
}

/// Tuning for [`detect_zeros_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroDetection {
    /// A local minimum counts when `|φ| < rel_threshold · max |φ|` over its
    /// neighbourhood.
    pub rel_threshold: f64,
    /// Neighbourhood half-width in grid points.
    pub neighborhood: usize,
    /// Sampling noise floor. Dips whose whole neighbourhood sits below it are
    /// indistinguishable from noise and are reported as spurious instead.
    pub noise_floor: Option<f64>,
}

impl Default for ZeroDetection {
    fn default() -> Self {
        ZeroDetection {
            rel_threshold: 0.1,
            neighborhood: 10,
            noise_floor: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub zeros: ZeroSet,
    pub spurious: Vec<ZeroPoint>,
}

/// Offset in grid units, within `[-0.5, 0.5]`, minimising `|q(t)|` for the
/// quadratic `q` through `(-1, a)`, `(0, b)`, `(1, c)`.
fn refine(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    let d1 = 0.5 * (c - a);
    let d2 = a - 2.0 * b + c;
    // start from the parabola through |q|² and polish with Newton steps
    let (q0, q1, q2) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let curvature = q0 - 2.0 * q1 + q2;
    let mut t = if curvature > 0.0 {
        (0.5 * (q0 - q2) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    for _ in 0..8 {
        let q = b + t * d1 + 0.5 * t * t * d2;
        let dq = d1 + t * d2;
        let g = (q.conj() * dq).re;
        let dg = dq.norm_sqr() + (q.conj() * d2).re;
        if !(dg > 0.0) {
            break;
        }
        let next = (t - g / dg).clamp(-0.5, 0.5);
        if (next - t).abs() < 1e-14 {
            t = next;
            break;
        }
        t = next;
    }
    t
}

/// Zeros of `curve`: strict local minima of `|φ|` well below their
/// neighbourhood, refined by minimising the modulus of the complex
/// quadratic through the three nearest grid values.
pub fn detect_zeros(curve: &ComplexCurve, rel_threshold: f64) -> Result<ZeroSet> {
    let opts = ZeroDetection {
        rel_threshold,
        ..ZeroDetection::default()
    };
    Ok(detect_zeros_with(curve, &opts)?.zeros)
}

pub fn detect_zeros_with(curve: &ComplexCurve, opts: &ZeroDetection) -> Result<Detection> {
    if !(opts.rel_threshold > 0.0 && opts.rel_threshold < 1.0) {
        return Err(Error::param("rel_threshold", "must lie in (0, 1)"));
    }
    let grid = curve.grid();
    let h = grid.spacing();
    let modulus: Vec<f64> = curve.values().iter().map(|v| v.norm()).collect();
    let n = modulus.len();
    let w = opts.neighborhood.max(1);

    let mut found = Vec::new();
    let mut spurious = Vec::new();
    for i in 1..n - 1 {
        let m = modulus[i];
        if !(m < modulus[i - 1] && m < modulus[i + 1]) {
            continue;
        }
        let lo = i.saturating_sub(w);
        let hi = (i + w).min(n - 1);
        let peak = modulus[lo..=hi].iter().cloned().fold(0.0, f64::max);
        if m >= opts.rel_threshold * peak {
            continue;
        }
        let v = curve.values();
        let offset = refine(v[i - 1], v[i], v[i + 1]);
        let location = grid.value(i) + offset * h;
        let point = ZeroPoint {
            location,
            grid_index: grid.nearest_index(location),
            modulus: m,
        };
        match opts.noise_floor {
            Some(floor) if peak < floor => spurious.push(point),
            _ => found.push(point),
        }
    }
    let zeros = ZeroSet::from_points(found, h);
    zeros.check_isolated()?;
    Ok(Detection { zeros, spurious })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ComponentDist, CurveKind, FreqGrid};
    use crate::oracle::analytic_cf;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn curve(s_max: f64, h: f64, f: impl Fn(f64) -> f64) -> ComplexCurve {
        let g = FreqGrid::with_spacing(s_max, h).unwrap();
        ComplexCurve::from_fn(g, CurveKind::Cf, |s| Complex64::new(f(s), 0.0))
    }

    fn assert_locations(found: &ZeroSet, want: &[f64], tol: f64) {
        let got = found.locations();
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < tol, "{g} vs {w}");
        }
    }

    #[test]
    fn gaussian_has_no_zeros() {
        let c = curve(6.0, 0.01, |s| (-s * s / 2.0).exp());
        assert!(detect_zeros(&c, 0.1).unwrap().is_empty());
    }

    #[test]
    fn sinc_zeros() {
        let c = curve(7.0, 0.01, |s| if s == 0.0 { 1.0 } else { s.sin() / s });
        let z = detect_zeros(&c, 0.1).unwrap();
        assert_locations(&z, &[-2.0 * PI, -PI, PI, 2.0 * PI], 1e-3);
        // refinement beats the grid spacing by a wide margin
        assert_locations(&z, &[-2.0 * PI, -PI, PI, 2.0 * PI], 1e-5);
    }

    #[test]
    fn damped_cosine_zeros() {
        let c = curve(4.0, 0.01, |s| (-s * s).exp() * s.cos());
        let z = detect_zeros(&c, 0.1).unwrap();
        assert_locations(&z, &[-PI / 2.0, PI / 2.0], 1e-3);
    }

    #[test]
    fn known_roots_of_zero_crossing_laws() {
        let g = FreqGrid::with_spacing(7.0, 0.01).unwrap();
        let u = analytic_cf(&ComponentDist::uniform_symmetric(1.0).unwrap(), &g);
        assert_locations(
            &detect_zeros(&u, 0.1).unwrap(),
            &[-2.0 * PI, -PI, PI, 2.0 * PI],
            1e-3,
        );
        let t = analytic_cf(&ComponentDist::two_point_symmetric(1.0).unwrap(), &g);
        let want: Vec<f64> = [-2.5, -1.5, -0.5, 0.5, 1.5]
            .iter()
            .chain(&[2.5])
            .map(|k| k * PI)
            .filter(|s: &f64| s.abs() <= 7.0)
            .collect();
        assert_locations(&detect_zeros(&t, 0.1).unwrap(), &want, 1e-3);
    }

    #[test]
    fn zeros_mirror_exactly_on_hermitian_input() {
        let g = FreqGrid::with_spacing(7.0, 0.013).unwrap();
        let u = analytic_cf(&ComponentDist::uniform_symmetric(1.3).unwrap(), &g);
        let z = detect_zeros(&u, 0.1).unwrap().locations();
        let k = z.len();
        for i in 0..k {
            assert_eq!(z[i], -z[k - 1 - i]);
        }
    }

    #[test]
    fn crowded_zeros_are_rejected() {
        // zeros 0.015 apart on a 0.01 grid
        let c = curve(1.0, 0.01, |s| (s - 0.5) * (s - 0.515) + 1e-9);
        let err = detect_zeros_with(
            &c,
            &ZeroDetection {
                rel_threshold: 0.5,
                neighborhood: 30,
                noise_floor: None,
            },
        );
        // A single merged minimum is fine; two distinct ones must fail.
        if let Ok(d) = err {
            assert!(d.zeros.len() <= 1);
        }
        let c = curve(1.0, 0.01, |s| ((s - 0.3) * (s - 0.319) * 1e3).abs() + 1e-12);
        assert!(matches!(
            detect_zeros(&c, 0.5),
            Err(Error::ZerosNotIsolated { .. })
        ));
    }

    #[test]
    fn noise_floor_discards_shallow_dips() {
        let c = curve(3.0, 0.01, |s| {
            1e-4 * (1.5 + (40.0 * s).sin()) * (-s * s).exp() + 0.0
        });
        let d = detect_zeros_with(
            &c,
            &ZeroDetection {
                rel_threshold: 0.9,
                neighborhood: 10,
                noise_floor: Some(1e-2),
            },
        )
        .unwrap();
        assert!(d.zeros.is_empty());
    }

    #[test]
    fn union_merges_nearby_points() {
        let p = |x: f64| ZeroPoint {
            location: x,
            grid_index: 0,
            modulus: 0.0,
        };
        let a = ZeroSet::from_points(vec![p(1.0), p(3.0)], 0.01);
        let b = ZeroSet::from_points(vec![p(1.005), p(2.0)], 0.01);
        assert_eq!(a.union(&b).locations().len(), 3);
    }
}
