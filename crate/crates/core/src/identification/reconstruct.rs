//! A CF from its log-derivative ψ, bridged across singular points by a δ-limit.
//!
//! Along the positive half-axis the value at `s` is the product of
//! exponentiated ψ-integrals over the segments between consecutive singular
//! points, with a `δ`-neighbourhood of every crossed singular point cut out,
//! taken as `δ → 0`. To organise the computation each gap between singular
//! points gets an anchor `a_K`, and
//!
//! ```text
//! φ(s) = C(K) · exp(∫_{a_K}^s ψ),   K = k̄(s),
//! C(K) = Π_{k≤K} (-1) · exp(Λ_k),   Λ_k = lim_{δ→0} [∫_{a_{k-1}}^{s(k)-δ} ψ + ∫_{s(k)+δ}^{a_k} ψ].
//! ```
//!
//! Across a simple zero `φ(s(k)-δ)/φ(s(k)+δ) → -1`, which is the `(-1)`
//! factor. `Λ_k(δ)` is an odd function of `δ` plus its limit, so the limit is
//! extrapolated by fitting `Λ_0 + c_1 δ + c_3 δ³ + …` through the schedule.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::continuity::{fill_windows, windows_on_axis};
use super::quadrature::PsiIntegrator;
use super::singular::SingularSet;
use crate::cf::PsiCurve;
use crate::error::{Error, Result};
use crate::model::{ComplexCurve, CurveKind, FreqGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Use the value at the smallest δ.
    LastValue,
    /// Polynomial extrapolation of the bridge exponent to δ = 0.
    Richardson,
}

/// The decreasing δ values at which the bridge limit is sampled.
///
/// A relative schedule stores multiples of the characteristic gap (the
/// smallest distance between consecutive singular points, the origin
/// included); an absolute one stores δ directly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct DeltaSchedule {
    deltas: Vec<f64>,
    relative: bool,
    extrapolation: Extrapolation,
}

#[derive(Deserialize)]
struct RawSchedule {
    deltas: Vec<f64>,
    relative: bool,
    extrapolation: Extrapolation,
}

impl TryFrom<RawSchedule> for DeltaSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        DeltaSchedule::build(raw.deltas, raw.relative, raw.extrapolation)
    }
}

impl Default for DeltaSchedule {
    fn default() -> Self {
        DeltaSchedule {
            deltas: vec![0.2, 0.1, 0.05, 0.025],
            relative: true,
            extrapolation: Extrapolation::Richardson,
        }
    }
}

impl DeltaSchedule {
    fn build(deltas: Vec<f64>, relative: bool, extrapolation: Extrapolation) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::InvalidSchedule("no δ values".into()));
        }
        if deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidSchedule(
                "δ values must be positive and finite".into(),
            ));
        }
        if deltas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSchedule(
                "δ values must be strictly decreasing".into(),
            ));
        }
        if relative && deltas[0] >= 0.5 {
            return Err(Error::InvalidSchedule(
                "relative δ must stay below half the characteristic gap".into(),
            ));
        }
        Ok(DeltaSchedule {
            deltas,
            relative,
            extrapolation,
        })
    }

    /// Absolute δ values.
    pub fn absolute(deltas: Vec<f64>, extrapolation: Extrapolation) -> Result<Self> {
        DeltaSchedule::build(deltas, false, extrapolation)
    }

    /// Multiples of the characteristic gap.
    pub fn relative(factors: Vec<f64>, extrapolation: Extrapolation) -> Result<Self> {
        DeltaSchedule::build(factors, true, extrapolation)
    }

    /// `count` values `first, first·ratio, first·ratio², …`.
    pub fn geometric(
        first: f64,
        ratio: f64,
        count: usize,
        relative: bool,
        extrapolation: Extrapolation,
    ) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidSchedule("ratio must lie in (0, 1)".into()));
        }
        let deltas = (0..count).map(|k| first * ratio.powi(k as i32)).collect();
        DeltaSchedule::build(deltas, relative, extrapolation)
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn is_relative(&self) -> bool {
        self.relative
    }

    pub fn extrapolation(&self) -> Extrapolation {
        self.extrapolation
    }

    pub fn with_extrapolation(mut self, extrapolation: Extrapolation) -> Self {
        self.extrapolation = extrapolation;
        self
    }

    /// δ values for a problem with characteristic gap `gap`.
    pub fn resolve(&self, gap: f64) -> Vec<f64> {
        if self.relative {
            self.deltas.iter().map(|d| d * gap).collect()
        } else {
            self.deltas.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeAxis {
    /// `φ(-s) = conj φ(s)`.
    Hermitian,
    /// Run the product formula on the mirrored ψ.
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructOptions {
    pub negative_axis: NegativeAxis,
    /// A bridge diverges when its last extrapolation step exceeds this and
    /// has not shrunk since the previous step.
    pub convergence_tol: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            negative_axis: NegativeAxis::Hermitian,
            convergence_tol: 1e-3,
        }
    }
}

/// The δ-sequence behind one bridge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeTrace {
    pub point: f64,
    pub deltas: Vec<f64>,
    /// `Λ(δ)` per schedule entry.
    pub exponents: Vec<Complex64>,
    /// Limit estimates using the first 1, 2, … schedule entries.
    pub extrapolated: Vec<Complex64>,
    pub limit: Complex64,
    pub last_step: f64,
    pub previous_step: f64,
    pub converged: bool,
}

/// The reconstructed value at one probe point per schedule entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeTrace {
    pub point: f64,
    pub deltas: Vec<f64>,
    /// Product formula evaluated at each δ.
    pub raw: Vec<Complex64>,
    /// Extrapolated value using the first 1, 2, … schedule entries.
    pub extrapolated: Vec<Complex64>,
    /// `|extrapolated[last] - extrapolated[last - 1]|`.
    pub last_step: f64,
}

#[derive(Clone, Debug)]
struct HalfAxis {
    points: Vec<f64>,
    anchors: Vec<f64>,
    bridges: Vec<BridgeTrace>,
    values: Vec<Complex64>,
}

impl HalfAxis {
    fn cumulative(&self, k: usize, pick: impl Fn(&BridgeTrace) -> Complex64) -> Complex64 {
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let exponent: Complex64 = self.bridges[..k].iter().map(pick).sum();
        sign * exponent.exp()
    }
}

/// A reconstructed CF with the δ-limit evidence behind it.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub curve: ComplexCurve,
    pub singular: SingularSet,
    /// Smallest distance between consecutive singular points, origin
    /// included; `None` without singular points.
    pub gap: Option<f64>,
    /// Resolved δ values (empty without singular points).
    pub deltas: Vec<f64>,
    /// Radius of the windows refilled by continuity (the smallest δ).
    pub fill_radius: f64,
    pub negative_axis: NegativeAxis,
    pub extrapolation: Extrapolation,
    positive: HalfAxis,
    negative: Option<HalfAxis>,
    integrator: PsiIntegratorHandle,
}

/// Integrators kept for probe evaluation after the fact.
#[derive(Clone, Debug)]
struct PsiIntegratorHandle {
    positive: Arc<PsiIntegrator>,
    negative: Option<Arc<PsiIntegrator>>,
}

impl Reconstruction {
    /// Every bridge, positive half-axis first.
    pub fn bridges(&self) -> Vec<&BridgeTrace> {
        let mut out: Vec<&BridgeTrace> = self.positive.bridges.iter().collect();
        if let Some(neg) = &self.negative {
            out.extend(neg.bridges.iter());
        }
        out
    }

    pub fn converged(&self) -> bool {
        self.bridges().iter().all(|b| b.converged)
    }

    /// The product formula at `s` for every schedule entry, with its
    /// extrapolation sequence. Probes on a singular point are rejected.
    pub fn probe(&self, s: f64) -> Result<ProbeTrace> {
        let grid = self.curve.grid();
        if !grid.contains(s) {
            return Err(Error::param("probe", format!("{s} lies outside the grid")));
        }
        let (half, integ, u, conj) = match (s < 0.0, &self.negative, &self.integrator.negative) {
            (true, Some(neg), Some(integ)) => (neg, integ, -s, false),
            (true, _, _) => (&self.positive, &self.integrator.positive, -s, true),
            _ => (&self.positive, &self.integrator.positive, s, false),
        };
        if half.points.contains(&u) {
            return Err(Error::param("probe", format!("{s} is a singular point")));
        }
        let k = half.points.iter().take_while(|&&p| p <= u).count();
        let tail = integ.integral(half.anchors[k], u);
        let m = self.deltas.len().max(1);
        let mut raw = Vec::with_capacity(m);
        let mut extrapolated = Vec::with_capacity(m);
        for j in 0..m {
            let r = half.cumulative(k, |b| b.exponents[j]) * tail.exp();
            let e = half.cumulative(k, |b| b.extrapolated[j]) * tail.exp();
            raw.push(if conj { r.conj() } else { r });
            extrapolated.push(if conj { e.conj() } else { e });
        }
        let last_step = if m >= 2 {
            (extrapolated[m - 1] - extrapolated[m - 2]).norm()
        } else {
            0.0
        };
        Ok(ProbeTrace {
            point: s,
            deltas: self.deltas.clone(),
            raw,
            extrapolated,
            last_step,
        })
    }
}

/// Distance scale of the singular set: the smallest gap between consecutive
/// points on either half-axis, counting the origin.
pub fn characteristic_gap(singular: &SingularSet) -> Option<f64> {
    let half_gap = |pts: &[f64]| {
        let mut prev = 0.0;
        let mut best = f64::INFINITY;
        for &p in pts {
            best = best.min((p - prev).abs());
            prev = p;
        }
        best
    };
    let g = half_gap(singular.positive()).min(half_gap(singular.negative()));
    g.is_finite().then_some(g)
}

/// First component of the solution of `A x = b` for a small dense system.
fn solve_first(mut a: Vec<Vec<f64>>, mut b: Vec<Complex64>) -> Complex64 {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            let bc = b[col];
            b[row] -= f * bc;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    x[0]
}

/// Limit estimates from the first `k` samples for `k = 1..=len`, fitting
/// `Λ_0 + Σ c_m δ^(2m-1)`.
fn odd_power_extrapolation(deltas: &[f64], samples: &[Complex64]) -> Vec<Complex64> {
    let scale = deltas[0];
    (1..=deltas.len())
        .map(|k| {
            let a = deltas[..k]
                .iter()
                .map(|d| {
                    let x = d / scale;
                    (0..k)
                        .map(|m| if m == 0 { 1.0 } else { x.powi(2 * m as i32 - 1) })
                        .collect()
                })
                .collect();
            solve_first(a, samples[..k].to_vec())
        })
        .collect()
}

fn bridge(
    integ: &PsiIntegrator,
    point: f64,
    left_anchor: f64,
    right_anchor: f64,
    deltas: &[f64],
    extrapolation: Extrapolation,
    tol: f64,
) -> Result<BridgeTrace> {
    let exponents: Vec<Complex64> = deltas
        .iter()
        .map(|d| integ.integral(left_anchor, point - d) + integ.integral(point + d, right_anchor))
        .collect();
    let extrapolated = match extrapolation {
        Extrapolation::LastValue => exponents.clone(),
        Extrapolation::Richardson => odd_power_extrapolation(deltas, &exponents),
    };
    let m = extrapolated.len();
    let step = |i: usize| (extrapolated[i] - extrapolated[i - 1]).norm();
    let last_step = if m >= 2 { step(m - 1) } else { 0.0 };
    let previous_step = if m >= 3 { step(m - 2) } else { f64::INFINITY };
    let converged = !(last_step > tol && last_step >= previous_step);
    let trace = BridgeTrace {
        point,
        deltas: deltas.to_vec(),
        limit: extrapolated[m - 1],
        exponents,
        extrapolated,
        last_step,
        previous_step: if previous_step.is_finite() {
            previous_step
        } else {
            0.0
        },
        converged,
    };
    if !trace.converged {
        return Err(Error::Divergent {
            point,
            last_step,
            previous_step: trace.previous_step,
        });
    }
    Ok(trace)
}

/// Values at `u = k·h`, `k = 0..half_len`, for singular points `points > 0`.
fn reconstruct_half(
    integ: &PsiIntegrator,
    points: &[f64],
    gap: f64,
    deltas: &[f64],
    extrapolation: Extrapolation,
    tol: f64,
) -> Result<HalfAxis> {
    let grid = integ.grid();
    let h = grid.spacing();
    let s_max = grid.s_max();
    let half_len = grid.zero_index() + 1;

    let mut anchors = vec![0.0];
    for (k, &p) in points.iter().enumerate() {
        let a = match points.get(k + 1) {
            Some(next) => 0.5 * (p + next),
            None => (p + 0.5 * gap).min(s_max),
        };
        anchors.push(a);
    }
    let bridges = points
        .iter()
        .enumerate()
        .map(|(k, &p)| bridge(integ, p, anchors[k], anchors[k + 1], deltas, extrapolation, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut half = HalfAxis {
        points: points.to_vec(),
        anchors,
        bridges,
        values: Vec::new(),
    };
    let limits: Vec<Complex64> = (0..=points.len())
        .map(|k| half.cumulative(k, |b| b.limit))
        .collect();

    let mut values = Vec::with_capacity(half_len);
    let mut k = 0;
    for i in 0..half_len {
        let u = i as f64 * h;
        while k < points.len() && points[k] <= u {
            k += 1;
        }
        values.push(limits[k] * integ.integral(half.anchors[k], u).exp());
    }
    if let Some(&radius) = deltas.last() {
        let windows = windows_on_axis(points, radius, half_len, h, |u| u / h)?;
        fill_windows(&mut values, |i| i as f64 * h, &windows);
    }
    values[0] = Complex64::new(1.0, 0.0);
    half.values = values;
    Ok(half)
}

/// Rebuilds a CF from `psi` by the bridged product formula.
pub fn reconstruct_cf(
    psi: &PsiCurve,
    singular: &SingularSet,
    schedule: &DeltaSchedule,
    grid: &FreqGrid,
) -> Result<Reconstruction> {
    reconstruct_cf_with(psi, singular, schedule, grid, &ReconstructOptions::default())
}

pub fn reconstruct_cf_with(
    psi: &PsiCurve,
    singular: &SingularSet,
    schedule: &DeltaSchedule,
    grid: &FreqGrid,
    opts: &ReconstructOptions,
) -> Result<Reconstruction> {
    if !psi.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    let h = grid.spacing();
    let gap = characteristic_gap(singular);
    let deltas = match gap {
        Some(g) => schedule.resolve(g),
        None => Vec::new(),
    };
    if let (Some(g), Some(&d_max), Some(&d_min)) = (gap, deltas.first(), deltas.last()) {
        if d_min < 5.0 * h {
            return Err(Error::InvalidSchedule(format!(
                "smallest δ {d_min:.4} needs grid spacing at most {:.5}, got {h:.5}",
                d_min / 5.0
            )));
        }
        if d_max >= 0.5 * g {
            return Err(Error::InvalidSchedule(format!(
                "largest δ {d_max:.4} must stay below half the gap {g:.4}"
            )));
        }
        for p in singular.all() {
            if p.abs() + d_max + 2.0 * h > grid.s_max() {
                return Err(Error::InvalidSchedule(format!(
                    "singular point {p} is within δ of the grid edge; widen the grid"
                )));
            }
        }
    }

    let positive_integ = Arc::new(PsiIntegrator::with_poles(psi, &singular.all()));
    let extrapolation = schedule.extrapolation();
    let tol = opts.convergence_tol;
    let positive = reconstruct_half(
        &positive_integ,
        singular.positive(),
        gap.unwrap_or(0.0),
        &deltas,
        extrapolation,
        tol,
    )?;

    let (curve, negative, negative_integ) = match opts.negative_axis {
        NegativeAxis::Hermitian => (
            ComplexCurve::from_half(*grid, CurveKind::Cf, &positive.values, |v| v.conj()),
            None,
            None,
        ),
        NegativeAxis::Product => {
            let integ = Arc::new(PsiIntegrator::with_poles(
                &psi.mirrored(),
                &singular.mirrored().all(),
            ));
            let mirrored = singular.mirrored();
            let neg = reconstruct_half(
                &integ,
                mirrored.positive(),
                gap.unwrap_or(0.0),
                &deltas,
                extrapolation,
                tol,
            )?;
            let z = grid.zero_index();
            let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
            for k in 0..=z {
                values[z + k] = positive.values[k];
                values[z - k] = neg.values[k];
            }
            values[z] = Complex64::new(1.0, 0.0);
            (
                ComplexCurve::new(*grid, values, CurveKind::Cf)?,
                Some(neg),
                Some(integ),
            )
        }
    };

    Ok(Reconstruction {
        curve,
        singular: singular.clone(),
        gap,
        fill_radius: deltas.last().copied().unwrap_or(0.0),
        deltas,
        negative_axis: opts.negative_axis,
        extrapolation,
        positive,
        negative,
        integrator: PsiIntegratorHandle {
            positive: positive_integ,
            negative: negative_integ,
        },
    })
}
