//! Domain types shared by every stage: component laws, the model
//! configuration, observed triples, frequency grids and complex curves.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Family of a zero-mean component law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    /// N(0, scale²).
    Normal,
    /// Laplace with scale `b`, density `exp(-|x|/b) / 2b`.
    Laplace,
    /// Uniform on `[-a, a]`.
    UniformSymmetric,
    /// `±a` with probability ½ each.
    TwoPointSymmetric,
    /// `Exp(rate 1/λ) - λ`; the only asymmetric law (complex CF).
    ShiftedExponential,
}

impl DistKind {
    pub const ALL: [DistKind; 5] = [
        DistKind::Normal,
        DistKind::Laplace,
        DistKind::UniformSymmetric,
        DistKind::TwoPointSymmetric,
        DistKind::ShiftedExponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistKind::Normal => "normal",
            DistKind::Laplace => "laplace",
            DistKind::UniformSymmetric => "uniform_symmetric",
            DistKind::TwoPointSymmetric => "two_point_symmetric",
            DistKind::ShiftedExponential => "shifted_exponential",
        }
    }
}

impl FromStr for DistKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidDistribution(format!("unknown kind `{s}`")))
    }
}

/// A zero-mean component law with a positive scale (units of y).
///
/// Every supported family is parameterized so that its mean is exactly zero.
/// A config that asks for a nonzero mean is rejected on load.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist")]
pub struct ComponentDist {
    kind: DistKind,
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDist {
    kind: DistKind,
    scale: f64,
    #[serde(default)]
    mean: f64,
}

impl TryFrom<RawDist> for ComponentDist {
    type Error = Error;

    fn try_from(raw: RawDist) -> Result<Self> {
        if raw.mean != 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{} with mean {}: component laws must have zero mean",
                raw.kind.name(),
                raw.mean
            )));
        }
        ComponentDist::new(raw.kind, raw.scale)
    }
}

impl ComponentDist {
    pub fn new(kind: DistKind, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "{} scale must be finite and positive, got {scale}",
                kind.name()
            )));
        }
        Ok(ComponentDist { kind, scale })
    }

    pub fn normal(sigma: f64) -> Result<Self> {
        Self::new(DistKind::Normal, sigma)
    }

    pub fn laplace(b: f64) -> Result<Self> {
        Self::new(DistKind::Laplace, b)
    }

    pub fn uniform_symmetric(a: f64) -> Result<Self> {
        Self::new(DistKind::UniformSymmetric, a)
    }

    pub fn two_point_symmetric(a: f64) -> Result<Self> {
        Self::new(DistKind::TwoPointSymmetric, a)
    }

    pub fn shifted_exponential(lambda: f64) -> Result<Self> {
        Self::new(DistKind::ShiftedExponential, lambda)
    }

    /// Point mass at zero (scale 0). Only for plumbing tests: every draw is 0
    /// and the CF is identically 1.
    #[cfg(any(test, feature = "test-hooks"))]
    pub fn degenerate(kind: DistKind) -> Self {
        ComponentDist { kind, scale: 0.0 }
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_degenerate(&self) -> bool {
        self.scale == 0.0
    }

    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn variance(&self) -> f64 {
        let a = self.scale;
        match self.kind {
            DistKind::Normal => a * a,
            DistKind::Laplace => 2.0 * a * a,
            DistKind::UniformSymmetric => a * a / 3.0,
            DistKind::TwoPointSymmetric => a * a,
            DistKind::ShiftedExponential => a * a,
        }
    }

    /// Whether the law is absolutely continuous.
    pub fn has_density(&self) -> bool {
        !self.is_degenerate() && self.kind != DistKind::TwoPointSymmetric
    }
}

impl fmt::Display for ComponentDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.scale)
    }
}

/// Parses `kind:scale`, e.g. `uniform_symmetric:1.5`.
impl FromStr for ComponentDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, scale) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidDistribution(format!("expected `kind:scale`, got `{s}`")))?;
        let scale: f64 = scale
            .trim()
            .parse()
            .map_err(|_| Error::InvalidDistribution(format!("bad scale in `{s}`")))?;
        ComponentDist::new(kind.trim().parse()?, scale)
    }
}

/// Intercept and the three component laws. α_i and α_k share `alpha`,
/// η_j and η_ℓ share `eta`, and all three ε share `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub c: f64,
    pub alpha: ComponentDist,
    pub eta: ComponentDist,
    pub epsilon: ComponentDist,
}

impl ModelConfig {
    pub fn new(c: f64, alpha: ComponentDist, eta: ComponentDist, epsilon: ComponentDist) -> Self {
        ModelConfig {
            c,
            alpha,
            eta,
            epsilon,
        }
    }

    /// Every component standard normal, intercept zero.
    pub fn standard_normal() -> Self {
        let n = ComponentDist {
            kind: DistKind::Normal,
            scale: 1.0,
        };
        ModelConfig::new(0.0, n, n, n)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text)?;
        if !cfg.c.is_finite() {
            return Err(Error::param("c", "intercept must be finite"));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

/// One observed replicate of the connected component `(i,j), (k,j), (i,ℓ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleSample {
    pub y_ij: f64,
    pub y_kj: f64,
    pub y_il: f64,
}

impl TripleSample {
    pub fn is_finite(&self) -> bool {
        self.y_ij.is_finite() && self.y_kj.is_finite() && self.y_il.is_finite()
    }
}

/// Which observed column of a [`SampleSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    Yij,
    Ykj,
    Yil,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    triples: Vec<TripleSample>,
    seed: u64,
    config: Option<ModelConfig>,
}

impl SampleSet {
    pub fn new(triples: Vec<TripleSample>, seed: u64, config: Option<ModelConfig>) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::EmptyInput("sample set"));
        }
        if let Some(pos) = triples.iter().position(|t| !t.is_finite()) {
            return Err(Error::param(
                "triples",
                format!("replicate {pos} has a non-finite value"),
            ));
        }
        Ok(SampleSet {
            triples,
            seed,
            config,
        })
    }

    pub fn triples(&self) -> &[TripleSample] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> Option<&ModelConfig> {
        self.config.as_ref()
    }

    pub fn column(&self, col: Column) -> Vec<f64> {
        self.triples
            .iter()
            .map(|t| match col {
                Column::Yij => t.y_ij,
                Column::Ykj => t.y_kj,
                Column::Yil => t.y_il,
            })
            .collect()
    }

    /// The column minus its sample mean.
    pub fn centered_column(&self, col: Column) -> Vec<f64> {
        center(&self.column(col))
    }

    /// Detection floor for ECF noise, `3/√n`.
    pub fn noise_floor(&self) -> f64 {
        3.0 / (self.len() as f64).sqrt()
    }
}

pub fn center(column: &[f64]) -> Vec<f64> {
    if column.is_empty() {
        return Vec::new();
    }
    let mean = column.iter().sum::<f64>() / column.len() as f64;
    column.iter().map(|x| x - mean).collect()
}

/// Uniform, odd-length frequency grid on `[-s_max, s_max]` with `s = 0` as
/// its exact centre point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct FreqGrid {
    s_max: f64,
    n_points: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    s_max: f64,
    n_points: usize,
}

impl TryFrom<RawGrid> for FreqGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        FreqGrid::new(raw.s_max, raw.n_points)
    }
}

impl FreqGrid {
    pub fn new(s_max: f64, n_points: usize) -> Result<Self> {
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(Error::param("s_max", format!("must be positive, got {s_max}")));
        }
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::param(
                "n_points",
                format!("must be odd and at least 3, got {n_points}"),
            ));
        }
        Ok(FreqGrid { s_max, n_points })
    }

    /// Grid with spacing as close to `spacing` as the half-width allows;
    /// `s_max` is rounded to a whole number of steps.
    pub fn with_spacing(s_max: f64, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::param(
                "spacing",
                format!("must be positive, got {spacing}"),
            ));
        }
        let half = (s_max / spacing).round().max(1.0) as usize;
        FreqGrid::new(half as f64 * spacing, 2 * half + 1)
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.s_max / (self.n_points - 1) as f64
    }

    /// Index of `s = 0`.
    pub fn zero_index(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// Grid point `i`, computed as an integer offset from the centre so that
    /// `value(mirror(i)) == -value(i)` exactly.
    pub fn value(&self, i: usize) -> f64 {
        let offset = i as f64 - self.zero_index() as f64;
        offset * self.spacing()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.value(i)).collect()
    }

    /// Index of the point at `-value(i)`.
    pub fn mirror(&self, i: usize) -> usize {
        self.n_points - 1 - i
    }

    /// Nearest grid index to `s`, clamped to the grid.
    pub fn nearest_index(&self, s: f64) -> usize {
        let pos = (s / self.spacing()).round() + self.zero_index() as f64;
        pos.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Fractional position of `s` in index units.
    pub fn position(&self, s: f64) -> f64 {
        s / self.spacing() + self.zero_index() as f64
    }

    pub fn contains(&self, s: f64) -> bool {
        s.abs() <= self.s_max * (1.0 + 1e-12)
    }

    pub fn same_as(&self, other: &FreqGrid) -> bool {
        self.n_points == other.n_points && (self.s_max - other.s_max).abs() <= 1e-12 * self.s_max
    }
}

/// Whether a curve is a characteristic function (subject to the CF
/// invariants) or a derivative slice (exempt from them).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Cf,
    Derivative,
}

/// Complex values on a [`FreqGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexCurve {
    grid: FreqGrid,
    values: Vec<Complex64>,
    kind: CurveKind,
}

impl ComplexCurve {
    pub fn new(grid: FreqGrid, values: Vec<Complex64>, kind: CurveKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: grid.len(),
            });
        }
        Ok(ComplexCurve { grid, values, kind })
    }

    pub fn from_fn(grid: FreqGrid, kind: CurveKind, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.value(i))).collect();
        ComplexCurve { grid, values, kind }
    }

    /// Builds a full curve from values at the non-negative grid points
    /// (`positive[0]` is `s = 0`), filling `s < 0` by `mirror`.
    pub(crate) fn from_half(
        grid: FreqGrid,
        kind: CurveKind,
        positive: &[Complex64],
        mirror: impl Fn(Complex64) -> Complex64,
    ) -> Self {
        let z = grid.zero_index();
        debug_assert_eq!(positive.len(), z + 1);
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (k, v) in positive.iter().enumerate() {
            values[z + k] = *v;
            if k > 0 {
                values[z - k] = mirror(*v);
            }
        }
        ComplexCurve { grid, values, kind }
    }

    pub fn grid(&self) -> &FreqGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn value_at(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn at_zero(&self) -> Complex64 {
        self.values[self.grid.zero_index()]
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.grid.value(i), *v))
    }

    /// Sup-norm distance to `f` over grid points with `|s| <= radius` that
    /// are not excluded by `skip`.
    pub fn sup_error(&self, radius: f64, f: impl Fn(f64) -> Complex64, skip: impl Fn(f64) -> bool) -> f64 {
        self.points()
            .filter(|(s, _)| s.abs() <= radius + 1e-12 && !skip(*s))
            .map(|(s, v)| (v - f(s)).norm())
            .fold(0.0, f64::max)
    }
}

/// Violations of the constraints every CF of a real random variable obeys.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CfValidation {
    /// `|φ(0) - 1|`.
    pub origin: f64,
    /// `max(|φ| - 1, 0)`.
    pub modulus: f64,
    /// `max |φ(-s) - conj φ(s)|`.
    pub hermitian: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CfValidation {
    pub fn max_violation(&self) -> f64 {
        self.origin.max(self.modulus).max(self.hermitian)
    }
}

/// Report-only check of `φ(0) = 1`, `|φ| ≤ 1` and Hermitian symmetry.
pub fn validate_cf_curve(curve: &ComplexCurve, tol: f64) -> CfValidation {
    let grid = curve.grid();
    let values = curve.values();
    let origin = (curve.at_zero() - Complex64::new(1.0, 0.0)).norm();
    let modulus = values.iter().map(|v| v.norm() - 1.0).fold(0.0, f64::max);
    let hermitian = (0..grid.len())
        .map(|i| (values[grid.mirror(i)] - values[i].conj()).norm())
        .fold(0.0, f64::max);
    let mut report = CfValidation {
        origin,
        modulus,
        hermitian,
        tolerance: tol,
        passed: false,
    };
    report.passed = report.max_violation() <= tol;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> FreqGrid {
        FreqGrid::with_spacing(5.0, 0.01).unwrap()
    }

    #[test]
    fn constant_one_is_a_cf() {
        let c = ComplexCurve::from_fn(grid(), CurveKind::Cf, |_| Complex64::new(1.0, 0.0));
        assert!(validate_cf_curve(&c, 1e-15).passed);
    }

    #[test]
    fn gaussian_curve_passes() {
        let c = ComplexCurve::from_fn(grid(), CurveKind::Cf, |s| {
            Complex64::new((-s * s / 2.0).exp(), 0.0)
        });
        let r = validate_cf_curve(&c, 1e-12);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn modulus_violation_is_reported() {
        let g = grid();
        let bump = g.nearest_index(1.0);
        let mut values: Vec<_> = (0..g.len())
            .map(|i| Complex64::new((-g.value(i).powi(2) / 2.0).exp(), 0.0))
            .collect();
        values[bump] = Complex64::new(1.2, 0.0);
        values[g.mirror(bump)] = Complex64::new(1.2, 0.0);
        let c = ComplexCurve::new(g, values, CurveKind::Cf).unwrap();
        let r = validate_cf_curve(&c, 0.1);
        assert!(!r.passed);
        assert!((r.modulus - 0.2).abs() < 1e-12);
        assert!(r.origin < 1e-15 && r.hermitian < 1e-15);
    }

    #[test]
    fn grid_rejects_even_or_tiny() {
        assert!(FreqGrid::new(1.0, 4).is_err());
        assert!(FreqGrid::new(1.0, 1).is_err());
        assert!(FreqGrid::new(-1.0, 5).is_err());
        let g = FreqGrid::new(2.0, 5).unwrap();
        assert_eq!(g.values(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(g.spacing(), 1.0);
    }

    #[test]
    fn dist_parsing_and_zero_mean() {
        let d: ComponentDist = "uniform_symmetric:1.5".parse().unwrap();
        assert_eq!(d.kind(), DistKind::UniformSymmetric);
        assert_eq!(d.scale(), 1.5);
        assert!("normal:0".parse::<ComponentDist>().is_err());
        assert!("cauchy:1".parse::<ComponentDist>().is_err());
        assert!(ComponentDist::new(DistKind::Laplace, f64::NAN).is_err());

        let ok = r#"{"c": 5, "alpha": {"kind": "normal", "scale": 1},
                    "eta": {"kind": "laplace", "scale": 2},
                    "epsilon": {"kind": "shifted_exponential", "scale": 0.5, "mean": 0}}"#;
        let cfg = ModelConfig::from_json(ok).unwrap();
        assert_eq!(cfg.c, 5.0);
        assert_eq!(ModelConfig::from_json(&cfg.to_json()).unwrap(), cfg);

        let shifted = ok.replace("\"mean\": 0", "\"mean\": 0.25");
        let err = ModelConfig::from_json(&shifted).unwrap_err();
        assert!(err.to_string().contains("zero mean"), "{err}");
    }

    #[test]
    fn sample_set_rejects_empty_and_nan() {
        assert!(SampleSet::new(vec![], 0, None).is_err());
        let bad = TripleSample {
            y_ij: 0.0,
            y_kj: f64::NAN,
            y_il: 0.0,
        };
        assert!(SampleSet::new(vec![bad], 0, None).is_err());
    }

    proptest! {
        #[test]
        fn grid_is_mirror_symmetric(s_max in 0.1f64..50.0, half in 1usize..2000) {
            let g = FreqGrid::new(s_max, 2 * half + 1).unwrap();
            prop_assert_eq!(g.value(g.zero_index()), 0.0);
            for i in 0..g.len() {
                prop_assert_eq!(g.value(g.mirror(i)), -g.value(i));
            }
            prop_assert!((g.value(g.len() - 1) - s_max).abs() <= 1e-12 * s_max);
        }
    }
}
