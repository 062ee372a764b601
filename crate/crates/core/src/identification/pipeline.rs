//! End-to-end identification from samples or from closed-form slices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::epsilon::{identify_epsilon_with, EpsilonOptions, EpsilonResult};
use super::reconstruct::{
    reconstruct_cf_with, DeltaSchedule, NegativeAxis, ProbeTrace, ReconstructOptions, Reconstruction,
};
use super::singular::{classify_zeros, singular_subset, ClassifyOptions, SingularSet, ZeroClassification};
use super::zeros::{detect_zeros_with, ZeroDetection, ZeroPoint, ZeroSet};
use crate::cf::{ecf, ecf_with_partial, psi_from_curves, PsiCurve};
use crate::error::{Error, Result};
use crate::model::{validate_cf_curve, CfValidation, Column, ComplexCurve, FreqGrid, SampleSet};
use crate::oracle::PhiYSlices;

/// Every tuning knob of the pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentifyOptions {
    pub rel_threshold: f64,
    /// Zero-detection neighbourhood half-width, in grid points.
    pub neighborhood: usize,
    /// Classification window, in unmasked grid points per side.
    pub window: usize,
    pub blowup_factor: f64,
    /// Classification baseline half-width, in grid points.
    pub region: usize,
    pub schedule: DeltaSchedule,
    pub negative_axis: NegativeAxis,
    pub convergence_tol: f64,
    /// Floor on `|φ_α φ_η|` for the division step; `None` uses 1e-12 on
    /// closed-form slices and the sampling noise floor on data.
    pub epsilon_floor: Option<f64>,
    /// Probe points sit this far either side of each singular point.
    pub probe_offset: f64,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        IdentifyOptions {
            rel_threshold: 0.1,
            neighborhood: 10,
            window: 5,
            blowup_factor: 10.0,
            region: 100,
            schedule: DeltaSchedule::default(),
            negative_axis: NegativeAxis::Hermitian,
            convergence_tol: 1e-3,
            epsilon_floor: None,
            probe_offset: 0.1,
        }
    }
}

impl IdentifyOptions {
    pub fn with_schedule(schedule: DeltaSchedule) -> Self {
        IdentifyOptions {
            schedule,
            ..IdentifyOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mode {
    /// Closed-form slices.
    Oracle,
    /// Empirical slices from `n` replicates.
    MonteCarlo { n: usize },
}

impl Mode {
    /// Tolerance of the CF validity report on identified curves.
    pub fn validation_tolerance(self) -> f64 {
        match self {
            Mode::Oracle => 1e-3,
            Mode::MonteCarlo { .. } => 0.1,
        }
    }
}

/// One ψ stage: α from the `(i,ℓ)` slice or η from the `(k,j)` slice.
#[derive(Clone, Debug)]
pub struct StageResult {
    pub name: &'static str,
    pub zeros: ZeroSet,
    /// Dips discarded as indistinguishable from sampling noise.
    pub spurious: Vec<ZeroPoint>,
    pub classification: Vec<ZeroClassification>,
    pub singular: SingularSet,
    pub psi: PsiCurve,
    pub reconstruction: Reconstruction,
    pub probes: Vec<ProbeTrace>,
}

impl StageResult {
    pub fn curve(&self) -> &ComplexCurve {
        &self.reconstruction.curve
    }
}

/// ψ = numerator/denominator → zeros → classification → reconstruction.
pub fn run_stage(
    name: &'static str,
    numerator: &ComplexCurve,
    denominator: &ComplexCurve,
    noise_floor: Option<f64>,
    opts: &IdentifyOptions,
) -> Result<StageResult> {
    let at = |step: &'static str| move |e: Error| e.in_stage(format!("{name}: {step}"));
    let detection = detect_zeros_with(
        denominator,
        &ZeroDetection {
            rel_threshold: opts.rel_threshold,
            neighborhood: opts.neighborhood,
            noise_floor,
        },
    )
    .map_err(at("detect_zeros"))?;
    let zeros = detection.zeros;
    let psi = psi_from_curves(numerator, denominator, &zeros).map_err(at("psi_from_curves"))?;
    let classification = classify_zeros(
        &psi,
        &zeros,
        &ClassifyOptions {
            window: opts.window,
            blowup_factor: opts.blowup_factor,
            region: opts.region,
        },
    )
    .map_err(at("classify_singular"))?;
    let singular = singular_subset(&classification).map_err(at("classify_singular"))?;
    let psi = psi.with_singular_points(singular.all());
    let grid = *denominator.grid();
    let reconstruction = reconstruct_cf_with(
        &psi,
        &singular,
        &opts.schedule,
        &grid,
        &ReconstructOptions {
            negative_axis: opts.negative_axis,
            convergence_tol: opts.convergence_tol,
        },
    )
    .map_err(at("reconstruct_cf"))?;
    let mut probes = Vec::new();
    for p in singular.all() {
        for s in [p - opts.probe_offset, p + opts.probe_offset] {
            if grid.contains(s) && !singular.all().contains(&s) {
                probes.push(reconstruction.probe(s).map_err(at("probe"))?);
            }
        }
    }
    Ok(StageResult {
        name,
        zeros,
        spurious: detection.spurious,
        classification,
        singular,
        psi,
        reconstruction,
        probes,
    })
}

/// The full identification of α, η and ε.
#[derive(Clone, Debug)]
pub struct Identification {
    pub mode: Mode,
    pub grid: FreqGrid,
    pub options: IdentifyOptions,
    pub noise_floor: Option<f64>,
    pub phi_y: ComplexCurve,
    pub alpha: StageResult,
    pub eta: StageResult,
    pub zeros_union: ZeroSet,
    pub epsilon: EpsilonResult,
}

impl Identification {
    pub fn alpha_cf(&self) -> &ComplexCurve {
        self.alpha.curve()
    }

    pub fn eta_cf(&self) -> &ComplexCurve {
        self.eta.curve()
    }

    pub fn epsilon_cf(&self) -> &ComplexCurve {
        &self.epsilon.curve
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics::from_identification(self)
    }
}

fn finish(
    mode: Mode,
    grid: FreqGrid,
    opts: &IdentifyOptions,
    noise_floor: Option<f64>,
    phi_y: ComplexCurve,
    alpha: StageResult,
    eta: StageResult,
) -> Result<Identification> {
    let zeros_union = alpha.zeros.union(&eta.zeros);
    let radius = alpha
        .reconstruction
        .fill_radius
        .max(eta.reconstruction.fill_radius)
        .max(2.0 * grid.spacing());
    let floor = opts.epsilon_floor.unwrap_or(match mode {
        Mode::Oracle => 1e-12,
        Mode::MonteCarlo { .. } => noise_floor.unwrap_or(0.0),
    });
    let epsilon = identify_epsilon_with(
        &phi_y,
        alpha.curve(),
        eta.curve(),
        &zeros_union,
        &EpsilonOptions {
            floor,
            mask_radius: Some(radius),
        },
    )
    .map_err(|e| e.in_stage("epsilon: identify_epsilon"))?;
    Ok(Identification {
        mode,
        grid,
        options: opts.clone(),
        noise_floor,
        phi_y,
        alpha,
        eta,
        zeros_union,
        epsilon,
    })
}

struct SampleSlices {
    alpha_den: ComplexCurve,
    alpha_num: ComplexCurve,
    eta_den: ComplexCurve,
    eta_num: ComplexCurve,
}

fn sample_slices(samples: &SampleSet, grid: &FreqGrid, alpha: bool, eta: bool) -> Result<SampleSlices> {
    let yij = samples.centered_column(Column::Yij);
    let empty = || {
        ComplexCurve::new(
            *grid,
            vec![Complex64::new(0.0, 0.0); grid.len()],
            crate::model::CurveKind::Cf,
        )
    };
    let (a, e) = rayon::join(
        || -> Result<_> {
            if alpha {
                ecf_with_partial(&yij, &samples.centered_column(Column::Yil), grid)
            } else {
                Ok((empty()?, empty()?))
            }
        },
        || -> Result<_> {
            if eta {
                ecf_with_partial(&yij, &samples.centered_column(Column::Ykj), grid)
            } else {
                Ok((empty()?, empty()?))
            }
        },
    );
    let (alpha_den, alpha_num) = a.map_err(|e| e.in_stage("alpha: ecf"))?;
    let (eta_den, eta_num) = e.map_err(|e| e.in_stage("eta: ecf"))?;
    Ok(SampleSlices {
        alpha_den,
        alpha_num,
        eta_den,
        eta_num,
    })
}

/// Identification from replicates, with every column centered first.
pub fn identify_from_samples(
    samples: &SampleSet,
    grid: &FreqGrid,
    opts: &IdentifyOptions,
) -> Result<Identification> {
    let sl = sample_slices(samples, grid, true, true)?;
    let noise = samples.noise_floor();
    let (alpha, eta) = rayon::join(
        || run_stage("alpha", &sl.alpha_num, &sl.alpha_den, Some(noise), opts),
        || run_stage("eta", &sl.eta_num, &sl.eta_den, Some(noise), opts),
    );
    let phi_y = ecf(&samples.centered_column(Column::Yij), grid).map_err(|e| e.in_stage("epsilon: ecf"))?;
    finish(
        Mode::MonteCarlo { n: samples.len() },
        *grid,
        opts,
        Some(noise),
        phi_y,
        alpha?,
        eta?,
    )
}

/// Identification from closed-form slices.
pub fn identify_from_slices(slices: &PhiYSlices, opts: &IdentifyOptions) -> Result<Identification> {
    let grid = *slices.curve_s00.grid();
    let alpha = run_stage("alpha", &slices.dcurve_00r, &slices.curve_00r, None, opts)?;
    let eta = run_stage("eta", &slices.dcurve_0t0, &slices.curve_0t0, None, opts)?;
    finish(
        Mode::Oracle,
        grid,
        opts,
        None,
        slices.curve_s00.clone(),
        alpha,
        eta,
    )
}

/// `φ̂_α` from the `(y_ij, y_iℓ)` pair.
pub fn identify_alpha(
    samples: &SampleSet,
    grid: &FreqGrid,
    schedule: &DeltaSchedule,
) -> Result<ComplexCurve> {
    let sl = sample_slices(samples, grid, true, false)?;
    let opts = IdentifyOptions::with_schedule(schedule.clone());
    let stage = run_stage(
        "alpha",
        &sl.alpha_num,
        &sl.alpha_den,
        Some(samples.noise_floor()),
        &opts,
    )?;
    Ok(stage.reconstruction.curve)
}

/// `φ̂_η` from the `(y_ij, y_kj)` pair.
pub fn identify_eta(samples: &SampleSet, grid: &FreqGrid, schedule: &DeltaSchedule) -> Result<ComplexCurve> {
    let sl = sample_slices(samples, grid, false, true)?;
    let opts = IdentifyOptions::with_schedule(schedule.clone());
    let stage = run_stage(
        "eta",
        &sl.eta_num,
        &sl.eta_den,
        Some(samples.noise_floor()),
        &opts,
    )?;
    Ok(stage.reconstruction.curve)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroEntry {
    pub stage: &'static str,
    #[serde(flatten)]
    pub zero: ZeroPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularEntry {
    pub stage: &'static str,
    #[serde(flatten)]
    pub classification: ZeroClassification,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub stage: &'static str,
    /// `bridge` traces the exponent across a singular point; `probe` traces
    /// the reconstructed value at a point near one.
    pub kind: &'static str,
    pub point: f64,
    pub deltas: Vec<f64>,
    pub values: Vec<Complex64>,
    pub extrapolated: Vec<Complex64>,
    pub last_step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceFlag {
    pub stage: &'static str,
    pub point: f64,
    pub converged: bool,
    pub last_step: f64,
    pub previous_step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub curve: &'static str,
    #[serde(flatten)]
    pub report: CfValidation,
}

/// Machine-readable evidence behind an identification run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub mode: Mode,
    pub grid: FreqGrid,
    pub noise_floor: Option<f64>,
    pub zeros: Vec<ZeroEntry>,
    pub spurious_dips: Vec<ZeroEntry>,
    pub singular: Vec<SingularEntry>,
    pub delta_trace: Vec<TraceEntry>,
    pub convergence_flags: Vec<ConvergenceFlag>,
    pub epsilon: EpsilonResult,
    pub validation: Vec<ValidationEntry>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    fn from_identification(id: &Identification) -> Self {
        let stages = [&id.alpha, &id.eta];
        let mut d = Diagnostics {
            mode: id.mode,
            grid: id.grid,
            noise_floor: id.noise_floor,
            zeros: Vec::new(),
            spurious_dips: Vec::new(),
            singular: Vec::new(),
            delta_trace: Vec::new(),
            convergence_flags: Vec::new(),
            epsilon: id.epsilon.clone(),
            validation: Vec::new(),
            warnings: id.epsilon.warnings.clone(),
        };
        for st in stages {
            let stage = st.name;
            d.zeros
                .extend(st.zeros.points().iter().map(|&zero| ZeroEntry { stage, zero }));
            d.spurious_dips
                .extend(st.spurious.iter().map(|&zero| ZeroEntry { stage, zero }));
            d.singular
                .extend(st.classification.iter().map(|&classification| SingularEntry {
                    stage,
                    classification,
                }));
            for b in st.reconstruction.bridges() {
                d.delta_trace.push(TraceEntry {
                    stage,
                    kind: "bridge",
                    point: b.point,
                    deltas: b.deltas.clone(),
                    values: b.exponents.clone(),
                    extrapolated: b.extrapolated.clone(),
                    last_step: b.last_step,
                });
                d.convergence_flags.push(ConvergenceFlag {
                    stage,
                    point: b.point,
                    converged: b.converged,
                    last_step: b.last_step,
                    previous_step: b.previous_step,
                });
            }
            for p in &st.probes {
                d.delta_trace.push(TraceEntry {
                    stage,
                    kind: "probe",
                    point: p.point,
                    deltas: p.deltas.clone(),
                    values: p.raw.clone(),
                    extrapolated: p.extrapolated.clone(),
                    last_step: p.last_step,
                });
            }
            if !st.spurious.is_empty() {
                d.warnings.push(format!(
                    "{stage}: {} modulus dips below the noise floor were not bridged",
                    st.spurious.len()
                ));
            }
        }
        let tol = id.mode.validation_tolerance();
        for (curve, c) in [
            ("alpha", id.alpha_cf()),
            ("eta", id.eta_cf()),
            ("epsilon", id.epsilon_cf()),
        ] {
            let report = validate_cf_curve(c, tol);
            if !report.passed {
                d.warnings.push(format!(
                    "{curve}: CF validation failed at tolerance {tol:e} (max violation {:e})",
                    report.max_violation()
                ));
            }
            d.validation.push(ValidationEntry { curve, report });
        }
        d
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagnostics serialize")
    }
}
