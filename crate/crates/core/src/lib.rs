//! Identification of the component distributions in the two-way dyadic model
//! `y_ij = c + α_i + η_j + ε_ij`.
//!
//! From replicates of the connected triple `(y_ij, y_kj, y_il)` the toolkit
//! estimates characteristic-function slices, forms the logarithmic-derivative
//! ratios ψ, integrates them across isolated zeros with an explicit δ-limit,
//! divides out the identified row and column effects to recover the idiosyncratic
//! error CF, and inverts CFs to densities.
//!
//! The pipeline can run on simulated or ingested samples, or on closed-form
//! ("oracle") CF slices that isolate numerical error from sampling error.

pub mod cf;
pub mod cli;
pub mod deconvolution;
pub mod error;
pub mod identification;
pub mod io;
pub mod model;
pub mod oracle;
pub mod simulator;
pub mod svg;

pub use cf::{ecf, ecf_partial_first, psi_from_curves, PsiCurve};
pub use deconvolution::{density_error_report, invert_cf, DensityEstimate, SpatialGrid, Window};
pub use error::{Error, Result};
pub use identification::{
    classify_singular, detect_zeros, extend_by_continuity, identify_alpha, identify_epsilon, identify_eta,
    integrate_psi_segment, reconstruct_cf, DeltaSchedule, Extrapolation, IdentifyOptions, SingularSet,
    ZeroSet,
};
pub use model::{
    validate_cf_curve, ComplexCurve, ComponentDist, CurveKind, DistKind, FreqGrid, ModelConfig, SampleSet,
    TripleSample,
};
pub use oracle::{analytic_cf, analytic_cf_deriv, compose_phi_y_slices, PhiYSlices};
pub use simulator::sample_components;

pub use num_complex::Complex64;
