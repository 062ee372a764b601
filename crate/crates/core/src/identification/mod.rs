//! Zeros, singular points, the δ-limit reconstruction and the division step.

mod continuity;
mod epsilon;
mod pipeline;
mod quadrature;
mod reconstruct;
mod singular;
pub mod zeros;

pub use continuity::{extend_by_continuity, extend_by_continuity_within};
pub use epsilon::{identify_epsilon, identify_epsilon_with, EpsilonOptions, EpsilonResult};
pub use pipeline::{
    identify_alpha, identify_eta, identify_from_samples, identify_from_slices, run_stage, ConvergenceFlag,
    Diagnostics, Identification, IdentifyOptions, Mode, SingularEntry, StageResult, TraceEntry,
    ValidationEntry, ZeroEntry,
};
pub use quadrature::integrate_psi_segment;
pub use reconstruct::{
    characteristic_gap, reconstruct_cf, reconstruct_cf_with, BridgeTrace, DeltaSchedule, Extrapolation,
    NegativeAxis, ProbeTrace, ReconstructOptions, Reconstruction,
};
pub use singular::{classify_singular, classify_zeros, ClassifyOptions, SingularSet, ZeroClassification};
pub use zeros::{detect_zeros, detect_zeros_with, Detection, ZeroDetection, ZeroPoint, ZeroSet};
