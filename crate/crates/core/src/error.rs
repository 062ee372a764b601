use thiserror::Error;

/// Errors raised by the identification toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("curves are defined on different grids")]
    GridMismatch,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("zeros at {first} and {second} are closer than two grid spacings; refine the grid")]
    ZerosNotIsolated { first: f64, second: f64 },

    #[error("classification window around the zero at {zero} reaches another zero; grid too coarse")]
    WindowReachesZero { zero: f64 },

    #[error("segment [{a}, {b}] crosses the singular point {point}")]
    SegmentCrossesSingular { a: f64, b: f64, point: f64 },

    #[error("segment [{a}, {b}] is outside the grid or reversed")]
    InvalidSegment { a: f64, b: f64 },

    #[error("invalid delta schedule: {0}")]
    InvalidSchedule(String),

    #[error(
        "delta limit did not converge across the bridge at s = {point} \
         (last extrapolated step {last_step:e}, previous {previous_step:e})"
    )]
    Divergent {
        point: f64,
        last_step: f64,
        previous_step: f64,
    },

    #[error("masked windows around {first} and {second} are not isolated")]
    MaskNotIsolated { first: f64, second: f64 },

    #[error("masked window around {point} has fewer than two clean grid points on one side")]
    MaskAtEdge { point: f64 },

    #[error("cutoff {cutoff} exceeds the grid half-width {s_max}")]
    CutoffExceedsGrid { cutoff: f64, s_max: f64 },

    #[error("{0:?} has no density")]
    NoDensity(crate::model::DistKind),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{source} (diagnostics: {})", path.display())]
    WithDiagnostics {
        path: std::path::PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: u64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        let reason = err.to_string();
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => Error::Csv { line, reason },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
