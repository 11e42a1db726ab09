use thiserror::Error;

use crate::geometry::Vec3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("face {face} is degenerate (area {area:e} m^2)")]
    DegenerateTriangle { face: usize, area: f64 },

    #[error("face {face} references unknown material `{name}`")]
    UnknownMaterial { face: usize, name: String },

    #[error("invalid material table: {0}")]
    Materials(String),

    #[error("mesh is not watertight: {} boundary or non-manifold edge(s), e.g. {:?}", .edges.len(), .edges.first())]
    NotWatertight { edges: Vec<(Vec3, Vec3)> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("source {0} is not strictly inside the scene bounds")]
    SourceOutsideScene(Vec3),

    #[error("no collisions; mean-free path undefined")]
    NoCollisions,

    #[error("insufficient decay in band {band} (reached {reached_db:.1} dB); increase bounces/duration")]
    InsufficientDecay { band: usize, reached_db: f64 },

    #[error("reverb filter degenerates: comb gain {gain:e} below 1e-4 for rt60 {rt60} s")]
    DegenerateFilter { rt60: f64, gain: f64 },

    #[error("sample rate mismatch: signal {signal} Hz, filter {filter} Hz")]
    SampleRateMismatch { signal: u32, filter: u32 },

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("cluster {0} has no RT60")]
    MissingRt60(usize),

    #[error("position {position} is {distance:.3} m from the nearest baked sample (radius {radius} m)")]
    OutOfCoverage { position: Vec3, distance: f64, radius: f64 },

    #[error("bake file does not match scene (fingerprint {expected}, scene {actual})")]
    StaleBake { expected: String, actual: String },

    #[error("path point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("wav: {0}")]
    Wav(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Acoustic,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NoCollisions | Error::InsufficientDecay { .. } | Error::DegenerateFilter { .. } => {
                ErrorKind::Acoustic
            }
            Error::AtPoint { source, .. } => source.kind(),
            _ => ErrorKind::Input,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Input => 2,
            ErrorKind::Acoustic => 3,
        }
    }

    pub(crate) fn at_point(index: usize, source: Error) -> Error {
        Error::AtPoint { index, source: Box::new(source) }
    }
}
