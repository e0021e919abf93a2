use std::path::PathBuf;

use thiserror::Error;

use crate::domain::{ToothId, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A record id together with every invariant it breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordViolations {
    pub record_id: String,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid age: {0} days")]
    InvalidAge(f64),
    #[error("invalid FDI tooth code {0}")]
    InvalidTooth(String),
    #[error("tooth 45 measurement is required")]
    MissingTooth45,
    #[error("estimated age is not positive ({0} years)")]
    NonpositiveAge(f64),
    #[error("no per-tooth predictions available")]
    NoPredictions,
    #[error("no population uncertainty statistics for tooth {0}")]
    NoPopulationStats(ToothId),
    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("degenerate series: {0}")]
    DegenerateSeries(&'static str),
    #[error("design matrix is rank deficient")]
    SingularDesign,
    #[error("too few samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid count {developed} of {total}")]
    InvalidCount { developed: u32, total: u32 },
    #[error("invalid CSM value {0}")]
    InvalidCsm(f64),
    #[error("unsupported language '{0}'")]
    UnsupportedLanguage(String),
    #[error("unknown patient '{0}'")]
    UnknownPatient(String),
    #[error("no data loaded")]
    NoData,
    #[error("{}: parse error at line {line}, column {column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{} record(s) violate the schema", .0.len())]
    SchemaViolation(Vec<RecordViolations>),
    #[error("duplicate patient id '{0}'")]
    DuplicateId(String),
    #[error("constraint violated on {field}: {message}")]
    ConstraintViolation { field: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Machine-readable code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidAge(_) => "INVALID_AGE",
            Error::InvalidTooth(_) => "INVALID_TOOTH",
            Error::MissingTooth45 => "MISSING_TOOTH_45",
            Error::NonpositiveAge(_) => "NONPOSITIVE_AGE",
            Error::NoPredictions => "NO_PREDICTIONS",
            Error::NoPopulationStats(_) => "NO_POPULATION_STATS",
            Error::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Error::DegenerateSeries(_) => "DEGENERATE_SERIES",
            Error::SingularDesign => "SINGULAR_DESIGN",
            Error::TooFewSamples { .. } => "TOO_FEW_SAMPLES",
            Error::InvalidCount { .. } => "INVALID_COUNT",
            Error::InvalidCsm(_) => "INVALID_CSM",
            Error::UnsupportedLanguage(_) => "UNSUPPORTED_LANGUAGE",
            Error::UnknownPatient(_) => "UNKNOWN_PATIENT",
            Error::NoData => "NO_DATA",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::SchemaViolation(_) => "SCHEMA_VIOLATION",
            Error::DuplicateId(_) => "DUPLICATE_ID",
            Error::ConstraintViolation { .. } => "CONSTRAINT_VIOLATION",
            Error::Io { .. } => "IO_ERROR",
        }
    }

    /// The module that raised the error, used to qualify codes on the CLI.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidAge(_) | Error::InvalidTooth(_) => "domain",
            Error::MissingTooth45 | Error::NonpositiveAge(_) => "estimate",
            Error::NoPredictions | Error::NoPopulationStats(_) => "reliability",
            Error::LengthMismatch { .. }
            | Error::DegenerateSeries(_)
            | Error::SingularDesign
            | Error::TooFewSamples { .. } => "surrogate",
            Error::InvalidCount { .. } | Error::InvalidCsm(_) | Error::UnsupportedLanguage(_) => {
                "nlg"
            }
            Error::UnknownPatient(_) | Error::NoData => "app",
            Error::Parse { .. }
            | Error::SchemaViolation(_)
            | Error::DuplicateId(_)
            | Error::ConstraintViolation { .. }
            | Error::Io { .. } => "store",
        }
    }

    pub fn qualified_code(&self) -> String {
        format!("{}.{}", self.module(), self.code())
    }

    /// Failures to read or load an input file, as opposed to domain errors.
    pub fn is_io_or_parse(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::SchemaViolation(_)
                | Error::DuplicateId(_)
                | Error::ConstraintViolation { .. }
        )
    }

    /// Process exit status: 1 for I/O or parse failures, 2 for domain errors.
    pub fn exit_code(&self) -> i32 {
        if self.is_io_or_parse() {
            1
        } else {
            2
        }
    }
}
