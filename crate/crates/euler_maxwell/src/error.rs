use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parameter `{0}` must be strictly positive")]
    NonPositiveParameter(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("zero wavenumber")]
    ZeroWavenumber,
    #[error("K_i + K_e is singular")]
    SingularSum,
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("no admissible weights: {0}")]
    WeightSearchFailed(String),
    #[error("non-positive sample at index {0}")]
    NonPositiveSample(usize),
    #[error("fit needs at least {needed} samples in window, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("vacuum reached: min(1 + rho) = {0:e}")]
    VacuumReached(f64),
    #[error("step rejected: {0}")]
    StepRejected(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("mode {index:?}: {source}")]
    AtMode {
        index: [i64; 3],
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Validation errors map to exit code 1, numerical failures to 2.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonPositiveParameter(_)
            | Error::InvalidInput(_)
            | Error::TooFewSamples { .. }
            | Error::NonPositiveSample(_) => false,
            Error::AtMode { source, .. } => source.is_numerical(),
            _ => true,
        }
    }
}
