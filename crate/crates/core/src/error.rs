use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("grid is empty")]
    EmptyGrid,

    #[error("grid is not strictly increasing at index {index}")]
    NonMonotonicGrid { index: usize },

    #[error("grid is not uniform (spacing {found} differs from {expected})")]
    NonUniformGrid { expected: f64, found: f64 },

    #[error("grid spacing {spacing} exceeds the resolution limit {limit}")]
    Undersampled { spacing: f64, limit: f64 },

    #[error("spectrum value at index {index} is {value}; values must be finite and non-negative")]
    InvalidSpectrumValue { index: usize, value: f64 },

    #[error("selectivity undefined: I_S + I_AS = 0 (dark emitter)")]
    DarkEmitter,

    #[error("correlation undefined: steady-state photon flux is zero")]
    ZeroFlux,

    #[error("steady state is not unique (null-space dimension {dimension})")]
    NonUniqueSteadyState { dimension: usize },

    #[error(
        "Fock truncation insufficient: population {population:e} in level {cutoff} exceeds {limit:e}; \
         increase the photon cutoff"
    )]
    TruncationExceeded {
        population: f64,
        cutoff: usize,
        limit: f64,
    },

    #[error("integrator step size underflow at t = {time} (h = {step:e}, error estimate {error:e})")]
    StepSizeFailure { time: f64, step: f64, error: f64 },

    #[error("density matrix invariant violated: {0}")]
    InvariantViolation(String),

    #[error("coupling calibration failed: {0}")]
    CalibrationFailure(String),

    #[error("fit `{model}` did not converge after {iterations} iterations (residual {residual:e})")]
    FitDidNotConverge {
        model: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("temperature {temperature} K outside tabulated span [{min}, {max}] K")]
    Extrapolation { temperature: f64, min: f64, max: f64 },

    #[error("{path}:{line}: `{key}`: {message}")]
    Config {
        path: String,
        line: usize,
        key: String,
        message: String,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("oracle mismatch: RMS relative deviation {rms:.4} exceeds tolerance {tolerance}")]
    OracleMismatch { rms: f64, tolerance: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Innermost error under any [`Error::Stage`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code for the CLI: 1 input/configuration, 2 physics or
    /// numerical invariant, 3 oracle mismatch.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::OracleMismatch { .. } => 3,
            e if e.is_physics_failure() => 2,
            _ => 1,
        }
    }

    pub(crate) fn param(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Whether the error reports a violated physical or numerical invariant
    /// (as opposed to bad input or configuration).
    pub fn is_physics_failure(&self) -> bool {
        matches!(
            self.root(),
            Error::NonUniqueSteadyState { .. }
                | Error::TruncationExceeded { .. }
                | Error::StepSizeFailure { .. }
                | Error::InvariantViolation(_)
                | Error::CalibrationFailure(_)
                | Error::FitDidNotConverge { .. }
                | Error::ZeroFlux
                | Error::DarkEmitter
        )
    }
}
