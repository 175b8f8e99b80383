use thiserror::Error;

/// Errors surfaced by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The local velocity-gradient system degenerated (extreme omega/velocity
    /// combination); the closed-form elimination denominator fell below the
    /// conditioning threshold.
    #[error("singular velocity-gradient system: |denominator| = {denominator:.3e} < {threshold:.3e}")]
    SingularGradient { denominator: f64, threshold: f64 },

    /// A node reached non-positive density; the run has blown up.
    #[error("non-positive density {rho:.3e} at node {node} (step {step})")]
    NonPositiveDensity { rho: f64, node: usize, step: u64 },

    /// Inconsistent domain/boundary setup.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The reference profile is identically zero; a relative norm is undefined.
    #[error("reference field is identically zero")]
    ZeroReference,

    /// A stability bracket has the same verdict at both endpoints.
    #[error("stability bracket not found: {0}")]
    BracketNotFound(String),

    /// I/O failure with path context.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file (configs, checkpoints, reference data).
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
