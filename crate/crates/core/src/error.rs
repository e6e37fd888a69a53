use alloc::boxed::Box;
use alloc::string::String;

/// Errors raised anywhere in the core pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("density value {value:e} at x = {x} is below the evaluation threshold")]
    Underflow { x: f64, value: f64 },

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error(
        "quadrature did not converge: estimate {estimate}, error {error:e} after {panels} panels"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("functional {name} is not finite")]
    NonFiniteFunctional { name: String },

    #[error("density is not Fisher-normalized (I = {fisher})")]
    NotNormalized { fisher: f64 },

    #[error("Fisher information {0} is not a positive finite number")]
    InvalidFisherInformation(f64),

    #[error("density tails could not be bracketed")]
    UnboundedSupport,

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("maximum likelihood solver did not converge")]
    MleNoConvergence,

    #[error("quantile level {0} is outside (0, 1)")]
    InvalidLevel(f64),

    #[error("quantile level {0} was not simulated")]
    MissingLevel(f64),

    #[error("{0} must not be empty")]
    EmptyList(&'static str),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown catalog entry {0:?}")]
    UnknownEquation(String),

    #[error("catalog entry {0} is an input and has no derivation recipe")]
    NoRecipe(&'static str),

    #[error("derivation of {id} failed: {reason}")]
    RecipeFailed { id: &'static str, reason: String },

    #[error("expansion evaluated to a non-finite value")]
    NonFiniteResult,

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with all context layers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
