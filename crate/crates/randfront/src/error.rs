//! Error taxonomy shared by every module.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while assembling or running an experiment.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A spec or config violates a declared constraint. Carries every
    /// violation found, not just the first.
    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    /// A value was requested outside the support of a sampled object.
    #[error("domain error: {0}")]
    Domain(String),

    /// A statistic could not be estimated at the requested window.
    #[error("estimation error: {message} (attained window {attained}, needed {needed})")]
    Estimation {
        message: String,
        attained: f64,
        needed: f64,
    },

    /// Exponential moment requested at or beyond the abscissa of convergence.
    #[error("exponent {mu} is not below the abscissa of convergence {sigma}")]
    BeyondAbscissa { mu: f64, sigma: f64 },

    /// Explicit time step above the stability budget.
    #[error("time step {dt} exceeds the stability budget; use dt <= {suggested}")]
    TimeStepTooLarge { dt: f64, suggested: f64 },

    /// Advection CFL number above the allowed bound.
    #[error("CFL violated: dt {dt} with max speed {speed}; use dt <= {suggested}")]
    CflViolation { dt: f64, speed: f64, suggested: f64 },

    /// The sampled least-mean speed curve failed the unimodality diagnostic.
    /// Carries the sampled (mu, least mean) curve for inspection.
    #[error("least-mean speed curve is not unimodal near mu = {mu}")]
    NonUnimodal { mu: f64, curve: Vec<(f64, f64)> },

    /// The wave limit did not converge within the schedule. Carries the
    /// recorded sup-distance sequence.
    #[error("wave construction did not converge: sup distances {distances:?}")]
    WaveNotConverged { distances: Vec<f64> },

    /// Perturbed initial data violate the admissibility conditions.
    #[error("initial data rejected: {reason} on window [{from}, {to}] (max deviation {max_dev})")]
    InitialDataRejected {
        reason: String,
        from: f64,
        to: f64,
        max_dev: f64,
    },

    /// The tracked ratio bound grew persistently instead of contracting.
    #[error("stability run diverged at t = {t} (alpha rose by {rise})")]
    Diverged { t: f64, rise: f64 },

    /// Wrong arity or shape of an argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Single-message configuration error.
    pub fn config<S: Into<String>>(msg: S) -> Self {
        Error::Config(vec![msg.into()])
    }
}
