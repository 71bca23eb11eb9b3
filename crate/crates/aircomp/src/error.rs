//! Crate-wide error type.

/// Errors reported by the channel, model, and solver layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration value violates its invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Path-loss evaluation below the 1 m reference distance.
    #[error("distance {distance} m is below the 1 m reference distance")]
    BelowReferenceDistance { distance: f64 },
    /// Rician factor must be nonnegative.
    #[error("Rician factor must be nonnegative, got {beta}")]
    NegativeRicianFactor { beta: f64 },
    /// A line-of-sight matrix entry is not unit modulus.
    #[error("line-of-sight component has a non-unit-modulus entry (|value| = {modulus})")]
    NonUnitModulusLos { modulus: f64 },
    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The beamformer is (numerically) orthogonal to some composite channel,
    /// so the zero-forcing design and the MSE are undefined.
    #[error("beamformer projection onto a composite channel is numerically zero")]
    ZeroProjection,
    /// No choice of phase shifts yields a nonzero composite channel.
    #[error("channels are infeasible: a device has no energy on any link")]
    InfeasibleChannels,
    /// Simplex-domain quantities must be strictly positive.
    #[error("simplex entry must be strictly positive, got {value}")]
    NonPositiveSimplexEntry { value: f64 },
    /// Bregman reference point has zero dual mass where the point has mass.
    #[error("Bregman reference has a zero dual component where the point is positive")]
    BregmanDomain,
    /// A mirror step produced non-finite values.
    #[error("mirror step produced non-finite values")]
    StepFailure,
    /// Failed to parse a configuration file.
    #[error("parse error: {0}")]
    Parse(String),
    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
